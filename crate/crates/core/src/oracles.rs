//! Brute-force and stochastic cross-checks for the inference routines.
//!
//! These deliberately avoid the reduction used by the engine: the grid
//! oracle enumerates explicit priors and evaluates the posterior ratio in
//! the pfd domain, and the Monte Carlo oracle samples Bernoulli histories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::inference::{KnowledgeConstraint, OperationCount, PfdPrior};

/// Samples per Monte Carlo chunk. Chunk `i` draws from a ChaCha8 generator
/// seeded with `seed_from_u64(seed)` on stream `i`.
pub const MC_CHUNK: u64 = 1 << 16;

/// Minimum expected number of survivors of the past demands.
pub const MIN_EXPECTED_SURVIVORS: f64 = 100.0;

fn ln_surv(q: f64, t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if q >= 1.0 {
        f64::NEG_INFINITY
    } else {
        t * (-q).ln_1p()
    }
}

/// Posterior survival ratio of an explicit prior given as `(ln weight, q)`
/// pairs; `None` when the past is impossible under it.
fn two_atom_posterior(atoms: [(f64, f64); 2], tp: f64, tf: f64) -> Option<f64> {
    let den_terms = atoms.map(|(lw, q)| lw + ln_surv(q, tp));
    let shift = den_terms[0].max(den_terms[1]);
    if shift == f64::NEG_INFINITY {
        return None;
    }
    let num_terms = atoms.map(|(lw, q)| lw + ln_surv(q, tp + tf));
    let den: f64 = den_terms.iter().map(|l| (l - shift).exp()).sum();
    let num: f64 = num_terms.iter().map(|l| (l - shift).exp()).sum();
    Some(num / den)
}

/// `q` with `(1 - q)^t = x`.
fn pfd_at(x: f64, t: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        -(x.ln() / t).exp_m1()
    }
}

fn check_inputs(t_past: OperationCount, grid_size: usize) -> Result<f64> {
    if grid_size < 3 {
        return Err(invalid("grid_size", format!("{grid_size} is below 3")));
    }
    if t_past.is_zero() {
        return Err(Error::DegenerateEvidence(
            "grid oracle needs past operation",
        ));
    }
    Ok(t_past.demands())
}

/// Grid of bad-atom pfds above the constraint edge, uniform in
/// `x = (1 - q)^{T_past}` over `[0, x_edge)`.
fn bad_atom_grid(x_edge: f64, tp: f64, n: usize) -> impl IndexedParallelIterator<Item = f64> {
    (0..n)
        .into_par_iter()
        .map(move |j| pfd_at(x_edge * j as f64 / n as f64, tp))
}

/// Minimum of the posterior reliability over explicitly enumerated priors
/// satisfying `constraint`.
///
/// `PfdZero`: priors `{(0, p_p), (q, 1 - p_p)}` with `q` on a grid over
/// `(0, 1]`. `PfdBounded`: priors `{(q1, p_l), (q2, 1 - p_l)}` with
/// `q1 ∈ [0, q_l]` and `q2 ∈ (q_l, 1]`, both gridded. Each grid is uniform
/// in `(1 - q)^{T_past}`. The result is an upper bound on the infimum.
pub fn atom_grid_worst_case(
    constraint: &KnowledgeConstraint,
    t_past: OperationCount,
    t_fut: OperationCount,
    grid_size: usize,
) -> Result<f64> {
    constraint.validate()?;
    let tp = check_inputs(t_past, grid_size)?;
    let tf = t_fut.demands();
    let min = match *constraint {
        KnowledgeConstraint::PfdZero { p_p } => bad_atom_grid(1.0, tp, grid_size)
            .filter_map(|q| two_atom_posterior([(p_p.ln(), 0.0), ((1.0 - p_p).ln(), q)], tp, tf))
            .reduce(|| f64::INFINITY, f64::min),
        KnowledgeConstraint::PfdBounded { p_l, q_l } => {
            bounded_grid_min(p_l, q_l, tp, tf, grid_size, false)
        }
    };
    Ok(min.min(1.0))
}

fn bounded_grid_min(p_l: f64, q_l: f64, tp: f64, tf: f64, n: usize, edge_only: bool) -> f64 {
    let x_edge = ln_surv(q_l, tp).exp();
    let good: Vec<f64> = if edge_only {
        vec![q_l]
    } else {
        // Uniform in y over [x_edge, 1]; the endpoints are exactly q_l and 0.
        (0..n)
            .map(|i| match i {
                0 => q_l,
                i if i == n - 1 => 0.0,
                i => pfd_at(x_edge + (1.0 - x_edge) * i as f64 / (n - 1) as f64, tp).min(q_l),
            })
            .collect()
    };
    let (lw_good, lw_bad) = (p_l.ln(), (1.0 - p_l).ln());
    bad_atom_grid(x_edge, tp, n)
        .map(|q2| {
            good.iter()
                .filter_map(|&q1| two_atom_posterior([(lw_good, q1), (lw_bad, q2)], tp, tf))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Result of checking that the constrained mass belongs at the edge `q_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficiencyCheck {
    /// Two-atom grid minimum with the constrained atom free in `[0, q_l]`.
    pub free_minimum: f64,
    /// Same grid with the constrained atom pinned at `q_l`.
    pub edge_minimum: f64,
    /// Set when freeing the constrained atom lowers the minimum by more than
    /// the tolerance.
    pub violated: bool,
}

pub fn two_atom_sufficiency(
    p_l: f64,
    q_l: f64,
    t_past: OperationCount,
    t_fut: OperationCount,
    grid_size: usize,
    tolerance: f64,
) -> Result<SufficiencyCheck> {
    KnowledgeConstraint::pfd_bounded(p_l, q_l)?;
    let tp = check_inputs(t_past, grid_size)?;
    let tf = t_fut.demands();
    let free_minimum = bounded_grid_min(p_l, q_l, tp, tf, grid_size, false);
    let edge_minimum = bounded_grid_min(p_l, q_l, tp, tf, grid_size, true);
    Ok(SufficiencyCheck {
        free_minimum,
        edge_minimum,
        violated: free_minimum < edge_minimum - tolerance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Past demands, simulated as whole Bernoulli trials.
    pub t_past: u64,
    pub t_fut: u64,
    pub prior: PfdPrior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    /// Fraction of past survivors that also survive the future demands.
    pub estimate: f64,
    /// Binomial standard error of `estimate`.
    pub std_error: f64,
    pub survivors: u64,
}

/// Estimates the posterior survival probability by simulation.
///
/// Each sample draws a pfd from the prior, survives the past demands with
/// probability `(1 - q)^{t_past}` and, if it does, the future ones with
/// probability `(1 - q)^{t_fut}`. Deterministic for a given config.
pub fn monte_carlo_conditional_survival(config: &SimulationConfig) -> Result<MonteCarloEstimate> {
    if config.n_samples == 0 {
        return Err(invalid("n_samples", "must be at least 1"));
    }
    let atoms = config.prior.atoms();
    let (tp, tf) = (config.t_past as f64, config.t_fut as f64);
    let past: Vec<f64> = atoms.iter().map(|a| ln_surv(a.q, tp).exp()).collect();
    let fut: Vec<f64> = atoms.iter().map(|a| ln_surv(a.q, tf).exp()).collect();
    let mut cumulative: Vec<f64> = atoms
        .iter()
        .scan(0.0, |acc, a| {
            *acc += a.weight;
            Some(*acc)
        })
        .collect();
    if let Some(last) = cumulative.last_mut() {
        *last = f64::INFINITY;
    }

    let expected: f64 = config.n_samples as f64
        * atoms
            .iter()
            .zip(&past)
            .map(|(a, s)| a.weight * s)
            .sum::<f64>();
    if expected < MIN_EXPECTED_SURVIVORS {
        return Err(Error::InsufficientConditioning {
            expected,
            required: MIN_EXPECTED_SURVIVORS,
        });
    }

    let n_chunks = config.n_samples.div_ceil(MC_CHUNK);
    let (survivors, successes) = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(chunk);
            let len = MC_CHUNK.min(config.n_samples - chunk * MC_CHUNK);
            let (mut surv, mut succ) = (0u64, 0u64);
            for _ in 0..len {
                let u: f64 = rng.random();
                let i = cumulative.partition_point(|&c| c <= u);
                if rng.random::<f64>() < past[i] {
                    surv += 1;
                    if rng.random::<f64>() < fut[i] {
                        succ += 1;
                    }
                }
            }
            (surv, succ)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0u64, 0u64), |(a, b), (c, d)| (a + c, b + d));

    if survivors == 0 {
        return Err(Error::InsufficientConditioning {
            expected,
            required: MIN_EXPECTED_SURVIVORS,
        });
    }
    let p = successes as f64 / survivors as f64;
    Ok(MonteCarloEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / survivors as f64).sqrt(),
        survivors,
    })
}
