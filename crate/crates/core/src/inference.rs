//! Bernoulli-trials survival, posterior reliability, and conservative
//! worst-case posterior bounds from partial prior knowledge about the
//! probability of failure per demand (pfd).
//!
//! Every demand is an independent trial that ends in a mishap with the
//! (unknown) pfd `q`. Surviving `T` demands has probability `(1 - q)^T`;
//! demand counts are nonnegative reals so that fleet integrals can be used
//! directly.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, invalid, Error, Result};
use crate::extent::Extent;
use crate::minimize::{grid_golden, Minimum};

/// Tolerance on the total weight of a [`PfdPrior`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// An amount of operation, measured in demands.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct OperationCount(f64);

impl OperationCount {
    pub const ZERO: OperationCount = OperationCount(0.0);

    pub fn new(demands: f64) -> Result<Self> {
        if demands.is_finite() && demands >= 0.0 {
            Ok(OperationCount(demands))
        } else {
            Err(invalid(
                "demands",
                format!("{demands} is not a finite nonnegative count"),
            ))
        }
    }

    pub fn demands(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for OperationCount {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        OperationCount::new(value)
    }
}

impl From<OperationCount> for f64 {
    fn from(value: OperationCount) -> f64 {
        value.0
    }
}

/// `ln((1 - q)^t)`, with `(1 - 1)^t = 0` for `t > 0` and `x^0 = 1`.
pub(crate) fn log_survival_factor(q: f64, t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if q >= 1.0 {
        f64::NEG_INFINITY
    } else {
        t * (-q).ln_1p()
    }
}

/// `(1 - q)^t` evaluated in the log domain.
pub fn survival_factor(q: f64, t: f64) -> f64 {
    log_survival_factor(q, t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub q: f64,
    pub weight: f64,
}

/// A discrete prior over the pfd: a finite mixture of point masses.
///
/// Atoms are kept sorted by `q` with duplicates merged. A prior with an atom
/// at `q = 0` represents a nonzero probability of fault-freeness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfdPrior {
    atoms: Vec<Atom>,
}

impl PfdPrior {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(q, weight)| Atom { q, weight })
            .collect();
        if atoms.is_empty() {
            return Err(Error::InvalidPrior("no atoms".into()));
        }
        for a in &atoms {
            if !(a.q.is_finite() && (0.0..=1.0).contains(&a.q)) {
                return Err(Error::InvalidPrior(format!("pfd {} outside [0, 1]", a.q)));
            }
            if !(a.weight.is_finite() && (0.0..=1.0).contains(&a.weight)) {
                return Err(Error::InvalidPrior(format!(
                    "weight {} outside [0, 1]",
                    a.weight
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidPrior(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        atoms.sort_by(|a, b| a.q.total_cmp(&b.q));
        atoms.dedup_by(|next, kept| {
            if next.q == kept.q {
                kept.weight += next.weight;
                true
            } else {
                false
            }
        });
        Ok(PfdPrior { atoms })
    }

    /// A prior concentrated on a single pfd value.
    pub fn point(q: f64) -> Result<Self> {
        PfdPrior::new([(q, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Prior probability that the pfd is exactly zero.
    pub fn p_zero(&self) -> f64 {
        self.atoms
            .first()
            .filter(|a| a.q == 0.0)
            .map_or(0.0, |a| a.weight)
    }

    /// Log of the unnormalised weight each atom keeps after `t` demands.
    fn log_masses(&self, t: f64) -> impl Iterator<Item = f64> + '_ {
        self.atoms
            .iter()
            .map(move |a| a.weight.ln() + log_survival_factor(a.q, t))
    }
}

impl<'de> Deserialize<'de> for PfdPrior {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            atoms: Vec<Atom>,
        }
        let raw = Raw::deserialize(d)?;
        PfdPrior::new(raw.atoms.into_iter().map(|a| (a.q, a.weight)))
            .map_err(serde::de::Error::custom)
    }
}

/// Partial knowledge about the prior, as used by the conservative bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KnowledgeConstraint {
    /// `P(pfd = 0) = p_p`.
    PfdZero { p_p: f64 },
    /// `P(pfd <= q_l) = p_l`.
    PfdBounded { p_l: f64, q_l: f64 },
}

impl KnowledgeConstraint {
    pub fn pfd_zero(p_p: f64) -> Result<Self> {
        let c = KnowledgeConstraint::PfdZero { p_p };
        c.validate()?;
        Ok(c)
    }

    pub fn pfd_bounded(p_l: f64, q_l: f64) -> Result<Self> {
        let c = KnowledgeConstraint::PfdBounded { p_l, q_l };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KnowledgeConstraint::PfdZero { p_p } => {
                check_probability("p_p", p_p)?;
            }
            KnowledgeConstraint::PfdBounded { p_l, q_l } => {
                check_probability("p_l", p_l)?;
                if !(q_l.is_finite() && q_l > 0.0 && q_l < 1.0) {
                    return Err(invalid("q_l", format!("{q_l} is not in (0, 1)")));
                }
            }
        }
        Ok(())
    }

    /// Probability mass the constraint pins at (or below) its good pfd.
    pub fn constrained_mass(&self) -> f64 {
        match *self {
            KnowledgeConstraint::PfdZero { p_p } => p_p,
            KnowledgeConstraint::PfdBounded { p_l, .. } => p_l,
        }
    }
}

/// Outcome of a worst-case posterior minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseResult {
    /// Lowest posterior probability of surviving the future demands.
    pub bound: f64,
    /// `(1 - q*)^{T_past}` for the minimizing free atom.
    pub minimizer_x: f64,
    /// Pfd of the minimizing free atom.
    pub minimizer_q: f64,
}

/// Probability of surviving `t_fut` demands without mishap under `prior`.
pub fn survival_probability(prior: &PfdPrior, t_fut: OperationCount) -> f64 {
    let t = t_fut.demands();
    prior
        .atoms
        .iter()
        .map(|a| a.weight * survival_factor(a.q, t))
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Posterior probability of `t_fut` further mishap-free demands after
/// `t_past` mishap-free demands.
pub fn posterior_reliability(
    prior: &PfdPrior,
    t_past: OperationCount,
    t_fut: OperationCount,
) -> Result<f64> {
    if t_fut.is_zero() {
        return Ok(1.0);
    }
    let tp = t_past.demands();
    let total = tp + t_fut.demands();

    let den_terms: Vec<f64> = prior.log_masses(tp).collect();
    let shift = den_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(Error::ImpossibleEvidence);
    }
    let den: f64 = den_terms.iter().map(|l| (l - shift).exp()).sum();
    let num: f64 = prior.log_masses(total).map(|l| (l - shift).exp()).sum();
    Ok((num / den).clamp(0.0, 1.0))
}

/// Posterior survival ratio for a prior with mass `p` on a perfect pfd and the
/// rest on a free atom at `x = (1 - q)^{T_past}`, as a function of the
/// future/past ratio `rho`.
fn pessimistic_ratio(p: f64, rho: f64, x: f64) -> f64 {
    let den = p + (1.0 - p) * x;
    if den <= 0.0 {
        // p = 0 and x = 0: the limit x^rho.
        return if rho > 0.0 { 0.0 } else { 1.0 };
    }
    let num = p + (1.0 - p) * x.powf(1.0 + rho);
    (num / den).min(1.0)
}

/// Minimizes the pessimistic ratio over `x` in `[0, 1]`.
fn pessimistic_minimum(p: f64, rho: f64) -> Minimum {
    if rho == 0.0 || p == 1.0 {
        return Minimum { x: 0.0, value: 1.0 };
    }
    let mut m = grid_golden(|x| pessimistic_ratio(p, rho, x), 0.0, 1.0);
    // The ratio never drops below p; clamp rounding noise.
    m.value = m.value.max(p);
    m
}

/// `q` such that `(1 - q)^t = x`.
fn pfd_from_x(x: f64, t: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        -(x.ln() / t).exp_m1()
    }
}

fn require_past(t_past: OperationCount) -> Result<f64> {
    if t_past.is_zero() {
        Err(Error::DegenerateEvidence(
            "no past operation; use survival_probability for prior-only claims",
        ))
    } else {
        Ok(t_past.demands())
    }
}

/// Worst-case posterior reliability over all priors with mass `p_p` at
/// `pfd = 0`.
///
/// The objective is linear-fractional in the prior, so the infimum is reached
/// with a single free atom. Substituting `x = (1 - q)^{T_past}` leaves a
/// function of `x` and `rho = T_fut / T_past` only.
pub fn worst_case_posterior_pfd_zero(
    p_p: f64,
    t_past: OperationCount,
    t_fut: OperationCount,
) -> Result<WorstCaseResult> {
    check_probability("p_p", p_p)?;
    let tp = require_past(t_past)?;
    let rho = t_fut.demands() / tp;
    let m = pessimistic_minimum(p_p, rho);
    Ok(WorstCaseResult {
        bound: m.value,
        minimizer_x: m.x,
        minimizer_q: pfd_from_x(m.x, tp),
    })
}

/// Worst-case posterior reliability over all priors with `P(pfd <= q_l) = p_l`.
///
/// The constrained mass sits at `q_l` and the rest on a free atom
/// `q* >= q_l`. With `x = (1 - q_l)^{T_past} u` the objective becomes
/// `(1 - q_l)^{T_fut}` times the `pfd = 0` objective in `u`, which is what is
/// minimized here.
pub fn worst_case_posterior_bounded(
    p_l: f64,
    q_l: f64,
    t_past: OperationCount,
    t_fut: OperationCount,
) -> Result<WorstCaseResult> {
    KnowledgeConstraint::pfd_bounded(p_l, q_l)?;
    let tp = require_past(t_past)?;
    let tf = t_fut.demands();
    let rho = tf / tp;
    let m = pessimistic_minimum(p_l, rho);
    let log_edge = (-q_l).ln_1p();
    let scale = (tf * log_edge).exp();
    let minimizer_q = if m.x <= 0.0 {
        1.0
    } else {
        -(log_edge + m.x.ln() / tp).exp_m1()
    };
    Ok(WorstCaseResult {
        bound: (scale * m.value).clamp(0.0, 1.0),
        minimizer_x: (tp * log_edge).exp() * m.x,
        minimizer_q,
    })
}

/// Dispatches to the worst-case bound matching `constraint`.
pub fn worst_case_posterior(
    constraint: &KnowledgeConstraint,
    t_past: OperationCount,
    t_fut: OperationCount,
) -> Result<WorstCaseResult> {
    match *constraint {
        KnowledgeConstraint::PfdZero { p_p } => worst_case_posterior_pfd_zero(p_p, t_past, t_fut),
        KnowledgeConstraint::PfdBounded { p_l, q_l } => {
            worst_case_posterior_bounded(p_l, q_l, t_past, t_fut)
        }
    }
}

/// True when the bounded pfd `q_l` contributes at most `epsilon` mishap
/// probability over `t_fut` demands, i.e. `(1 - q_l)^{T_fut} ≈ 1`.
pub fn check_negligibility(q_l: f64, t_fut: OperationCount, epsilon: f64) -> bool {
    let risk = -log_survival_factor(q_l, t_fut.demands()).exp_m1();
    risk <= epsilon
}

/// Largest `k` such that the worst-case posterior over `k * t_past` future
/// demands is still at least `confidence`.
///
/// Returns [`Extent::Unbounded`] when the confidence never drops below the
/// requirement, which for `PfdZero` happens exactly when
/// `confidence <= p_p`.
pub fn extension_coefficient(
    constraint: &KnowledgeConstraint,
    confidence: f64,
    t_past: OperationCount,
) -> Result<Extent> {
    constraint.validate()?;
    if !(confidence.is_finite() && confidence > 0.0 && confidence < 1.0) {
        return Err(invalid(
            "confidence",
            format!("{confidence} is not in (0, 1)"),
        ));
    }
    let tp = require_past(t_past)?;

    let bound_at = |k: f64| -> f64 {
        match *constraint {
            KnowledgeConstraint::PfdZero { p_p } => pessimistic_minimum(p_p, k).value,
            KnowledgeConstraint::PfdBounded { p_l, q_l } => {
                let scale = log_survival_factor(q_l, k * tp).exp();
                scale * pessimistic_minimum(p_l, k).value
            }
        }
    };

    if let KnowledgeConstraint::PfdZero { p_p } = *constraint {
        if confidence <= p_p {
            return Ok(Extent::Unbounded);
        }
    }

    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while bound_at(hi) >= confidence {
        lo = hi;
        hi *= 2.0;
        if !(hi * tp).is_finite() || hi > 1e300 {
            return Ok(Extent::Unbounded);
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if bound_at(mid) >= confidence {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Extent::Finite(lo))
}
