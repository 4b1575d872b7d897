use proptest::prelude::*;
use safehorizon::{
    posterior_reliability, survival_probability, worst_case_posterior_bounded,
    worst_case_posterior_pfd_zero, OperationCount, PfdPrior,
};

fn ops(t: f64) -> OperationCount {
    OperationCount::new(t).unwrap()
}

fn bound(p: f64, tp: f64, tf: f64) -> f64 {
    worst_case_posterior_pfd_zero(p, ops(tp), ops(tf))
        .unwrap()
        .bound
}

/// A prior with mass `p_zero` at zero and the rest spread over `qs`.
fn prior_with_zero_mass(p_zero: f64, qs: &[(f64, f64)]) -> PfdPrior {
    let total: f64 = qs.iter().map(|(_, w)| w).sum();
    let mut atoms = vec![(0.0, p_zero)];
    atoms.extend(qs.iter().map(|&(q, w)| (q, (1.0 - p_zero) * w / total)));
    PfdPrior::new(atoms).unwrap()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bound_never_below_p_zero(p in 0.0..1.0f64, rho in log_uniform(1e-4, 1e4)) {
        prop_assert!(bound(p, 1.0, rho) >= p);
    }

    #[test]
    fn bound_depends_only_on_ratio(
        p in 0.0..1.0f64,
        rho in log_uniform(1e-3, 1e3),
        scale in log_uniform(1e-3, 1e9),
    ) {
        let base = bound(p, 1.0, rho);
        let scaled = bound(p, scale, scale * rho);
        prop_assert!((base - scaled).abs() < 1e-12, "{base} {scaled}");
    }

    #[test]
    fn bound_monotone(
        p in 0.01..0.99f64,
        tp in log_uniform(1.0, 1e6),
        tf in log_uniform(1.0, 1e6),
        bump in 1.01..3.0f64,
    ) {
        let b = bound(p, tp, tf);
        prop_assert!(bound(p, tp, tf * bump) <= b + 1e-13);
        prop_assert!(bound(p, tp * bump, tf) >= b - 1e-13);
        prop_assert!(bound((p * bump).min(1.0), tp, tf) >= b - 1e-13);
    }

    #[test]
    fn bayes_consistency(
        qs in prop::collection::vec((0.0..1.0f64, 0.01..1.0f64), 1..6),
        t in log_uniform(1e-2, 1e3),
    ) {
        let prior = prior_with_zero_mass(0.3, &qs);
        let post = posterior_reliability(&prior, ops(0.0), ops(t)).unwrap();
        let surv = survival_probability(&prior, ops(t));
        prop_assert!((post - surv).abs() < 1e-14);
    }

    #[test]
    fn chain_rule(
        qs in prop::collection::vec((log_uniform(1e-6, 0.5), 0.01..1.0f64), 1..6),
        p_zero in 0.0..0.9f64,
        tp in 0.0..200.0f64,
        t1 in 0.0..200.0f64,
        t2 in 0.0..200.0f64,
    ) {
        let prior = prior_with_zero_mass(p_zero, &qs);
        let whole = posterior_reliability(&prior, ops(tp), ops(t1 + t2)).unwrap();
        let first = posterior_reliability(&prior, ops(tp), ops(t1)).unwrap();
        let second = posterior_reliability(&prior, ops(tp + t1), ops(t2)).unwrap();
        prop_assert!((whole - first * second).abs() <= 1e-12 * whole.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn bounded_increases_toward_pfd_zero_as_edge_shrinks(
        p in 0.05..0.99f64,
        rho in log_uniform(0.01, 100.0),
        tp in log_uniform(1.0, 1e6),
    ) {
        let z = bound(p, tp, rho * tp);
        let mut prev = 0.0;
        for q_l in [1e-2, 1e-4, 1e-6, 1e-9, 1e-12] {
            let b = worst_case_posterior_bounded(p, q_l, ops(tp), ops(rho * tp)).unwrap().bound;
            prop_assert!(b >= prev - 1e-15);
            prop_assert!(b <= z + 1e-15);
            prev = b;
        }
        prop_assert!(z - prev < 1e-4);
    }
}

#[test]
fn conservatism_over_random_priors() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let p_zero: f64 = rng.random_range(0.0..1.0);
        let n = rng.random_range(1..8);
        let qs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let q = if rng.random_bool(0.1) {
                    1.0
                } else {
                    10f64.powf(rng.random_range(-9.0..0.0))
                };
                (q, rng.random_range(0.01..1.0))
            })
            .collect();
        let prior = prior_with_zero_mass(p_zero, &qs);
        let tp = 10f64.powf(rng.random_range(0.0..8.0));
        let tf = tp * 10f64.powf(rng.random_range(-3.0..3.0));
        let post = posterior_reliability(&prior, ops(tp), ops(tf)).unwrap();
        let b = bound(prior.p_zero(), tp, tf);
        assert!(post >= b - 1e-9, "{prior:?} tp={tp} tf={tf}: {post} < {b}");
    }
}
