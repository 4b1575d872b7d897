use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use safehorizon::{
    atom_grid_worst_case, monte_carlo_conditional_survival, two_atom_sufficiency,
    worst_case_posterior_bounded, worst_case_posterior_pfd_zero, KnowledgeConstraint,
    OperationCount, PfdPrior, SimulationConfig,
};

fn ops(t: f64) -> OperationCount {
    OperationCount::new(t).unwrap()
}

fn random_case(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let p = rng.random_range(0.05..0.99);
    let rho = 10f64.powf(rng.random_range(-2.0..2.0));
    let tp = 10f64.powf(rng.random_range(0.0..8.0));
    (p, tp, rho * tp)
}

#[test]
fn grid_oracle_dominates_and_converges() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (p, tp, tf) = random_case(&mut rng);
        let engine = worst_case_posterior_pfd_zero(p, ops(tp), ops(tf))
            .unwrap()
            .bound;
        let c = KnowledgeConstraint::pfd_zero(p).unwrap();
        for (grid, tol) in [(10_000, 1e-3), (1_000_000, 1e-5)] {
            let oracle = atom_grid_worst_case(&c, ops(tp), ops(tf), grid).unwrap();
            assert!(oracle >= engine - 1e-12, "p={p} tp={tp} tf={tf}");
            assert!(
                oracle - engine < tol,
                "gap {} at grid {grid}",
                oracle - engine
            );
        }
    }
}

#[test]
fn bounded_grid_oracle_dominates() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let (p, tp, tf) = random_case(&mut rng);
        let q_l = 10f64.powf(rng.random_range(-6.0..-1.0)) / tp.max(1.0);
        let engine = worst_case_posterior_bounded(p, q_l, ops(tp), ops(tf))
            .unwrap()
            .bound;
        let c = KnowledgeConstraint::pfd_bounded(p, q_l).unwrap();
        let oracle = atom_grid_worst_case(&c, ops(tp), ops(tf), 400).unwrap();
        assert!(oracle >= engine - 1e-12);
        assert!(oracle - engine < 1e-3, "gap {}", oracle - engine);
    }
}

#[test]
fn constrained_mass_belongs_at_the_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut violations = Vec::new();
    for _ in 0..20 {
        let p = rng.random_range(0.05..0.99);
        let tp = 10f64.powf(rng.random_range(0.0..5.0));
        let tf = tp * 10f64.powf(rng.random_range(-2.0..2.0));
        let q_l = 10f64.powf(rng.random_range(-3.0..1.0)) / tp;
        let q_l = q_l.min(0.5);
        let r = two_atom_sufficiency(p, q_l, ops(tp), ops(tf), 300, 1e-9).unwrap();
        if r.violated {
            violations.push((p, q_l, tp, tf, r));
        }
    }
    assert!(
        violations.is_empty(),
        "edge placement refuted: {violations:?}"
    );
}

#[test]
fn monte_carlo_dominates_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for i in 0..10 {
        let p = rng.random_range(0.3..0.99);
        let tp = rng.random_range(1..200u64);
        let tf = rng.random_range(1..400u64);
        let q = rng.random_range(1e-3..0.2);
        let prior = PfdPrior::new([(0.0, p), (q, 1.0 - p)]).unwrap();
        let cfg = SimulationConfig {
            n_samples: 200_000,
            seed: i,
            t_past: tp,
            t_fut: tf,
            prior,
        };
        let mc = monte_carlo_conditional_survival(&cfg).unwrap();
        let b = worst_case_posterior_pfd_zero(p, ops(tp as f64), ops(tf as f64))
            .unwrap()
            .bound;
        assert!(mc.estimate + 3.0 * mc.std_error >= b, "{mc:?} < {b}");
    }
}
