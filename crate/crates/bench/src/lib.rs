//! Shared fixtures for the engine benchmarks.

use safehorizon::{DeploymentSchedule, KnowledgeConstraint, OperationCount};

/// `(P_p, T_past, T_fut)` cases spanning short and very long horizons.
pub const BOUND_CASES: [(f64, f64, f64); 3] = [(0.9, 1.0, 5.0), (0.5, 1e6, 1e4), (0.99, 1e8, 1e10)];

pub fn ops(t: f64) -> OperationCount {
    OperationCount::new(t).expect("valid fixture")
}

pub fn pfd_zero(p: f64) -> KnowledgeConstraint {
    KnowledgeConstraint::pfd_zero(p).expect("valid fixture")
}

/// Four-fold production increase at t = 5, with retirement after 30.
pub fn step_schedule() -> DeploymentSchedule {
    DeploymentSchedule::step(1.0, 5.0, 4.0, 1.0)
        .and_then(|s| s.with_retirement(Some(30.0)))
        .expect("valid fixture")
}

/// `n` evenly spaced times over (0, 100].
pub fn time_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| 100.0 * i as f64 / n as f64).collect()
}
