//! Conservative Bayesian confidence horizons for systems that accumulate
//! mishap-free operation.
//!
//! The pfd (probability of failure per demand) of a system is unknown; only
//! partial prior knowledge is trusted, such as the probability that the pfd
//! is zero. After `T_past` mishap-free demands this crate computes the lowest
//! posterior probability, over all priors matching that knowledge, of
//! surviving `T_fut` more demands, and turns the resulting horizon into
//! calendar time for a growing fleet.
//!
//! ```
//! use safehorizon::{worst_case_posterior_pfd_zero, OperationCount};
//!
//! let past = OperationCount::new(1e6).unwrap();
//! let future = OperationCount::new(5e6).unwrap();
//! let r = worst_case_posterior_pfd_zero(0.9, past, future).unwrap();
//! assert!((r.bound - 0.94).abs() < 0.005);
//! ```

mod error;
mod extent;
pub mod horizon;
pub mod inference;
pub mod minimize;
pub mod oracles;
pub mod schedule;

pub use error::{Error, Result};
pub use extent::Extent;
pub use horizon::{
    horizon_closed_form_double_rate, horizon_closed_form_step, horizon_time, k_linear,
    scenario_trace, scenario_trace_for_constraint, uniform_grid, Anticipation, HorizonResult,
    ScenarioTrace, TraceRow,
};
pub use inference::{
    check_negligibility, extension_coefficient, posterior_reliability, survival_factor,
    survival_probability, worst_case_posterior, worst_case_posterior_bounded,
    worst_case_posterior_pfd_zero, Atom, KnowledgeConstraint, OperationCount, PfdPrior,
    WorstCaseResult,
};
pub use oracles::{
    atom_grid_worst_case, monte_carlo_conditional_survival, two_atom_sufficiency,
    MonteCarloEstimate, SimulationConfig, SufficiencyCheck,
};
pub use schedule::{DeploymentSchedule, Segment};
