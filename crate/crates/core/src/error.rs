use thiserror::Error;

/// Errors produced by the inference, schedule, horizon and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// The observed mishap-free operation has zero probability under the prior.
    #[error("observed mishap-free operation is impossible under the prior")]
    ImpossibleEvidence,

    /// No past operation to learn from.
    #[error("degenerate evidence: {0}")]
    DegenerateEvidence(&'static str),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("only {expected:.1} conditioning survivors expected (need at least {required})")]
    InsufficientConditioning { expected: f64, required: f64 },

    #[error("no real solution: {0}")]
    NoSolution(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<f64> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(invalid(name, format!("{p} is not a probability in [0, 1]")))
    }
}
