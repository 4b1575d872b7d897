use std::fmt;

use serde::{Deserialize, Serialize};

/// A nonnegative quantity that may be unbounded, such as an extension
/// coefficient or a confidence horizon.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum Extent {
    Finite(f64),
    Unbounded,
}

impl Extent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Extent::Unbounded)
    }

    /// Converts to `f64`, mapping `Unbounded` to positive infinity.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Extent {
        match self {
            Extent::Finite(v) => Extent::Finite(f(v)),
            Extent::Unbounded => Extent::Unbounded,
        }
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Finite(v) => fmt::Display::fmt(v, f),
            Extent::Unbounded => f.write_str("inf"),
        }
    }
}
