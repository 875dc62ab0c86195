use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected} {what}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("allocation sums to {actual}, expected {expected}")]
    SumMismatch { expected: f64, actual: f64 },

    #[error("coding profile is not sorted nondecreasing (position {position})")]
    UnsortedProfile { position: usize },

    #[error("allocation is not integer-valued")]
    NotInteger,

    #[error("order-statistic vector must be positive and nondecreasing (position {position})")]
    NonMonotone { position: usize },

    #[error("exponential integral requires a negative argument, got {0}")]
    DomainError(f64),

    #[error("harmonic-mean order statistics require t0 > 0")]
    ZeroShift,

    #[error("{samples} samples cannot be split evenly across {workers} workers")]
    Indivisible { samples: usize, workers: usize },

    #[error(
        "decoding failed for level {level} with {active} active workers (residual {residual:e})"
    )]
    Undecodable {
        level: usize,
        active: usize,
        residual: f64,
    },

    #[error("coordinate {coordinate} received {received} coded values, needs {needed}")]
    InsufficientArrivals {
        coordinate: usize,
        received: usize,
        needed: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
