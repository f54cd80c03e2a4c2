use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure class, used by callers (e.g. the CLI) to pick exit codes
/// and to distinguish capacity fallbacks from genuine failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Malformed input or violated precondition.
    Domain,
    /// Instance too large for the requested (brute-force) path.
    Capacity,
    /// Numerical or sampling failure at runtime.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("outcome index {index} out of range for {n_outcomes} outcomes")]
    OutcomeOutOfRange { index: u64, n_outcomes: u64 },

    #[error("interval [{lo}, {hi}] out of range for {n_outcomes} outcomes")]
    IntervalOutOfRange { lo: u64, hi: u64, n_outcomes: u64 },

    #[error("invalid security: {0}")]
    InvalidSecurity(String),

    #[error("invalid market: {0}")]
    InvalidMarket(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cost {c} does not exceed the maximum payout {q_max}")]
    SingularCost { c: f64, q_max: f64 },

    #[error("{what} needs {requested} which exceeds the limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error(
        "cost solve did not converge after {iterations} iterations \
         (bracket [{lower}, {upper}] in log-offset space, residual {residual:e})"
    )]
    NonConvergence {
        lower: f64,
        upper: f64,
        residual: f64,
        iterations: u32,
    },

    #[error("reciprocal price {value} is too close to an integer boundary to floor reliably")]
    AmbiguousCount { value: f64 },

    #[error(
        "rejection sampling budget exhausted: {attempts} attempts yielded \
         {accepted} of {needed} samples"
    )]
    SamplingBudget {
        attempts: u64,
        accepted: u64,
        needed: u64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::OutcomeOutOfRange { .. }
            | Error::IntervalOutOfRange { .. }
            | Error::InvalidSecurity(_)
            | Error::InvalidMarket(_)
            | Error::InvalidParameter(_)
            | Error::SingularCost { .. }
            | Error::Parse(_)
            | Error::Io(_) => ErrorCategory::Domain,
            Error::Capacity { .. } => ErrorCategory::Capacity,
            Error::NonConvergence { .. }
            | Error::AmbiguousCount { .. }
            | Error::SamplingBudget { .. } => ErrorCategory::Numeric,
        }
    }
}
