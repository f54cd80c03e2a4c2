//! Pricing engine for constant log utility market makers over combinatorial
//! outcome spaces.
//!
//! The market maker keeps the geometric mean of its per-outcome reserves
//! pinned at the initial subsidy: `(1/N) * sum_j ln(C - q_j) = ln(C0)`.
//! This workspace provides:
//!
//! * exact cost recovery and pricing ([`exact`], [`market`]),
//! * model counting for 2-CNF formulas through clause prices ([`reduction`]),
//! * a sampling-based cost approximation with multiplicative guarantees
//!   ([`approx`]),
//! * an augmented balanced tree for interval markets over huge ordered
//!   outcome spaces ([`interval`]),
//! * hash-based price estimation for Boolean markets too large to enumerate
//!   ([`wish`]).

pub mod approx;
pub mod error;
pub mod exact;
pub mod interval;
pub mod market;
pub mod reduction;
pub mod twosat;
pub mod wish;

pub use error::{Error, ErrorCategory, Result};
pub use market::{
    outcome_price, outcome_price_log, security_price, LedgerEntry, Literal, MarketState, Security,
    ShareVector, BRUTE_FORCE_LIMIT,
};
