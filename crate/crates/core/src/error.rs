use thiserror::Error;

/// Errors raised by the polygon calculus.
///
/// Every arithmetic path is checked; overflow surfaces as [`HnError::Overflow`]
/// rather than wrapping.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative multiplicity {0}")]
    NegativeMultiplicity(i64),
    #[error("integer overflow")]
    Overflow,
    #[error("{0} is undefined for the zero bundle")]
    ZeroBundle(&'static str),
    #[error("interval index {index} outside 1..={rank}")]
    IntervalOutOfRange { index: u64, rank: u64 },
    #[error("HN vector with zero x-component")]
    ZeroXComponent,
    #[error("first bundle does not slopewise dominate the second")]
    NotDominant,
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u64, right: u64 },
    #[error("non-integer slope {0}")]
    NonIntegerSlope(String),
    #[error("cut at x = {0} is not a lattice point of the polygon")]
    NonLatticeCut(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}

pub type Result<T, E = HnError> = std::result::Result<T, E>;
