use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A policy tree or partial realization does not match the instance shape.
    #[error("structural error: {0}")]
    Structural(String),

    /// An exact computation would exceed a configured enumeration cap.
    #[error("instance too large for exact evaluation: {what} needs {size}, cap is {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },

    /// An operation was called outside its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Bad model parameters or a malformed instance description.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate cost combination: alpha + beta must be positive")]
    DegenerateCombination,

    /// The cost increment of an item was not strictly positive.
    #[error("cost model violation: increment of item {item} is {increment}")]
    CostModelViolation { item: usize, increment: f64 },

    /// The utility was asked for a value on items that have not been observed.
    #[error("insufficient observation: item {0} is not in the partial realization")]
    InsufficientObservation(usize),

    /// No hypothesis with positive prior mass agrees with the observations.
    #[error("inconsistent evidence: no hypothesis with positive prior mass is consistent")]
    InconsistentEvidence,

    /// The utility failed the minimal-dependency check, so partial evaluation is refused.
    #[error("utility violates minimal dependency; partial-realization evaluation refused")]
    MinimalDependencyViolated,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
