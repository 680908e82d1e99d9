use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LumenError {
    #[error("point is not an element of the evaluation domain")]
    DomainMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("invalid domain size {0}: must be a power of two dividing p - 1")]
    InvalidDomain(usize),
    #[error("seed did not hash to a usable group residue")]
    InvalidSeed,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("masking polynomial resampling exhausted after {0} attempts")]
    MaskingExhausted(usize),
    #[error("polynomial degree {degree} exceeds the bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("challenge domain error: degree bound must be positive")]
    ChallengeDomainError,
    #[error("malformed aggregation step: {0}")]
    MalformedStep(String),
    #[error("relation index inconsistent: {0}")]
    IndexInconsistency(String),
    #[error("witness does not satisfy the relation: {0}")]
    WitnessMismatch(String),
    #[error("quotient not exact: vanishing polynomial does not divide {0}")]
    NonDivisible(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, LumenError>;
