use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid ray: momentum must be non-zero and finite")]
    InvalidRay,

    #[error("point {point:?} lies outside the closure of the domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("non-finite {what} at q = {location:?}")]
    Numeric { what: &'static str, location: Vec<f64> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("estimation failed: {0}")]
    EstimationFailure(String),

    #[error("underpowered study: only {usable} of {total} rows have error above Monte Carlo noise")]
    Underpowered { usable: usize, total: usize },

    #[error("empty statistics: {0}")]
    EmptyStatistics(String),

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Tolerance { tolerance: f64, estimate: f64 },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
