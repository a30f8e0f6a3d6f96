use thiserror::Error;

/// Errors raised while building or solving relaxations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("coverage error: monomial {gamma:?} is not a sum of two basis exponents")]
    Coverage { gamma: Vec<u32> },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
