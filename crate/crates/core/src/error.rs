use thiserror::Error;

/// Errors raised by function construction, quadrature and norm evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RikitError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integral diverges: {0}")]
    Diverged(String),
    #[error("quadrature inconclusive: {0}")]
    Inconclusive(String),
    #[error("dilation ratio undefined: norm of the base function is {0}")]
    UndefinedRatio(f64),
    #[error("bracket cap exceeded while solving for {0}")]
    BracketCap(String),
}

pub type Result<T> = std::result::Result<T, RikitError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(RikitError::InvalidInput(msg.into()))
}
