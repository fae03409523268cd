use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A model or basis parameter is outside the supported range.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// The fitted smooth staircase is not monotone over the retained levels.
    #[error("unfolding failed: {0}")]
    Unfolding(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("computation failed for '{label}': {reason}")]
    Computation { label: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
