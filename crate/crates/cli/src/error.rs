use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    /// The requested analysis does not fit the configured system size.
    #[error("infeasible analysis: {0}")]
    Feasibility(String),
    #[error("{0}")]
    Computation(ethspec::Error),
    #[error("io error at {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed table {}: {reason}", path.display())]
    Table { path: PathBuf, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Feasibility(_) => 3,
            Self::Computation(_) => 4,
            Self::Io { .. } | Self::Table { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

impl From<ethspec::Error> for CliError {
    fn from(e: ethspec::Error) -> Self {
        match e {
            ethspec::Error::Config(m) => Self::Config(m),
            ethspec::Error::Argument(_) | ethspec::Error::InsufficientData(_) => Self::Feasibility(e.to_string()),
            other => Self::Computation(other),
        }
    }
}
