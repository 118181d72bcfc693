use thiserror::Error;

/// Invalid parameters, unknown names, malformed configuration files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

impl ConfigError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        ConfigError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// A run that could not produce an estimate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    /// No particle of the current population lies in the next sampling
    /// region, so the population cannot be regenerated.
    #[error("population extinct at level {level} after {n_evals} evaluations")]
    Extinction { level: usize, n_evals: u64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Reading or writing a result file failed.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed record {line}: {reason}")]
    Malformed { line: usize, reason: String },
}
