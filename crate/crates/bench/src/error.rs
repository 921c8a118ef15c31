use std::path::PathBuf;

use cubic_minimax::problems::ProblemError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("problem construction failed: {0}")]
    Problem(#[from] ProblemError),
    #[error("compare needs at least two configurations, got {0}")]
    TooFewConfigs(usize),
    #[error("configuration {index} does not match the first: {reason}")]
    Mismatched { index: usize, reason: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write CSV {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } | HarnessError::Csv { .. } => 1,
            _ => 2,
        }
    }
}
