use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Core(#[from] qunforge::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for failed criteria, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Manifest(_) | CliError::Json(_) => 2,
            CliError::Core(qunforge::Error::InvalidParameter(_)) => 2,
            CliError::Core(qunforge::Error::MalformedTable(_)) => 2,
            CliError::Acceptance { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
