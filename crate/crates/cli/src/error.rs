use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// Process exit status: 2 for calibration failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Calibration(_) => 2,
            _ => 1,
        }
    }
}
