use std::path::Path;

use thiserror::Error;

/// Failure categories with distinct process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("calibration failed: {reason}")]
    Calibration { reason: String, trace: Vec<f64> },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Capacity(_) => 4,
            CliError::Calibration { .. } => 5,
            CliError::Io(_) => 1,
        }
    }

    /// Unreadable or malformed input files are configuration errors.
    pub fn input(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {err}", path.display()))
    }

    pub fn output(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<annealsched::Error> for CliError {
    fn from(e: annealsched::Error) -> Self {
        use annealsched::Error as E;
        match e {
            E::Argument(m) => CliError::Usage(m),
            E::Config(m) => CliError::Config(m),
            E::Parse { .. } => CliError::Config(e.to_string()),
            E::Capacity(m) => CliError::Capacity(m),
            E::Calibration { reason, trace } => CliError::Calibration { reason, trace },
            E::Io(err) => CliError::Io(err.to_string()),
        }
    }
}
