use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration does not match the subcommand's schema.
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("replay mismatch in {file} at line {line}:\n  recorded: {recorded}\n  replayed: {replayed}")]
    ReplayMismatch {
        file: String,
        line: usize,
        recorded: String,
        replayed: String,
    },

    #[error("malformed manifest: {0}")]
    ManifestInvalid(String),

    #[error(transparent)]
    Core(#[from] thresholdlab::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) | CliError::ManifestInvalid(_) => 4,
            CliError::ReplayMismatch { .. } => 5,
            CliError::Core(thresholdlab::Error::Inconclusive(_)) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
