use std::path::PathBuf;

use divmetric_core::DivergenceError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFICATION_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INPUT: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Config(#[from] DivergenceError),

    #[error("{path}:{line}: {message}")]
    Row {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    BadFile { path: String, message: String },

    #[error("metric mismatch: index was built with {index}, query asked for {requested}")]
    MetricMismatch { index: String, requested: String },

    #[error("index schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u64, expected: u64 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::MetricMismatch { .. } => {
                exit::USAGE
            }
            CliError::Row { .. }
            | CliError::Io { .. }
            | CliError::BadFile { .. }
            | CliError::SchemaVersion { .. } => exit::INPUT,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
