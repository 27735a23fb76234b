use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("malformed potential file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] bloch_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bloch_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Malformed { .. } => EXIT_USAGE,
            CliError::Write { .. } => EXIT_NUMERICAL,
            CliError::Core(e) => match e {
                E::InvalidPeriods(_)
                | E::InvalidAxis { .. }
                | E::CellOutOfRange { .. }
                | E::LengthMismatch { .. }
                | E::ConfigMismatch { .. }
                | E::ZeroMultiplier { .. }
                | E::NonReal { .. }
                | E::InvalidResolution(_) => EXIT_USAGE,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
