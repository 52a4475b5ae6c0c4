//! Front end for the `entcopy` binary: sweeps to CSV, the verification
//! suite, and single-point reports.

pub mod format;
pub mod report;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] entcopy::Error),
}

impl CliError {
    /// 2 for anything the caller can fix (arguments, paths), 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(entcopy::Error::AlphaOutOfRange(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Canonical class for a user-supplied `alpha`.
pub fn parse_class(alpha: f64) -> Result<entcopy::cloner::EntanglementClass> {
    entcopy::cloner::EntanglementClass::new(alpha).map_err(|e| match e {
        entcopy::Error::AlphaOutOfRange(a) => CliError::Usage(format!(
            "alpha = {a} is outside the canonical range [0, 1/sqrt(2)]; \
             use sqrt(1 - alpha^2) instead"
        )),
        other => other.into(),
    })
}
