use std::process::ExitCode;

use equidyn_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("resource cap: {0}")]
    Resource(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn config(field: &str, e: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("field `{field}`: {e}"))
    }

    pub fn internal(e: impl std::fmt::Display) -> CliError {
        CliError::Internal(e.to_string())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Internal(_) => 4,
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::EnumerationTooLarge { required, cap } => {
                CliError::Resource(format!("enumeration needs {required} words but \"cap\" is {cap}"))
            }
            Error::InvalidParameter(_)
            | Error::AlphabetMismatch { .. }
            | Error::UnsupportedSystem(_)
            | Error::NotLocallyPeriodic { .. }
            | Error::OverlappingBalls { .. } => CliError::Config(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}
