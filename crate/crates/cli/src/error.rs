use std::process::ExitCode;

use cran_core::CoreError;
use thiserror::Error;

use crate::channel::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags, config or channel file.
    #[error("parse error: {0}")]
    Parse(String),
    /// Inputs outside the domain or beyond a size guard.
    #[error("{0}")]
    Guard(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Verify(_) => 4,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Guard(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}
