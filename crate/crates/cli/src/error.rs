use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes. Clap's own usage errors exit with 2.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECKS_FAILED: u8 = 1;
    pub const MISSING_FILE: u8 = 3;
    pub const SYNTAX: u8 = 4;
    pub const UNKNOWN_KEY: u8 = 5;
    pub const INVALID: u8 = 6;
    pub const NUMERICAL: u8 = 7;
    pub const OUTPUT: u8 = 8;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    MissingFile { path: PathBuf, source: std::io::Error },

    #[error("malformed config {path}: {message}")]
    Syntax { path: PathBuf, message: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },

    #[error("run failed: {0}")]
    Run(lightstore::Error),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Invalid { key: key.into(), reason: reason.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::MissingFile { .. } => exit::MISSING_FILE,
            CliError::Syntax { .. } => exit::SYNTAX,
            CliError::UnknownKey(_) => exit::UNKNOWN_KEY,
            CliError::Invalid { .. } => exit::INVALID,
            CliError::Run(_) => exit::NUMERICAL,
            CliError::Output(_) => exit::OUTPUT,
        }
    }
}

impl From<lightstore::Error> for CliError {
    fn from(e: lightstore::Error) -> Self {
        match e {
            lightstore::Error::Invalid { field, reason } => CliError::Invalid { key: field, reason },
            lightstore::Error::Io(msg) => CliError::Output(msg),
            other => CliError::Run(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
