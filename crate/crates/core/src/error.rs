use thiserror::Error;

/// Errors raised by the simulator and the analytic helpers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input makes a closed-form expression singular (for example a
    /// vanishing control field in the `gE/Ω` expansion).
    #[error("singular input: {0}")]
    Singular(String),

    /// A specification violates one of its invariants.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    /// The time integration produced a non-finite value.
    #[error("numerical divergence at t = {time:e} s, cell {cell}: {what}")]
    Divergence { time: f64, cell: usize, what: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid { field: field.into(), reason: reason.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
