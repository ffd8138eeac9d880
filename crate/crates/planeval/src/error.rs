use thiserror::Error;

use crate::exactnum::NumError;

/// Errors surfaced by the library. The CLI maps each kind to an exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not supported: {0}")]
    Capability(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn domain(msg: impl Into<String>) -> Error {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Error {
        Error::Validation(msg.into())
    }

    /// Process exit code: 2 parse, 3 validation, 4 domain, 5 capability.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Num(NumError::Parse { .. }) => 2,
            Error::Validation(_) => 3,
            Error::Num(NumError::MalformedCf(_)) => 3,
            Error::Domain(_) | Error::Num(_) => 4,
            Error::Capability(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
