//! Error type shared by all toolkit modules.

use std::fmt;
use std::io;

/// Errors produced by the analysis toolkit.
#[derive(Debug)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    InvalidArgument(String),
    /// A text input could not be parsed. `line` is 1-based.
    Parse { line: usize, msg: String },
    /// An operation that requires data received none (e.g. no records for
    /// the requested epoch).
    NoData(String),
    /// A condition the implementation guarantees impossible for valid input.
    Internal(String),
    /// Underlying I/O failure.
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::NoData(msg) => write!(f, "no data: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
