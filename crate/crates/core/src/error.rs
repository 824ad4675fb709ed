use std::path::PathBuf;

use thiserror::Error;

use crate::algebra::Signature;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signature mismatch: {left:?} vs {right:?}")]
    SignatureMismatch { left: Signature, right: Signature },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time ordering violated: t = {current} after t = {previous}")]
    Ordering { previous: f64, current: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for process exit codes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Parse,
    Numeric,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Parse => 3,
            ErrorCategory::Numeric => 4,
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::Io { .. } => ErrorCategory::Config,
            Error::Parse { .. } | Error::Ordering { .. } => ErrorCategory::Parse,
            Error::SignatureMismatch { .. } | Error::Domain(_) | Error::NumericalFailure(_) => {
                ErrorCategory::Numeric
            }
            Error::Context { source, .. } => source.category(),
        }
    }

    /// Wraps the error with a human-readable context string.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
