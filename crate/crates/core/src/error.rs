use std::io;

use thiserror::Error;

/// Coarse error category, used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Infeasible,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    /// An operation was applied outside its domain (wrong backbone count,
    /// not a shape, wrong A/B class, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An identity that must hold by construction failed.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("shape table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::InvalidDiagram(_) | Error::Precondition(_) | Error::Io(_) => {
                ErrorKind::Input
            }
            Error::Infeasible(_) => ErrorKind::Infeasible,
            Error::Internal(_) | Error::Cache(_) => ErrorKind::Internal,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
