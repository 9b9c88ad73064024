//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, I/O, validation, and numeric kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file, located by line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A document violates the corpus schema.
    #[error("schema error in document '{doc_id}': {msg}")]
    Schema { doc_id: String, msg: String },

    /// Two documents share the same id.
    #[error("duplicate document id '{0}'")]
    DuplicateDoc(String),

    /// A precondition on an operation's inputs does not hold.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A value is outside the mathematical domain of an operation.
    #[error("numeric domain error: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn schema(doc_id: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            doc_id: doc_id.into(),
            msg: msg.into(),
        }
    }
}
