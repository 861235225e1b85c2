use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A document could not be parsed; `field` names the offending key when known.
    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    /// A parsed value violates a domain invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A function argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A ray was cast from inside a target.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// An angle bin maps outside the visible region of the array.
    #[error("angle bin {index} is outside the visible region (arccos argument {argument})")]
    InvisibleRegion { index: usize, argument: f64 },

    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
