use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code distance {0}: must be at least 2")]
    InvalidDistance(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("effective probability {pbar} of family {family} makes the coupling infinite; use the degenerate reference model")]
    InfiniteCoupling { family: &'static str, pbar: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("syndrome has zero probability under the noise model")]
    EmptyCoset,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("threshold not bracketed: {0}")]
    Unbracketed(String),

    #[error("malformed record: {0}")]
    Format(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
