use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A partial quotient stayed ambiguous all the way up to the precision cap.
    #[error(
        "precision exhausted for m={m}, n={n}: partial quotient {index} still ambiguous at {digits} digits"
    )]
    PrecisionExhausted {
        m: u64,
        n: u32,
        index: usize,
        digits: u32,
    },

    #[error("x^{n} - {m} is reducible over the rationals")]
    ReducibleInput { n: u32, m: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
