use std::path::PathBuf;

use crate::landscape::io::LoadError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The operation is defined but not feasible at this size (e.g. exhaustive
    /// enumeration beyond 2^30 states).
    #[error("unsupported: {0}")]
    Capability(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Load(#[from] LoadError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{} already exists and is not empty (use overwrite to replace it)", .0.display())]
    Exists(PathBuf),

    #[error("{}: malformed file: {message}", path.display())]
    Malformed { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
