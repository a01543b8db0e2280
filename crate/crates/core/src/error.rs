use std::path::PathBuf;

use crate::ingest::AamiClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported signal format {0} (only format 212 is read)")]
    UnsupportedFormat(String),

    #[error("empty input signal")]
    EmptyInput,

    #[error("insufficient data for class {class}: {available} available, {requested} requested")]
    InsufficientData {
        class: AamiClass,
        available: usize,
        requested: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite loss at epoch {epoch}, batch {batch}: {detail}")]
    Numerical {
        epoch: usize,
        batch: usize,
        detail: String,
    },

    #[error("complexity ratio undefined: CNN cycle count is zero")]
    Division,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Self::Parse(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
