use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading inputs, validating them or running sessions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest parse error: {0}")]
    ManifestParse(#[from] serde_json::Error),

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("trace parse error at row {row}: {message}")]
    TraceParse { row: usize, message: String },

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("epoch {epoch} is beyond the horizon of {horizon} segments")]
    BeyondHorizon { epoch: usize, horizon: usize },

    #[error("quality index {index} out of range for {levels} levels")]
    QualityOutOfRange { index: usize, levels: usize },

    #[error("benchmark solver failed: {0}")]
    Solver(String),

    #[error("session {method} on {trace} failed: {source}")]
    Session {
        method: String,
        trace: String,
        #[source]
        source: Box<Error>,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
