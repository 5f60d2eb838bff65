//! Error types shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: file contains no interactions")]
    EmptyInput { path: PathBuf },

    #[error("p-core filtering with p={p} removed every interaction (dataset vanished)")]
    DatasetVanished { p: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("popularity group `{group}` has an empty denominator")]
    EmptyGroup { group: String },

    #[error("missing leaderboard cell: algorithm `{algorithm}` in vote ({dataset}, {metric})")]
    MissingCell {
        algorithm: String,
        dataset: String,
        metric: String,
    },

    #[error("all {trials} tuning trials failed:\n{diagnostics}")]
    TuningFailed { trials: usize, diagnostics: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
