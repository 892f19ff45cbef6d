use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("master list line {line}: duplicate title {title:?} (first seen on line {first_line})")]
    DuplicateTitle {
        line: usize,
        first_line: usize,
        title: String,
    },

    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },

    #[error("rule {rule_id}: {reason}")]
    Rule { rule_id: String, reason: String },

    #[error("rule set: {0}")]
    RuleSet(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Ground truth or intermediate data is internally inconsistent.
    #[error("data integrity: {0}")]
    Integrity(String),

    #[error("katz iteration did not converge within {max_iter} iterations (attenuation {attenuation})")]
    KatzDivergence { attenuation: f64, max_iter: usize },

    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
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

    /// True for errors caused by inconsistent data rather than config or IO.
    pub fn is_data_integrity(&self) -> bool {
        matches!(
            self,
            Error::Integrity(_) | Error::DuplicateTitle { .. } | Error::Manifest { .. }
        )
    }
}
