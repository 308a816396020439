use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty toponym")]
    EmptyToponym,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty sequence")]
    EmptySequence,

    #[error("no phonetic features")]
    NoPhoneticFeatures,

    #[error("empty pool")]
    EmptyPool,

    #[error("empty store")]
    EmptyStore,

    #[error("empty testset")]
    EmptyTestset,

    #[error("no training examples left after filtering")]
    EmptyTrainingSet,

    #[error("teacher checkpoint required")]
    TeacherCheckpointRequired,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid dimensions: {0}")]
    Dimensions(String),

    #[error("vector {id} is not unit-norm (norm {norm})")]
    NotUnitNorm { id: u64, norm: f32 },

    #[error("duplicate id {0}")]
    DuplicateId(u64),

    #[error("{what}: unsupported format version {found} (expected {expected})")]
    VersionMismatch {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("{what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error("hash mismatch: {what} expects {expected}, found {found}")]
    HashMismatch {
        what: &'static str,
        expected: String,
        found: String,
    },

    #[error("missing artifact {}: run `{stage}` first", path.display())]
    MissingArtifact { path: PathBuf, stage: &'static str },

    #[error("empty path")]
    EmptyPath,

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            what,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's inputs rather than a bug.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Dimensions(_))
    }
}
