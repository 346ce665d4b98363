use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed JSON: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// Manifest content that parses but violates an invariant.
    #[error("{}: {field}: {message}", path.display())]
    Manifest {
        path: PathBuf,
        field: String,
        message: String,
    },

    /// Matrix file content errors: ragged rows, bad cells, size mismatches.
    #[error("{}: {message}", path.display())]
    MatrixFile { path: PathBuf, message: String },

    #[error("{}: {message}", path.display())]
    TaxonomyFile { path: PathBuf, message: String },

    #[error("hypernym cycle involving {0}")]
    Cycle(String),

    #[error("dangling hypernym: {child} lists unknown parent {parent}")]
    DanglingParent { child: String, parent: String },

    #[error("unknown synset {0}")]
    UnknownSynset(String),

    #[error("classes without synset_id: {}", .0.join(", "))]
    MissingSynsets(Vec<String>),

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("non-finite value at row {row}, col {col}")]
    NonFinite { row: usize, col: usize },

    #[error("zero-norm row for class {0}")]
    ZeroNorm(usize),

    #[error("negative count at row {row}, col {col}")]
    NegativeCount { row: usize, col: usize },

    /// Inputs that are well-formed but outside an operation's domain.
    #[error("{0}")]
    Domain(String),

    /// Wraps an error with the epoch it occurred in.
    #[error("epoch {epoch}: {source}")]
    Epoch {
        epoch: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn matrix_file(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::MatrixFile {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn in_epoch(self, epoch: u64) -> Self {
        Error::Epoch {
            epoch,
            source: Box::new(self),
        }
    }
}
