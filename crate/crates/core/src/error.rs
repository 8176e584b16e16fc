//! Error type shared across the core modules.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: malformed JSON: {source}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error("instance {id}: {reason}")]
    SchemaViolation { id: String, reason: String },

    #[error("dataset contains no instances")]
    EmptyDataset,

    #[error("method unavailable for this record: instance {id} missing {missing}")]
    MethodUnavailable { id: String, missing: &'static str },

    #[error("empty answer span: instance {id} has no token overlapping the answer span")]
    EmptyAnswerSpan { id: String },

    #[error("confidence {value} outside [0, 1]")]
    ConfidenceOutOfRange { value: f64 },

    #[error("empty prediction list")]
    EmptyPredictions,

    #[error("subsample n={n} out of range for instance {id} with {available} samples")]
    SubsampleOutOfRange {
        id: String,
        n: usize,
        available: usize,
    },
}
