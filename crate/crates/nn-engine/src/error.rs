use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("shape mismatch for tensor '{tensor}': expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        tensor: String,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("bad input batch: {0}")]
    BadBatch(String),

    #[error("empty training set")]
    EmptyTrainSet,

    #[error("model file corrupt: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl NnError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        NnError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
