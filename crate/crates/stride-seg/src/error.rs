use thiserror::Error;

#[derive(Debug, Error)]
pub enum SegError {
    #[error("stride of {len} samples exceeds the {window}-sample window")]
    StrideTooLong { len: usize, window: usize },

    #[error("stride interval [{start}, {end}) out of bounds for trial of {len} samples")]
    IntervalOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("window cache corrupt: {0}")]
    CorruptCache(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl SegError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        SegError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
