use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Core(#[from] gait_core::GaitError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl SynthError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        SynthError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
