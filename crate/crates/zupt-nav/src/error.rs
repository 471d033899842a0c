use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZuptError {
    #[error("trial too short: {len} samples, detector window needs {window}")]
    TrialTooShort { len: usize, window: usize },

    #[error("no stationary segment at trial start")]
    NoInitialStance,

    #[error("length mismatch: trial {trial}, {what} {got}")]
    LengthMismatch {
        trial: usize,
        what: &'static str,
        got: usize,
    },

    #[error("interval [{start}, {end}) out of bounds for trial of {len} samples")]
    IntervalOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
