use thiserror::Error;

/// Errors produced by domain-type construction and metric computation.
#[derive(Debug, Error)]
pub enum GaitError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: {predictions} predictions vs {truths} truths")]
    LengthMismatch { predictions: usize, truths: usize },

    #[error("{what}: need at least {need} values, got {got}")]
    TooFewValues {
        what: &'static str,
        need: usize,
        got: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid trial: {0}")]
    InvalidTrial(String),

    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
}
