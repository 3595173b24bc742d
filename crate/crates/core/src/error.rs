use thiserror::Error;

pub type Result<T, E = QmsaError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QmsaError {
    /// The sequence set breaks one of its structural rules (too few strings,
    /// empty string, non-unique longest string).
    #[error("invalid sequence set: {0}")]
    InvalidSequences(String),

    #[error("symbol {0:?} is not in the alphabet {{A, C, G, T}}")]
    InvalidSymbol(char),

    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} of {requested} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: String,
        cap: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("objective returned a non-finite value at {0:?}")]
    NonFiniteObjective(Vec<f64>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QmsaError {
    pub(crate) fn mismatch(expected: usize, actual: usize) -> Self {
        QmsaError::DimensionMismatch { expected, actual }
    }
}
