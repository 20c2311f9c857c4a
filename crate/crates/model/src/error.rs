use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    BadConfig(String),

    #[error("k = {k} exceeds the {available} available symptoms")]
    TooFewSymptoms { k: usize, available: usize },

    #[error("NaN loss at epoch {epoch}, batch {batch}; training aborted")]
    NanLoss { epoch: usize, batch: usize },

    #[error("anchor {anchor} lacks {d1} days of history")]
    InsufficientHistory { anchor: usize, d1: usize },

    #[error("window anchored at {anchor} does not fit the prepared series of {len} days")]
    BadAnchor { anchor: usize, len: usize },

    #[error("checkpoint and sidecar disagree: {0}")]
    InconsistentStore(String),

    #[error(transparent)]
    Core(#[from] epiwave_core::CoreError),

    #[error(transparent)]
    Wmn(#[from] epiwave_wmn::WmnError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
