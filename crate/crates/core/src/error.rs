use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("{op}: dimension mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix data length {len} does not match {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },

    #[error("{op}: non-finite value at ({row},{col})")]
    NonFinite { op: &'static str, row: usize, col: usize },

    #[error("{op}: index {index} out of bounds for {bound}")]
    IndexOutOfBounds { op: &'static str, index: usize, bound: usize },

    #[error("backward: node {0} is not a 1x1 scalar")]
    NonScalarLoss(usize),

    #[error("tape replay diverged at node {0}")]
    ReplayDiverged(usize),

    #[error("duplicate parameter name '{0}'")]
    DuplicateParam(String),

    #[error("unknown parameter '{0}'")]
    UnknownParam(String),

    #[error("parameter '{name}': expected shape {expected_rows}x{expected_cols}, got {got_rows}x{got_cols}")]
    ParamShape {
        name: String,
        expected_rows: usize,
        expected_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },

    #[error("parameter sets disagree: expected '{expected}' at slot {slot}, got '{got}'")]
    ParamOrder { slot: usize, expected: String, got: String },

    #[error("NaN gradient in parameter '{0}'; training aborted")]
    NanGradient(String),

    #[error("loss function is non-deterministic: {first} vs {second} on identical inputs")]
    NonDeterministic { first: String, second: String },

    #[error("loss evaluation failed: {0}")]
    LossEval(String),

    #[error("unsupported checkpoint version {found} (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
