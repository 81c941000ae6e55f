use thiserror::Error;

/// Errors raised by the exact and floating-point decomposition routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("stage requires singular input")]
    NonsingularStage,

    #[error("nothing to reduce: the E block is empty (m2 = 0)")]
    NothingToReduce,

    #[error("invalid m-sequence: {0}")]
    InvalidMSequence(String),

    #[error("not nilpotent")]
    NotNilpotent,

    #[error("block size {0} is too small")]
    BlockSizeTooSmall(usize),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("singular value decomposition failed: {0}")]
    Svd(String),

    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("{0}")]
    Json(String),

    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
