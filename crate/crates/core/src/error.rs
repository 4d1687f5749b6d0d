use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        /// 1-based data row (0 means the header).
        row: usize,
        column: String,
        message: String,
    },

    #[error("split error: {0}")]
    Split(String),

    #[error("unknown simulation setting {0} (expected 1..=7)")]
    UnknownSetting(u32),

    #[error("underdetermined problem: {rows} rows for {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("out-of-bag estimate unavailable: every row is in-bag for every tree")]
    OobUnavailable,

    #[error("degenerate truth: the {0} component has zero variance on the test set")]
    DegenerateTruth(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
