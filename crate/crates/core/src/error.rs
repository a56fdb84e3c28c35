use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("block index {index} out of range for {count} blocks")]
    BlockIndexOutOfRange { index: usize, count: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid run setup: {0}")]
    InvalidRun(String),

    #[error("history underflow at t={t}: requested snapshot from τ={tau} with delay bound {delay_bound}")]
    HistoryUnderflow { t: usize, tau: usize, delay_bound: usize },

    #[error("numerical divergence at t={t}: |f| = {value:.3e} exceeds {limit:.1e}; reduce the stepsize")]
    Divergence { t: usize, value: f64, limit: f64 },

    #[error("optimal value unknown: {0}")]
    OptimalValueUnknown(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error ({key}): {message}")]
    Config { key: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
