use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("model error: {0}")]
    Model(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("reformulation error: {0}")]
    Reformulation(String),

    #[error("exhaustive enumeration refused: {vars} variables exceeds the limit of {limit}")]
    ExhaustionBound { vars: usize, limit: usize },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("{count} record(s) have stated energies inconsistent with the model")]
    EnergyMismatch { count: usize },

    #[error("mismatched models: {0}")]
    Mismatch(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
