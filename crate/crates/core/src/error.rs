use thiserror::Error;

/// Errors surfaced by class construction, configuration, and evaluators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid class: {0}")]
    InvalidClass(String),

    #[error("class admits no member: {0}")]
    EmptyClass(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("{0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of a single sensing query.
///
/// `BudgetExhausted` is a control signal, not a bug: procedures running
/// against a hard energy cap must catch it and finalize from the decisions
/// made so far.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("sensing energy budget exhausted")]
    BudgetExhausted,

    #[error("sense vector index {0} outside 1..={1}")]
    IndexOutOfRange(usize, usize),
}
