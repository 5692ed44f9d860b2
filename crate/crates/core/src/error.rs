use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Vector lengths or grid dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Inputs violate a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two sampled objects live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// A dyadic parameter search exhausted its budget.
    #[error("solver failure: {0}")]
    SolverFailure(String),
    /// The requested kernel/dimension combination is not implemented.
    #[error("unsupported operator: {0}")]
    Unsupported(String),
    /// A scenario file failed schema validation.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    /// A postcondition that the underlying mathematics guarantees failed to
    /// verify; indicates a bug rather than bad input.
    #[error("internal verification failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
