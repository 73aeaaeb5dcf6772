use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("gamma function pole at {0}")]
    Pole(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("failed to converge: {0}")]
    NonConvergence(String),
    #[error("catastrophic cancellation: {0}")]
    Cancellation(String),
    #[error("root not bracketed: {0}")]
    Bracket(String),
    #[error("step budget exceeded: {requested:.3e} steps requested, budget is {budget:.3e}")]
    Budget { requested: f64, budget: f64 },
    #[error("no surviving paths in ensemble (need at least {needed}, have {have})")]
    NoSurvivors { needed: usize, have: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
