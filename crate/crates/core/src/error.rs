use thiserror::Error;

pub type Result<T> = std::result::Result<T, OrwError>;

#[derive(Debug, Error)]
pub enum OrwError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {needed} cells requested, budget is {budget}")]
    Capacity { needed: usize, budget: usize },

    #[error("no convergence in {what} after {terms} terms (last estimate {estimate:e})")]
    Convergence {
        what: &'static str,
        terms: usize,
        estimate: f64,
    },

    #[error("series division left a remainder: {0}")]
    Singularity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl OrwError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        OrwError::Domain(msg.into())
    }
}
