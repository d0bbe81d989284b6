use stairlam_core::CoreError;
use stairlam_laminate::LaminateError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StairError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Laminate(#[from] LaminateError),
    #[error("series for index {i} did not settle within {terms} terms")]
    NonConvergence { i: usize, terms: usize },
    #[error("tail exponent {0} does not give a summable series")]
    NotSummable(f64),
    #[error("table output failed: {0}")]
    Io(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
