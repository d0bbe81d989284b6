use thiserror::Error;

/// Failures of the scalar and parameter routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("|(x, w)|^(p-2) is singular at the origin for p = {p} < 2")]
    SingularOrigin { p: f64 },
    #[error("g_w inverse did not converge for y = {y}, w = {w}, p = {p}")]
    NoConvergence { y: f64, w: f64, p: f64 },
    #[error("no admissible c for p = {p}: {reason}")]
    NoAdmissibleC { p: f64, reason: String },
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
}
