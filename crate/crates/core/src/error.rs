use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("iteration budget of {iterations} exhausted (last iterate {last_value}, residual {residual:e})")]
    MaxIterExceeded {
        iterations: usize,
        last_value: f64,
        residual: f64,
    },

    #[error("no sign change of F found on the scan grid (lambda = {lambda}, beta = {beta})")]
    BracketNotFound { lambda: f64, beta: f64 },

    #[error("tolerance {tol:e} not reached: best value {best} with error estimate {estimate:e}")]
    ToleranceNotReached { best: f64, estimate: f64, tol: f64 },

    #[error("iterate underflowed to zero at x = {x:e}")]
    Underflow { x: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
