use thiserror::Error;

/// Errors raised by field construction, topology and integration routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("excursion not compactly contained: occupied cell on the grid boundary at level {level}")]
    ExcursionNotContained { level: f64 },

    #[error("degenerate critical point at ({x}, {y}): |det H| = {det:e}")]
    DegenerateCriticalPoint { x: f64, y: f64, det: f64 },

    #[error("critical level: u = {level} lies within {tol:e} of critical value {value}")]
    CriticalLevel { level: f64, value: f64, tol: f64 },

    #[error("{what} not converged: relative change {change:e} exceeds {limit:e}")]
    NotConverged { what: &'static str, change: f64, limit: f64 },

    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
