use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Setting indices carried in error values are 1-based, matching how
/// settings are labelled in printed tables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("setting index {index} out of range 1..={max} for {party}")]
    IndexOutOfRange {
        party: &'static str,
        index: usize,
        max: usize,
    },

    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("distribution is signaling: marginal discrepancy {max_discrepancy:e} exceeds tolerance {tol:e}")]
    Signaling { max_discrepancy: f64, tol: f64 },

    #[error("distribution not normalized at setting pair ({x}, {y}): total {total}")]
    Normalization { x: usize, y: usize, total: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("simplex did not converge within {pivots} pivots")]
    NonConvergence { pivots: usize },

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("solver returned a point violating constraint {constraint} by {violation:e}")]
    InfeasiblePoint { constraint: String, violation: f64 },

    #[error("resource guard exceeded: {0}")]
    Guard(String),

    #[error("unexpected LP status {0} for a problem that must have an optimum")]
    UnexpectedStatus(&'static str),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
