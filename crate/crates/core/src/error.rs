use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {0} lies outside the angular domain")]
    OffDomain(String),

    #[error("cannot project the zero vector onto the sphere")]
    ZeroVector,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("Newton solver hit the iteration limit ({iterations}) with scaled residual {residual:e}")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("line search stalled after {iterations} iterations with scaled residual {residual:e}")]
    LineSearchStalled { iterations: usize, residual: f64 },

    #[error("entropy domain violated at quadrature node {node} (b^T alpha = {value:e})")]
    DomainViolation { node: usize, value: f64 },

    #[error("Hessian is singular after regularization")]
    SingularHessian,

    #[error("quadrature rule violates the node hypothesis: {0}")]
    RuleHypothesis(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for the failure modes of the dual Newton solver.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::MaxIterations { .. }
                | Error::LineSearchStalled { .. }
                | Error::DomainViolation { .. }
                | Error::SingularHessian
        )
    }
}
