use thiserror::Error;

/// Errors raised by optimizers, estimators and the finite element layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value at component {index}")]
    NumericalFault { index: usize },

    #[error("invalid configuration: {0}")]
    ConfigFault(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionFault { expected: usize, found: usize },

    #[error("value outside its domain: {0}")]
    DomainFault(String),

    #[error("control-variate coefficient is degenerate (control variance {control_var:e})")]
    DegenerateAlpha { control_var: f64 },

    #[error("covariance matrix is singular or ill-conditioned (condition {condition:e})")]
    SingularCovariance { condition: f64 },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e}){}", fmt_xi(.xi))]
    SolverDivergence {
        iterations: usize,
        residual: f64,
        xi: Option<Vec<f64>>,
    },

    #[error("stiffness matrix is singular (pivot {pivot} non-positive); boundary conditions do not remove rigid modes")]
    SingularSystem { pivot: usize },

    #[error("eigen-decomposition failed: {0}")]
    EigenFailure(String),

    #[error("need at least {needed} data points, found {found}")]
    InsufficientData { needed: usize, found: usize },
}

fn fmt_xi(xi: &Option<Vec<f64>>) -> String {
    match xi {
        Some(v) => format!(" at xi = {v:?}"),
        None => String::new(),
    }
}

impl Error {
    /// Attaches the offending realization to a solver failure.
    pub fn with_xi(self, realization: &[f64]) -> Self {
        match self {
            Error::SolverDivergence {
                iterations,
                residual,
                ..
            } => Error::SolverDivergence {
                iterations,
                residual,
                xi: Some(realization.to_vec()),
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionFault { expected, found })
    }
}
