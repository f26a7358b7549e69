use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: bifidelity::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    pub fn core(context: impl Into<String>) -> impl FnOnce(bifidelity::Error) -> Self {
        let context = context.into();
        move |source| HarnessError::Core { context, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    /// 2 configuration, 3 numerical fault, 4 solver divergence, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        use bifidelity::Error as E;
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core { source, .. } => match source {
                E::ConfigFault(_) | E::DomainFault(_) | E::DimensionFault { .. } => 2,
                E::SolverDivergence { .. } | E::SingularSystem { .. } => 4,
                E::NumericalFault { .. }
                | E::DegenerateAlpha { .. }
                | E::SingularCovariance { .. }
                | E::EigenFailure(_)
                | E::InsufficientData { .. } => 3,
            },
            HarnessError::Io { .. } => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let c = |e| HarnessError::core("x")(e).exit_code();
        assert_eq!(c(bifidelity::Error::NumericalFault { index: 0 }), 3);
        assert_eq!(
            c(bifidelity::Error::SolverDivergence {
                iterations: 1,
                residual: 1.0,
                xi: None
            }),
            4
        );
        assert_eq!(c(bifidelity::Error::ConfigFault("n".into())), 2);
        assert_eq!(HarnessError::Config(ConfigError::UnknownProblem("p".into())).exit_code(), 2);
    }
}
