//! Builds the oracle named in a configuration.

use std::sync::Arc;

use bifidelity::problems::{PolyRegressionProblem, QuadraticTestProblem, TopOptProblem, TopOptSpec};
use bifidelity::sgd::{Constraint, DesignVector, PenalizedOracle, PenaltySpec, RandomRealization};
use bifidelity::uncertainty::{CovarianceSpec, KlCache};
use bifidelity::BiFidelityOracle;

use crate::config::{ProblemSettings, Settings, TopOptSettings};
use crate::error::HarnessError;

pub type DynOracle = Arc<dyn BiFidelityOracle<f64>>;

/// An oracle with its starting point and, when known, its minimizer.
pub struct BuiltProblem {
    pub oracle: DynOracle,
    pub theta0: DesignVector<f64>,
    pub theta_star: Option<Vec<f64>>,
    pub topopt: Option<Arc<TopOptProblem<f64>>>,
}

/// `mass_ratio(θ) − limit ≤ 0`.
struct MassLimit {
    problem: Arc<TopOptProblem<f64>>,
    limit: f64,
    gradient: Vec<f64>,
}

impl Constraint<f64> for MassLimit {
    fn value(&self, theta: &[f64], _: &RandomRealization<f64>) -> f64 {
        self.problem.mass_ratio(theta).unwrap_or(f64::NAN) - self.limit
    }

    fn gradient(&self, _: &[f64], _: &RandomRealization<f64>) -> Vec<f64> {
        self.gradient.clone()
    }
}

pub fn topopt_spec(s: &TopOptSettings) -> TopOptSpec<f64> {
    TopOptSpec {
        nelx: s.nelx,
        nely: s.nely,
        lambda: s.lambda,
        gamma: s.gamma,
        theta_min: s.theta_min,
        theta0: s.theta0,
        kl_modes: s.kl_modes,
        solver: s.solver,
        ..TopOptSpec::new(s.variant)
    }
}

fn build_topopt(s: &TopOptSettings) -> Result<BuiltProblem, HarnessError> {
    let spec = topopt_spec(s);
    let ctx = "building topology problem";
    let problem = match &s.kl_cache {
        Some(dir) if s.variant == bifidelity::problems::TopOptVariant::C => {
            let l = spec.correlation_length();
            let cov = CovarianceSpec::new(spec.kl_sigma, l, l).map_err(HarnessError::core(ctx))?;
            let kl = KlCache::new(dir)
                .load_or_build(&cov, s.nelx, s.nely, 1.0, s.kl_modes)
                .map_err(HarnessError::core(ctx))?;
            TopOptProblem::with_kl(spec, Some(kl))
        }
        _ => TopOptProblem::new(spec),
    }
    .map_err(HarnessError::core(ctx))?;
    let problem = Arc::new(problem);
    let theta0 = problem.initial_design().map_err(HarnessError::core(ctx))?;
    let oracle: DynOracle = if s.kappa > 0.0 {
        let c = MassLimit {
            problem: problem.clone(),
            limit: s.mass_limit,
            gradient: problem.mass_ratio_gradient().map_err(HarnessError::core(ctx))?,
        };
        let penalty = PenaltySpec::new(vec![s.kappa], vec![Box::new(c)]).map_err(HarnessError::core(ctx))?;
        Arc::new(PenalizedOracle {
            inner: problem.clone(),
            penalty,
        })
    } else {
        problem.clone()
    };
    Ok(BuiltProblem {
        oracle,
        theta0,
        theta_star: None,
        topopt: Some(problem),
    })
}

pub fn build(settings: &Settings) -> Result<BuiltProblem, HarnessError> {
    match &settings.problem {
        ProblemSettings::Example1(s) => {
            let ctx = "building example1";
            let p = PolyRegressionProblem::generate(s.data_seed, s.n_obs, s.gamma).map_err(HarnessError::core(ctx))?;
            let star = p.least_squares().map_err(HarnessError::core(ctx))?;
            Ok(BuiltProblem {
                oracle: Arc::new(p),
                theta0: DesignVector::new(bifidelity::problems::INITIAL_GUESS.to_vec()),
                theta_star: Some(star),
                topopt: None,
            })
        }
        ProblemSettings::Quadratic(s) => {
            let ctx = "building quadratic";
            let p = QuadraticTestProblem::new(s.dim, s.mu, s.l)
                .and_then(|p| p.with_noise(s.noise))
                .and_then(|p| p.with_low(s.low_scale, s.low_bias, s.rho))
                .map_err(HarnessError::core(ctx))?
                .with_gamma(s.gamma);
            let star = p.theta_star().to_vec();
            let theta0 = DesignVector::new(star.iter().map(|t| t + 3.0).collect());
            Ok(BuiltProblem {
                oracle: Arc::new(p),
                theta0,
                theta_star: Some(star),
                topopt: None,
            })
        }
        ProblemSettings::TopOpt(s) => build_topopt(s),
    }
}
