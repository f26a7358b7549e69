//! JSON experiment configuration and its validation.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use bifidelity::problems::TopOptVariant;
use bifidelity::sgd::{AlphaMode, AnchorMode};
use bifidelity::fem::LinearSolver;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown problem '{0}' (expected example1, topopt-a, topopt-b, topopt-c or quadratic)")]
    UnknownProblem(String),
    #[error("unknown algorithm '{0}' (expected sgd, sag, bfsag, svrg or bfsvrg)")]
    UnknownAlgorithm(String),
    #[error("parameter '{0}' is not used by this problem/algorithm combination")]
    UnknownParam(String),
    #[error("parameter '{key}': {reason}")]
    InvalidParam { key: String, reason: String },
}

/// Raw configuration file contents.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: String,
    pub algorithm: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Example1,
    TopOpt(TopOptVariant),
    Quadratic,
}

impl ProblemKind {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        Ok(match name {
            "example1" => ProblemKind::Example1,
            "topopt-a" => ProblemKind::TopOpt(TopOptVariant::A),
            "topopt-b" => ProblemKind::TopOpt(TopOptVariant::B),
            "topopt-c" => ProblemKind::TopOpt(TopOptVariant::C),
            "quadratic" => ProblemKind::Quadratic,
            other => return Err(ConfigError::UnknownProblem(other.into())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    Sgd,
    Sag,
    BfSag,
    Svrg,
    BfSvrg,
}

impl AlgorithmKind {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        Ok(match name {
            "sgd" => AlgorithmKind::Sgd,
            "sag" => AlgorithmKind::Sag,
            "bfsag" => AlgorithmKind::BfSag,
            "svrg" => AlgorithmKind::Svrg,
            "bfsvrg" => AlgorithmKind::BfSvrg,
            other => return Err(ConfigError::UnknownAlgorithm(other.into())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolySettings {
    pub n_obs: usize,
    pub gamma: f64,
    pub data_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSettings {
    pub dim: usize,
    pub mu: f64,
    pub l: f64,
    pub noise: f64,
    pub low_scale: f64,
    pub low_bias: f64,
    pub rho: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopOptSettings {
    pub variant: TopOptVariant,
    pub nelx: usize,
    pub nely: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub theta_min: f64,
    pub theta0: f64,
    pub kl_modes: usize,
    pub kl_cache: Option<PathBuf>,
    pub solver: LinearSolver,
    pub kappa: f64,
    pub mass_limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSettings {
    Example1(PolySettings),
    Quadratic(QuadraticSettings),
    TopOpt(TopOptSettings),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmSettings {
    pub kind: AlgorithmKind,
    pub eta: f64,
    /// Iterations for SGD/SAG/BF-SAG, outer iterations for SVRG/BF-SVRG.
    pub iters: usize,
    pub n: usize,
    pub n_l: usize,
    pub n_h: usize,
    pub inner: usize,
    pub batch: usize,
    pub alpha_mode: AlphaMode,
    pub anchor: AnchorMode,
}

impl AlgorithmSettings {
    /// Records a run produces (one per iteration or inner step).
    pub fn steps(&self) -> usize {
        match self.kind {
            AlgorithmKind::Svrg | AlgorithmKind::BfSvrg => self.iters * self.inner,
            _ => self.iters,
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub problem_name: String,
    pub algorithm_name: String,
    pub problem: ProblemSettings,
    pub algorithm: AlgorithmSettings,
    pub seed: u64,
    pub output: PathBuf,
    /// Held-out realizations for objective reporting.
    pub validation: usize,
    pub record_every: usize,
    pub runs: usize,
}

/// Typed access to the flat parameter map that remembers which keys were read.
struct Params<'a> {
    map: &'a BTreeMap<String, Value>,
    used: RefCell<BTreeSet<&'a str>>,
}

impl<'a> Params<'a> {
    fn new(map: &'a BTreeMap<String, Value>) -> Self {
        Self {
            map,
            used: RefCell::new(BTreeSet::new()),
        }
    }

    fn raw(&self, key: &'static str) -> Option<&'a Value> {
        let (k, v) = self.map.get_key_value(key)?;
        self.used.borrow_mut().insert(k.as_str());
        Some(v)
    }

    fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::InvalidParam {
            key: key.into(),
            reason: reason.into(),
        }
    }

    fn f64(&self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Self::invalid(key, format!("expected a finite number, found {v}"))),
        }
    }

    fn count(&self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Self::invalid(key, format!("expected a non-negative integer, found {v}"))),
        }
    }

    fn str(&self, key: &'static str) -> Result<Option<&'a str>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| Self::invalid(key, format!("expected a string, found {v}"))),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        let used = self.used.into_inner();
        match self.map.keys().find(|k| !used.contains(k.as_str())) {
            Some(k) => Err(ConfigError::UnknownParam(k.clone())),
            None => Ok(()),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Params::invalid(key, format!("must be > 0, found {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(Params::invalid(key, format!("must be >= 0, found {v}")))
    }
}

fn at_least_one(key: &str, v: usize) -> Result<usize, ConfigError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(Params::invalid(key, "must be at least 1"))
    }
}

impl Settings {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, ConfigError> {
        let kind = ProblemKind::parse(&cfg.problem)?;
        let alg = AlgorithmKind::parse(&cfg.algorithm)?;
        let p = Params::new(&cfg.params);

        let problem = match kind {
            ProblemKind::Example1 => ProblemSettings::Example1(PolySettings {
                n_obs: at_least_one("n_obs", p.count("n_obs", 1000)?)?,
                gamma: non_negative("gamma", p.f64("gamma", 0.2)?)?,
                data_seed: p.count("data_seed", 0)? as u64,
            }),
            ProblemKind::Quadratic => {
                let q = QuadraticSettings {
                    dim: at_least_one("dim", p.count("dim", 2)?)?,
                    mu: positive("mu", p.f64("mu", 1.0)?)?,
                    l: positive("l", p.f64("l", 2.0)?)?,
                    noise: non_negative("noise", p.f64("noise", 0.5)?)?,
                    low_scale: p.f64("low_scale", 1.0)?,
                    low_bias: p.f64("low_bias", 0.0)?,
                    rho: p.f64("rho", 1.0)?,
                    gamma: non_negative("gamma", p.f64("gamma", 0.1)?)?,
                };
                if q.l < q.mu {
                    return Err(Params::invalid("l", format!("must be >= mu = {}", q.mu)));
                }
                if q.rho.abs() > 1.0 {
                    return Err(Params::invalid("rho", "must lie in [-1, 1]"));
                }
                ProblemSettings::Quadratic(q)
            }
            ProblemKind::TopOpt(variant) => {
                let nelx = p.count("nelx", 120)?;
                let nely = p.count("nely", 40)?;
                if nelx < 2 || nely < 2 || nelx % 2 != 0 || nely % 2 != 0 {
                    return Err(Params::invalid("nelx", format!("fine mesh {nelx}x{nely} must have even sides >= 2")));
                }
                let solver = match p.str("solver")?.unwrap_or("cholesky") {
                    "cholesky" => LinearSolver::Cholesky,
                    "pcg" => LinearSolver::pcg(),
                    other => return Err(Params::invalid("solver", format!("expected cholesky or pcg, found '{other}'"))),
                };
                let theta_min = p.f64("theta_min", 1e-3)?;
                if !(theta_min > 0.0 && theta_min < 1.0) {
                    return Err(Params::invalid("theta_min", "must lie in (0, 1)"));
                }
                let theta0 = p.f64("theta0", 0.5)?;
                if !(theta0 >= theta_min && theta0 <= 1.0) {
                    return Err(Params::invalid("theta0", "must lie in [theta_min, 1]"));
                }
                let kl_modes = match variant {
                    TopOptVariant::C => at_least_one("kl_modes", p.count("kl_modes", 100)?)?,
                    _ => 100,
                };
                let kl_cache = match variant {
                    TopOptVariant::C => p.str("kl_cache")?.map(PathBuf::from),
                    _ => None,
                };
                ProblemSettings::TopOpt(TopOptSettings {
                    variant,
                    nelx,
                    nely,
                    lambda: non_negative("lambda", p.f64("lambda", variant.default_lambda())?)?,
                    gamma: non_negative("gamma", p.f64("gamma", 0.096)?)?,
                    theta_min,
                    theta0,
                    kl_modes,
                    kl_cache,
                    solver,
                    kappa: non_negative("kappa", p.f64("kappa", 0.0)?)?,
                    mass_limit: p.f64("mass_limit", 1.0)?,
                })
            }
        };

        let default_eta = match kind {
            ProblemKind::Example1 => 0.25,
            ProblemKind::TopOpt(_) => 0.05,
            ProblemKind::Quadratic => 0.1,
        };
        let default_n = match &problem {
            ProblemSettings::Example1(s) => s.n_obs,
            _ => 100,
        };
        let eta = positive("eta", p.f64("eta", default_eta)?)?;
        let iters = at_least_one("iters", p.count("iters", 100)?)?;
        let mut a = AlgorithmSettings {
            kind: alg,
            eta,
            iters,
            n: default_n,
            n_l: 0,
            n_h: 1,
            inner: 1,
            batch: 1,
            alpha_mode: AlphaMode::Diagonal,
            anchor: AnchorMode::Sampled,
        };
        match alg {
            AlgorithmKind::Sgd => {
                a.batch = at_least_one("batch", p.count("batch", 1)?)?;
            }
            AlgorithmKind::Sag | AlgorithmKind::BfSag => {
                a.n = at_least_one("n", p.count("n", default_n)?)?;
                a.n_h = at_least_one("n_h", p.count("n_h", 5)?)?;
                if alg == AlgorithmKind::BfSag {
                    a.n_l = at_least_one("n_l", p.count("n_l", 20)?)?;
                }
                if a.n_l + a.n_h > a.n {
                    return Err(Params::invalid("n", format!("N = {} is smaller than N_l + N_h = {}", a.n, a.n_l + a.n_h)));
                }
            }
            AlgorithmKind::Svrg => {
                a.inner = at_least_one("m", p.count("m", 5)?)?;
                a.n_h = at_least_one("n_h", p.count("n_h", 20)?)?;
                a.batch = at_least_one("batch", p.count("batch", 1)?)?;
                if a.batch > a.n_h {
                    return Err(Params::invalid("batch", format!("must not exceed n_h = {}", a.n_h)));
                }
            }
            AlgorithmKind::BfSvrg => {
                a.inner = at_least_one("m", p.count("m", 5)?)?;
                a.n_h = at_least_one("n_h", p.count("n_h", 5)?)?;
                a.n_l = at_least_one("n_l", p.count("n_l", 20)?)?;
                a.alpha_mode = match p.str("alpha_mode")?.unwrap_or("diagonal") {
                    "identity" => AlphaMode::Identity,
                    "diagonal" => AlphaMode::Diagonal,
                    "corrected" => AlphaMode::DiagonalCorrected,
                    other => {
                        return Err(Params::invalid(
                            "alpha_mode",
                            format!("expected identity, diagonal or corrected, found '{other}'"),
                        ))
                    }
                };
                a.anchor = match p.str("anchor")?.unwrap_or("sampled") {
                    "sampled" => AnchorMode::Sampled,
                    "exact" => AnchorMode::Exact,
                    other => return Err(Params::invalid("anchor", format!("expected sampled or exact, found '{other}'"))),
                };
                if a.anchor == AnchorMode::Exact && !matches!(problem, ProblemSettings::Quadratic(_) | ProblemSettings::Example1(_)) {
                    return Err(Params::invalid("anchor", "an exact anchor needs a closed-form mean gradient"));
                }
            }
        }
        let validation = at_least_one("validation", p.count("validation", 256)?)?;
        let record_every = at_least_one("record_every", p.count("record_every", 1)?)?;
        let runs = at_least_one("runs", p.count("runs", 2)?)?;
        p.finish()?;

        Ok(Settings {
            problem_name: cfg.problem.clone(),
            algorithm_name: cfg.algorithm.clone(),
            problem,
            algorithm: a,
            seed: cfg.seed,
            output: cfg.output.clone().unwrap_or_else(|| PathBuf::from("out")),
            validation,
            record_every,
            runs,
        })
    }
}
