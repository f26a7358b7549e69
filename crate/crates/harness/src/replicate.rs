//! Multi-seed replication and relative-error aggregation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bifidelity::fem::format_sig;
use bifidelity::sgd::{measure_linear_rate, RunContext};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AlgorithmKind, Settings};
use crate::error::HarnessError;
use crate::problem::{build, BuiltProblem};
use crate::run::{optimize, write, RateSummary};

pub const AGGREGATE_HEADER: &str = "iter,mean_rel_err,std_rel_err";

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceSource {
    ClosedForm,
    ReferenceRun,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Aggregate {
    pub runs: usize,
    pub reference: ReferenceSource,
    /// `(iteration, mean, standard deviation)` of `‖θ_k − θ*‖/‖θ*‖`, from 1.
    #[serde(skip)]
    pub rows: Vec<(usize, f64, f64)>,
    pub rate: Option<RateSummary>,
    pub final_mean_rel_err: f64,
}

/// The long reference run: ten times the iterations, four times the batch.
pub fn reference_settings(settings: &Settings) -> Settings {
    let mut s = settings.clone();
    let a = &mut s.algorithm;
    a.iters *= 10;
    a.n_h *= 4;
    a.n_l *= 4;
    a.batch *= 4;
    if matches!(a.kind, AlgorithmKind::Sag | AlgorithmKind::BfSag) {
        a.n = a.n.max(a.n_l + a.n_h);
    }
    s
}

fn reference(settings: &Settings, problem: &BuiltProblem) -> Result<(Vec<f64>, ReferenceSource), HarnessError> {
    if let Some(star) = &problem.theta_star {
        return Ok((star.clone(), ReferenceSource::ClosedForm));
    }
    let long = reference_settings(settings);
    let mut ctx = RunContext::new(settings.seed);
    let t = optimize(problem.oracle.as_ref(), &problem.theta0, &long.algorithm, &mut ctx)
        .map_err(HarnessError::core("reference run"))?;
    Ok((t.theta, ReferenceSource::ReferenceRun))
}

/// Runs seeds `seed, seed+1, …` in parallel and aggregates relative errors.
pub fn replicate(settings: &Settings, n_runs: usize) -> Result<Aggregate, HarnessError> {
    if n_runs < 2 {
        return Err(crate::config::ConfigError::InvalidParam {
            key: "runs".into(),
            reason: "replication needs at least 2 runs".into(),
        }
        .into());
    }
    let problem = build(settings)?;
    let (star, source) = reference(settings, &problem)?;
    let norm = star.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm = if norm > 0.0 { norm } else { 1.0 };
    let curves: Vec<Vec<f64>> = (0..n_runs)
        .into_par_iter()
        .map(|r| {
            let seed = settings.seed.wrapping_add(r as u64);
            let mut ctx = RunContext::new(seed).with_reference(&star);
            optimize(problem.oracle.as_ref(), &problem.theta0, &settings.algorithm, &mut ctx)
                .map(|t| t.records.iter().map(|rec| rec.dist_to_ref.unwrap_or(f64::NAN) / norm).collect())
                .map_err(HarnessError::core(format!("replication with seed {seed}")))
        })
        .collect::<Result<_, _>>()?;
    let steps = curves[0].len();
    let k = n_runs as f64;
    let rows: Vec<(usize, f64, f64)> = (0..steps)
        .map(|i| {
            let mean = curves.iter().map(|c| c[i]).sum::<f64>() / k;
            let var = curves.iter().map(|c| (c[i] - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (i + 1, mean, var.sqrt())
        })
        .collect();
    let means: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let rate = measure_linear_rate(&means, 0.5)
        .ok()
        .map(|(factor, fit_quality)| RateSummary { factor, fit_quality });
    Ok(Aggregate {
        runs: n_runs,
        reference: source,
        final_mean_rel_err: means.last().copied().unwrap_or(f64::NAN),
        rows,
        rate,
    })
}

pub fn aggregate_csv(agg: &Aggregate) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for &(i, m, d) in &agg.rows {
        let _ = writeln!(s, "{i},{},{}", format_sig(m, 9), format_sig(d, 9));
    }
    s
}

/// Writes `aggregate.csv` and `aggregate.json` into `out`.
pub fn replicate_to_dir(settings: &Settings, n_runs: usize, out: &Path) -> Result<(Aggregate, PathBuf), HarnessError> {
    let agg = replicate(settings, n_runs)?;
    std::fs::create_dir_all(out).map_err(HarnessError::io(out))?;
    let path = out.join("aggregate.csv");
    write(&path, &aggregate_csv(&agg))?;
    let json = serde_json::to_string_pretty(&agg).expect("aggregate serializes");
    write(&out.join("aggregate.json"), &(json + "\n"))?;
    Ok((agg, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn settings(json: &str) -> Settings {
        Settings::from_config(&ExperimentConfig::from_json(json).unwrap()).unwrap()
    }

    #[test]
    fn zero_noise_runs_agree() {
        let s = settings(r#"{"problem":"quadratic","algorithm":"sgd","params":{"noise":0,"iters":12}}"#);
        let agg = replicate(&s, 2).unwrap();
        assert_eq!(agg.rows.len(), 12);
        assert!(agg.rows.iter().all(|r| r.2 == 0.0));
        assert_eq!(agg.reference, ReferenceSource::ClosedForm);
        assert_eq!(aggregate_csv(&agg).lines().count(), 13);
    }

    #[test]
    fn single_run_is_rejected() {
        let s = settings(r#"{"problem":"quadratic","algorithm":"sgd"}"#);
        assert_eq!(replicate(&s, 1).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn reference_run_scales_budget() {
        let s = settings(r#"{"problem":"topopt-a","algorithm":"bfsag","params":{"iters":7,"n":30,"n_l":6,"n_h":2}}"#);
        let r = reference_settings(&s);
        assert_eq!((r.algorithm.iters, r.algorithm.n_l, r.algorithm.n_h, r.algorithm.n), (70, 24, 8, 32));
    }
}
