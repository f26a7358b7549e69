//! Single configured run: optimizer dispatch, trace CSV and summary JSON.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bifidelity::fem::{field_to_csv, format_sig};
use bifidelity::rng::Purpose;
use bifidelity::sgd::{
    bfsag_run, bfsvrg_run, draw_realizations, measure_linear_rate, sag_run, sgd_run, svrg_run, BfSagConfig,
    BfSvrgConfig, Observation, OptimizerTrace, Record, RunContext, SagConfig, SgdConfig, SvrgConfig,
};
use bifidelity::{BiFidelityOracle, DesignVector, RandomRealization};
use serde::Serialize;

use crate::config::{AlgorithmKind, AlgorithmSettings, Settings};
use crate::error::HarnessError;
use crate::problem::{build, BuiltProblem};

pub const TRACE_HEADER: &str = "iter,objective,mass_ratio,cum_cost_hf,high_calls,low_calls";
const SIG: usize = 9;

/// Runs the configured optimizer from `theta0`.
pub fn optimize(
    oracle: &dyn BiFidelityOracle<f64>,
    theta0: &DesignVector<f64>,
    a: &AlgorithmSettings,
    ctx: &mut RunContext<'_, f64>,
) -> bifidelity::Result<OptimizerTrace<f64>> {
    match a.kind {
        AlgorithmKind::Sgd => sgd_run(
            oracle,
            theta0,
            &SgdConfig {
                eta: a.eta,
                iters: a.iters,
                batch: a.batch,
            },
            ctx,
        ),
        AlgorithmKind::Sag => sag_run(
            oracle,
            theta0,
            &SagConfig {
                eta: a.eta,
                iters: a.iters,
                n: a.n,
                n_h: a.n_h,
            },
            ctx,
        ),
        AlgorithmKind::BfSag => bfsag_run(
            oracle,
            theta0,
            &BfSagConfig {
                eta: a.eta,
                iters: a.iters,
                n: a.n,
                n_l: a.n_l,
                n_h: a.n_h,
            },
            ctx,
        ),
        AlgorithmKind::Svrg => svrg_run(
            oracle,
            theta0,
            &SvrgConfig {
                eta: a.eta,
                outer: a.iters,
                inner: a.inner,
                n_h: a.n_h,
                batch: a.batch,
            },
            ctx,
        ),
        AlgorithmKind::BfSvrg => bfsvrg_run(
            oracle,
            theta0,
            &BfSvrgConfig {
                eta: a.eta,
                outer: a.iters,
                inner: a.inner,
                n_l: a.n_l,
                n_h: a.n_h,
                alpha_mode: a.alpha_mode,
                anchor: a.anchor,
            },
            ctx,
        ),
    }
}

/// Realizations used to report the objective: the whole population when the
/// problem is a finite sum, otherwise a fixed seeded held-out set.
pub fn validation_set(oracle: &dyn BiFidelityOracle<f64>, seed: u64, count: usize) -> Vec<RandomRealization<f64>> {
    match oracle.population() {
        Some(pop) => pop.to_vec(),
        None => draw_realizations(oracle, seed, Purpose::Validation, 0, count),
    }
}

/// Linear rate fitted to the distance-to-minimizer series.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct RateSummary {
    pub factor: f64,
    pub fit_quality: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunSummary {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub iterations: usize,
    pub final_objective: Option<f64>,
    pub final_mass_ratio: Option<f64>,
    pub final_cost_hf: f64,
    pub high_calls: u64,
    pub low_calls: u64,
    pub alpha_fallbacks: usize,
    pub final_rel_error: Option<f64>,
    pub rate: Option<RateSummary>,
    pub theta: Option<Vec<f64>>,
}

pub struct RunOutcome {
    pub trace: OptimizerTrace<f64>,
    pub summary: RunSummary,
    pub problem: BuiltProblem,
}

/// Builds the problem and runs it with objective monitoring; no files written.
pub fn execute(settings: &Settings) -> Result<RunOutcome, HarnessError> {
    let problem = build(settings)?;
    let oracle = problem.oracle.as_ref();
    let val = validation_set(oracle, settings.seed, settings.validation);
    let mut monitor = |_: usize, theta: &[f64]| -> bifidelity::Result<Observation<f64>> {
        Ok(Observation {
            objective: Some(oracle.mean_objective(theta, &val)?),
            mass_ratio: oracle.mass_ratio(theta),
        })
    };
    let mut ctx = RunContext::new(settings.seed)
        .with_monitor(&mut monitor)
        .every(settings.record_every);
    if let Some(star) = &problem.theta_star {
        ctx = ctx.with_reference(star);
    }
    let context = format!("running {} on {}", settings.algorithm_name, settings.problem_name);
    let trace = optimize(oracle, &problem.theta0, &settings.algorithm, &mut ctx).map_err(HarnessError::core(context))?;
    let summary = summarize(settings, &trace, problem.theta_star.as_deref());
    Ok(RunOutcome {
        trace,
        summary,
        problem,
    })
}

fn summarize(settings: &Settings, trace: &OptimizerTrace<f64>, star: Option<&[f64]>) -> RunSummary {
    let last = trace.last();
    let final_objective = trace.all_records().filter_map(|r| r.objective).last();
    let norm = star.map(|s| s.iter().map(|v| v * v).sum::<f64>().sqrt());
    let errors: Vec<f64> = trace.all_records().filter_map(|r| r.dist_to_ref).collect();
    let rate = (errors.len() >= 3)
        .then(|| measure_linear_rate(&errors, 0.5).ok())
        .flatten()
        .map(|(factor, fit_quality)| RateSummary { factor, fit_quality });
    RunSummary {
        problem: settings.problem_name.clone(),
        algorithm: settings.algorithm_name.clone(),
        seed: settings.seed,
        iterations: trace.iterations(),
        final_objective,
        final_mass_ratio: last.mass_ratio,
        final_cost_hf: last.cum_cost,
        high_calls: last.high_calls,
        low_calls: last.low_calls,
        alpha_fallbacks: trace.records.iter().filter(|r| r.alpha_fallback).count(),
        final_rel_error: match (last.dist_to_ref, norm) {
            (Some(d), Some(n)) if n > 0.0 => Some(d / n),
            _ => None,
        },
        rate,
        theta: (trace.theta.len() <= bifidelity::sgd::SNAPSHOT_LIMIT).then(|| trace.theta.clone()),
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format_sig(x, SIG)).unwrap_or_default()
}

fn row(r: &Record<f64>) -> String {
    format!(
        "{},{},{},{},{},{}",
        r.iter,
        cell(r.objective),
        cell(r.mass_ratio),
        format_sig(r.cum_cost, SIG),
        r.high_calls,
        r.low_calls
    )
}

/// Trace CSV: header, then one row per record starting at iteration 0.
pub fn trace_csv(trace: &OptimizerTrace<f64>) -> String {
    let mut s = String::with_capacity(64 * (trace.records.len() + 2));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in trace.all_records() {
        let _ = writeln!(s, "{}", row(r));
    }
    s
}

pub struct RunArtifacts {
    pub trace_path: PathBuf,
    pub summary_path: PathBuf,
    pub density_path: Option<PathBuf>,
    pub outcome: RunOutcome,
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(HarnessError::io(path))
}

/// Executes the run and writes `trace.csv`, `summary.json` and, for topology
/// problems, `density.csv` into `out`.
pub fn run_experiment(settings: &Settings, out: &Path) -> Result<RunArtifacts, HarnessError> {
    let outcome = execute(settings)?;
    std::fs::create_dir_all(out).map_err(HarnessError::io(out))?;
    let trace_path = out.join("trace.csv");
    write(&trace_path, &trace_csv(&outcome.trace))?;
    let summary_path = out.join("summary.json");
    let json = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    write(&summary_path, &(json + "\n"))?;
    let density_path = match &outcome.problem.topopt {
        Some(p) => {
            let rho = p.densities(&outcome.trace.theta).map_err(HarnessError::core("filtering final design"))?;
            let csv = field_to_csv(p.fine_mesh(), &rho).map_err(HarnessError::core("exporting final design"))?;
            let path = out.join("density.csv");
            write(&path, &csv)?;
            Some(path)
        }
        None => None,
    };
    Ok(RunArtifacts {
        trace_path,
        summary_path,
        density_path,
        outcome,
    })
}
