//! Command-line interface.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::verify::{run_suite, Suite};
use crate::{replicate_to_dir, run_experiment, ExperimentConfig, HarnessError, Settings};

#[derive(Parser)]
#[command(name = "bifidelity", version, about = "Bi-fidelity stochastic gradient experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run one optimization and write trace.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the output directory in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a run over consecutive seeds and aggregate the relative error.
    Replicate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: gradients, cv, kl, costs or rates.
    Verify { suite: Suite },
}

fn load(path: &Path) -> Result<Settings, HarnessError> {
    Ok(Settings::from_config(&ExperimentConfig::load(path)?)?)
}

pub fn dispatch(cmd: Command) -> Result<bool, HarnessError> {
    match cmd {
        Command::Run { config, seed, out } => {
            let mut s = load(&config)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let out = out.unwrap_or_else(|| s.output.clone());
            let a = run_experiment(&s, &out)?;
            let sum = &a.outcome.summary;
            println!(
                "{} / {}: {} iterations, final objective {}, cost {} ({} high, {} low)",
                s.problem_name,
                s.algorithm_name,
                sum.iterations,
                sum.final_objective.map_or("n/a".into(), |v| format!("{v:.6}")),
                sum.final_cost_hf,
                sum.high_calls,
                sum.low_calls
            );
            println!("wrote {}", a.trace_path.display());
            Ok(true)
        }
        Command::Replicate { config, runs, out } => {
            let s = load(&config)?;
            let runs = runs.unwrap_or(s.runs);
            let out = out.unwrap_or_else(|| s.output.clone());
            let (agg, path) = replicate_to_dir(&s, runs, &out)?;
            println!(
                "{} runs, final mean relative error {:.4e}{}",
                agg.runs,
                agg.final_mean_rel_err,
                agg.rate
                    .map_or(String::new(), |r| format!(", rate {:.5} (fit {:.3})", r.factor, r.fit_quality))
            );
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Verify { suite } => {
            let checks = run_suite(suite)?;
            for c in &checks {
                println!("{}: {} ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

/// Process exit status for a dispatch result: 0 success, 1 failed checks or
/// I/O, 2 configuration, 3 numerical fault, 4 solver divergence.
pub fn exit_status(result: &Result<bool, HarnessError>) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => e.exit_code() as u8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<bool, HarnessError> {
        let cli = Cli::try_parse_from(std::iter::once("bifidelity").chain(args.iter().copied())).unwrap();
        dispatch(cli.command)
    }

    #[test]
    fn run_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(
            &cfg,
            r#"{"problem":"example1","algorithm":"bfsag","params":{"iters":30,"n_l":50,"n_h":5},"seed":9}"#,
        )
        .unwrap();
        let mut traces = Vec::new();
        for name in ["a", "b"] {
            let out = dir.path().join(name);
            let r = run_args(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
            assert_eq!(exit_status(&r), 0);
            traces.push(std::fs::read_to_string(out.join("trace.csv")).unwrap());
        }
        assert_eq!(traces[0], traces[1]);
        assert_eq!(traces[0].lines().count(), 32);

        let out = dir.path().join("c");
        let r = run_args(&["run", "--config", cfg.to_str().unwrap(), "--seed", "10", "--out", out.to_str().unwrap()]);
        assert_eq!(exit_status(&r), 0);
        assert_ne!(std::fs::read_to_string(out.join("trace.csv")).unwrap(), traces[0]);
    }

    #[test]
    fn config_errors_exit_2() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        for text in [
            r#"{"problem":"example1","algorithm":"sag","extra":1}"#,
            r#"{"problem":"example1","algorithm":"sag","params":{"eta":-1}}"#,
            r#"{"problem":"beam","algorithm":"sag"}"#,
            "not json",
        ] {
            std::fs::write(&cfg, text).unwrap();
            assert_eq!(exit_status(&run_args(&["run", "--config", cfg.to_str().unwrap()])), 2, "{text}");
        }
        let missing = dir.path().join("missing.json");
        assert_eq!(exit_status(&run_args(&["run", "--config", missing.to_str().unwrap()])), 2);
    }

    #[test]
    fn replicate_writes_aggregate() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, r#"{"problem":"quadratic","algorithm":"sag","params":{"iters":20,"n_h":5}}"#).unwrap();
        let out = dir.path().join("r");
        let r = run_args(&["replicate", "--config", cfg.to_str().unwrap(), "--runs", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(exit_status(&r), 0);
        let csv = std::fs::read_to_string(out.join("aggregate.csv")).unwrap();
        assert!(csv.starts_with("iter,mean_rel_err,std_rel_err\n"));
    }

    #[test]
    fn verify_reports_checks() {
        assert_eq!(exit_status(&run_args(&["verify", "costs"])), 0);
        assert!(Cli::try_parse_from(["bifidelity", "verify", "speed"]).is_err());
    }
}
