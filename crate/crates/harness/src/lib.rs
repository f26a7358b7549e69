//! Experiment harness: JSON configs, single runs, replication and
//! verification suites for the bi-fidelity optimizers.

pub mod cli;
pub mod config;
pub mod error;
pub mod problem;
pub mod replicate;
pub mod run;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig, Settings};
pub use error::HarnessError;
pub use replicate::{replicate, replicate_to_dir, Aggregate};
pub use run::{execute, run_experiment, trace_csv, RunArtifacts, RunSummary};
