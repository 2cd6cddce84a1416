//! Experiment configuration and runner.

pub mod config;
pub mod oracle_check;
pub mod runner;

pub use config::{ConfigOverrides, EnsembleKind, ExperimentConfig, Preset, RunPoint};
pub use oracle_check::{oracle_check, OracleReport};
pub use runner::{
    compute_series, csv_string, exit_code, run_experiment, run_experiment_with_workers, RunOutput,
    CSV_HEADER, WORKERS_ENV,
};
