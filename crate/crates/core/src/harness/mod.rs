//! Batch experiments, budget sweeps and transcript auditing.

mod audit;
mod config;
mod experiment;
mod sweep;

use std::io;

use thiserror::Error;

use crate::codes::CodeError;
use crate::protocol::ProtocolError;

pub use audit::{audit_transcript, AuditCheck, AuditReport, Violation};
pub use config::{ExperimentConfig, OutputFormat};
pub use experiment::{
    metrics_from_transcript, run_experiment, run_trials, trial_input, trial_seed, worker_pool,
    write_metrics, RunMetrics, TrialSink,
};
pub use sweep::{sweep_budget, write_sweep_csv, SweepRow};

/// Environment variable holding the worker count for trial fan-out.
pub const WORKERS_ENV: &str = "IECC_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
}
