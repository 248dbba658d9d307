//! Run orchestration: configuration parsing, experiment dispatch, CSV/JSON
//! reports and hashed run manifests.

mod config;
mod report;
mod run;

pub use config::{
    parse_config, parse_number, ConfigError, CounterexampleKind, DataConfig, DataKind, ExperimentKind,
    ExperimentParams, RandomConfig, RegularityConfig, RunConfig, TailNorm, KEYS, S_INFINITY,
};
pub use report::{
    inventory, sha256_file, verify_manifest, write_manifest_atomic, ArtifactWriter, Check, CsvTable,
    ExperimentOutcome, FileEntry, RunManifest, Summary, ARTIFACT_VERSION, CSV_SCHEMA, MANIFEST_FILE,
};
pub use run::{base_data, default_workers, run, run_with_workers, WORKERS_ENV};

use thiserror::Error;

use crate::evolution::EvolutionError;
use crate::expansion::ExpansionError;
use crate::experiments::ExperimentError;
use crate::solver::SolverError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Unsupported(String),
}
