//! Experiment runner: configuration, seeding, orchestration and CSV output.

pub mod config;
pub mod csv;
pub mod experiments;
pub mod manifest;
pub mod seed;

use std::fs;
use std::time::Instant;

use thiserror::Error;

use crate::beamforming::BeamformingError;
use crate::geometry::GeometryError;
use crate::sensing::SensingError;
use crate::waveform::WaveformError;

pub use config::ExperimentSpec;
pub use csv::{emit_csv, ColumnType, CsvError, Field, Schema};
pub use experiments::{Artifact, ExperimentName};
pub use manifest::RunManifest;
pub use seed::derive_seed;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("unknown experiment `{name}`; valid: {valid}")]
    UnknownExperiment { name: String, valid: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid parameter `{path}`: {message}")]
    InvalidParameter { path: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Waveform(#[from] WaveformError),
    #[error(transparent)]
    Beamforming(#[from] BeamformingError),
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl RunnerError {
    /// Stable machine-readable error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownExperiment { .. } => "unknown_experiment",
            Self::Config(_) => "invalid_config",
            Self::InvalidParameter { .. } => "invalid_parameter",
            Self::Io { .. } => "io",
            Self::Csv(CsvError::Io { .. }) => "io",
            Self::Csv(_) => "csv",
            Self::Geometry(_) => "geometry",
            Self::Waveform(_) => "waveform",
            Self::Beamforming(_) => "beamforming",
            Self::Sensing(_) => "sensing",
            Self::ThreadPool(_) => "thread_pool",
        }
    }
}

/// Computes the artifacts of `spec` without touching the file system.
pub fn compute_artifacts(spec: &ExperimentSpec) -> Result<Vec<Artifact>, RunnerError> {
    let spec = spec
        .clone()
        .with_overrides(serde_json::Value::Object(Default::default()))?;
    match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunnerError::ThreadPool(e.to_string()))?
            .install(|| experiments::execute(&spec)),
        None => experiments::execute(&spec),
    }
}

/// Runs `spec`, writes its CSV files and `manifest.json` into
/// `spec.output_dir`, and returns the manifest.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunManifest, RunnerError> {
    let start = Instant::now();
    let dir = &spec.output_dir;
    let io = |source| RunnerError::Io {
        path: dir.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let artifacts = compute_artifacts(spec)?;
    for a in &artifacts {
        emit_csv(&a.rows, &a.schema, &dir.join(&a.file_name))?;
    }
    let manifest = RunManifest {
        spec: spec.clone(),
        artifacts: artifacts.into_iter().map(|a| a.file_name).collect(),
        duration_s: start.elapsed().as_secs_f64(),
    };
    let path = manifest.path();
    fs::write(&path, manifest.to_json()).map_err(|source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(manifest)
}
