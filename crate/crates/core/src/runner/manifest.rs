//! Run manifests.
//!
//! `manifest.json` holds the resolved config of a run plus the artifact
//! list and wall-clock duration. Feeding it back to `dislac run` repeats
//! the run.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::config::ExperimentSpec;
use super::RunnerError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub spec: ExperimentSpec,
    /// CSV files written, relative to `spec.output_dir`.
    pub artifacts: Vec<String>,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut doc = self.spec.to_document();
        doc.insert("artifacts".into(), Value::from(self.artifacts.clone()));
        doc.insert("duration_s".into(), Value::from(self.duration_s));
        doc.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(doc)).expect("manifest serializes");
        text.push('\n');
        text
    }

    /// Reads a manifest back; its `spec` reproduces the run.
    pub fn read(path: &Path) -> Result<Self, RunnerError> {
        let text = fs::read_to_string(path).map_err(|source| RunnerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec = ExperimentSpec::parse(&text)?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| RunnerError::Config(format!("invalid manifest: {e}")))?;
        let artifacts = doc["artifacts"]
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|v| v.as_str().map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        let duration_s = doc["duration_s"].as_f64().unwrap_or(0.0);
        Ok(Self {
            spec,
            artifacts,
            duration_s,
        })
    }

    pub fn path(&self) -> PathBuf {
        self.spec.output_dir.join(MANIFEST_FILE)
    }

    pub fn artifact_paths(&self) -> Vec<PathBuf> {
        self.artifacts
            .iter()
            .map(|a| self.spec.output_dir.join(a))
            .collect()
    }
}
