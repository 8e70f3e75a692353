//! Run configuration.
//!
//! A config is one TOML or JSON document:
//!
//! ```toml
//! experiment = "sensing-mc"
//! master_seed = 7
//! output_dir = "out/sensing"
//! threads = 4            # optional
//!
//! [sensing-mc]           # overrides of the embedded defaults, per key
//! trials = 200
//! n_antennas = [2, 4]
//! ```
//!
//! Sections named after other experiments are accepted and ignored, so one
//! file can carry settings for several runs. A run manifest is itself a
//! valid config: its `artifacts` and `duration_s` keys are ignored.

use std::path::PathBuf;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use super::experiments::ExperimentName;
use super::RunnerError;

const RESERVED_KEYS: [&str; 4] = ["experiment", "master_seed", "output_dir", "threads"];
const MANIFEST_KEYS: [&str; 3] = ["artifacts", "duration_s", "version"];

/// A fully resolved experiment request.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    /// Resolved parameters: embedded defaults overridden by the config.
    pub parameters: Value,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl ExperimentSpec {
    /// Spec with default parameters.
    pub fn with_defaults(
        name: ExperimentName,
        master_seed: u64,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            name,
            parameters: name.default_parameters(),
            master_seed,
            output_dir: output_dir.into(),
            threads: None,
        }
    }

    /// Overrides parameters key by key (deep merge) and re-validates.
    pub fn with_overrides(mut self, overrides: Value) -> Result<Self, RunnerError> {
        merge(&mut self.parameters, overrides);
        self.parameters = self.name.resolve(self.parameters)?;
        Ok(self)
    }

    /// Parses and resolves a TOML or JSON config document.
    pub fn parse(text: &str) -> Result<Self, RunnerError> {
        let doc = parse_document(text)?;
        let Value::Object(mut top) = doc else {
            return Err(RunnerError::Config("config must be a table/object".into()));
        };
        let name: ExperimentName = match top.remove("experiment") {
            Some(Value::String(s)) => s.parse()?,
            Some(other) => {
                return Err(RunnerError::InvalidParameter {
                    path: "experiment".into(),
                    message: format!("expected a string, got {other}"),
                })
            }
            None => return Err(RunnerError::Config("missing key `experiment`".into())),
        };
        let master_seed = match top.remove("master_seed") {
            None => 0,
            Some(v) => v.as_u64().ok_or_else(|| RunnerError::InvalidParameter {
                path: "master_seed".into(),
                message: format!("expected an unsigned 64-bit integer, got {v}"),
            })?,
        };
        let output_dir = match top.remove("output_dir") {
            None => PathBuf::from("out").join(name.as_str()),
            Some(Value::String(s)) => PathBuf::from(s),
            Some(other) => {
                return Err(RunnerError::InvalidParameter {
                    path: "output_dir".into(),
                    message: format!("expected a string, got {other}"),
                })
            }
        };
        let threads = match top.remove("threads") {
            None | Some(Value::Null) => None,
            Some(v) => match v.as_u64() {
                Some(n) if n >= 1 => Some(n as usize),
                _ => {
                    return Err(RunnerError::InvalidParameter {
                        path: "threads".into(),
                        message: format!("expected an integer >= 1, got {v}"),
                    })
                }
            },
        };
        let overrides = top
            .remove(name.as_str())
            .unwrap_or_else(|| Value::Object(Map::new()));
        for key in top.keys() {
            let known =
                MANIFEST_KEYS.contains(&key.as_str()) || ExperimentName::from_str(key).is_ok();
            if !known {
                return Err(RunnerError::InvalidParameter {
                    path: key.clone(),
                    message: "unknown top-level key".into(),
                });
            }
        }
        if !overrides.is_object() {
            return Err(RunnerError::InvalidParameter {
                path: name.as_str().into(),
                message: "expected a table of parameters".into(),
            });
        }
        let mut spec =
            Self::with_defaults(name, master_seed, output_dir).with_overrides(overrides)?;
        spec.threads = threads;
        Ok(spec)
    }

    /// Config document equivalent to this spec.
    pub fn to_document(&self) -> Map<String, Value> {
        let mut doc = Map::new();
        doc.insert(
            RESERVED_KEYS[0].into(),
            Value::String(self.name.as_str().into()),
        );
        doc.insert(RESERVED_KEYS[1].into(), Value::from(self.master_seed));
        doc.insert(
            RESERVED_KEYS[2].into(),
            Value::String(self.output_dir.to_string_lossy().into_owned()),
        );
        if let Some(t) = self.threads {
            doc.insert(RESERVED_KEYS[3].into(), Value::from(t));
        }
        doc.insert(self.name.as_str().into(), self.parameters.clone());
        doc
    }
}

/// JSON when the document starts with `{`, TOML otherwise.
fn parse_document(text: &str) -> Result<Value, RunnerError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| RunnerError::Config(format!("invalid JSON: {e}")))
    } else {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| RunnerError::Config(format!("invalid TOML: {e}")))?;
        serde_json::to_value(table).map_err(|e| RunnerError::Config(e.to_string()))
    }
}

/// Recursively overlays `patch` onto `base`; tables merge, everything else
/// replaces.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Deserializes typed parameters, reporting the path of the offending key.
pub fn typed<T: DeserializeOwned>(section: &str, value: &Value) -> Result<T, RunnerError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            section.to_string()
        } else {
            format!("{section}.{inner}")
        };
        RunnerError::InvalidParameter {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// Serializes typed parameters back into a document.
pub fn untyped<T: Serialize>(params: &T) -> Value {
    serde_json::to_value(params).expect("parameter structs serialize to JSON")
}
