//! Run reports: config echo, timings, artifacts, metrics traced to the
//! artifact they summarise, seed provenance and cache events.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cache::{write_atomic, CacheEvent};
use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const TOOL_VERSION: &str = concat!("ablab ", env!("CARGO_PKG_VERSION"));
pub const REPORT_SUFFIX: &str = "_report.json";
pub const AGGREGATE_NAME: &str = "report.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: Value,
    /// File (relative to the output directory) the value is read from.
    pub artifact: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub purpose: String,
    pub master: u64,
    pub derived: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub timings: Vec<StageTiming>,
    pub artifacts: Vec<String>,
    pub metrics: Vec<Metric>,
    pub seeds: Vec<SeedEntry>,
    pub cache: Vec<CacheEvent>,
}

impl RunReport {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            config: config.clone(),
            timings: Vec::new(),
            artifacts: Vec::new(),
            metrics: Vec::new(),
            seeds: Vec::new(),
            cache: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: impl Serialize, artifact: &str) {
        self.metrics.push(Metric {
            name: name.to_string(),
            value: serde_json::to_value(value).expect("metric serializes"),
            artifact: artifact.to_string(),
        });
    }

    pub fn metric_value(&self, name: &str) -> Option<&Value> {
        self.metrics.iter().find(|m| m.name == name).map(|m| &m.value)
    }

    pub fn metric_f64(&self, name: &str) -> Option<f64> {
        self.metric_value(name).and_then(Value::as_f64)
    }

    pub fn seed(&mut self, purpose: &str, master: u64, derived: u64) {
        self.seeds.push(SeedEntry {
            purpose: purpose.to_string(),
            master,
            derived,
        });
    }

    /// Writes `name` into `outdir` and records it as an artifact.
    pub fn write_artifact(&mut self, outdir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&outdir.join(name), bytes)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, outdir: &Path, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("artifact serializes");
        self.write_artifact(outdir, name, text.as_bytes())
    }

    pub fn file_name(&self) -> String {
        format!("{}{REPORT_SUFFIX}", self.command)
    }

    pub fn save(&self, outdir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        write_atomic(&outdir.join(self.file_name()), text.as_bytes())
    }
}

/// Reports of earlier runs found in `outdir`, ordered by file name.
pub fn collect_reports(outdir: &Path) -> Result<Vec<RunReport>, CliError> {
    let mut names: Vec<String> = match fs::read_dir(outdir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.ends_with(REPORT_SUFFIX))
            .collect(),
        Err(_) => Vec::new(),
    };
    names.sort();
    names
        .iter()
        .map(|n| {
            let path = outdir.join(n);
            let text = fs::read_to_string(&path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|e| CliError::stage("report", format!("{n}: {e}")))
        })
        .collect()
}
