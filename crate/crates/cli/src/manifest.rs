use std::path::{Path, PathBuf};

use binsc_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::job::Job;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub duration_secs: f64,
    /// The resolved command and configuration.
    pub job: Job,
}

impl RunManifest {
    pub fn new(job: Job, duration_secs: f64) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            command: job.name().into(),
            seeds: job.seeds(),
            inputs: job.inputs(),
            outputs: job.outputs(),
            duration_secs,
            job,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}
