//! Per-run manifest: the command line, the resolved configuration, the
//! inputs and the files produced. Replaying the recorded arguments
//! reproduces the run.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name.
    pub argv: Vec<String>,
    /// Every option with defaults filled in.
    pub resolved: Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
    /// `MCGL_THREADS` at run time, if set; results do not depend on it.
    pub threads: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InputRecord {
    pub path: PathBuf,
    pub content: Value,
}

impl Manifest {
    pub fn new(command: &str, argv: &[String], resolved: Value) -> Self {
        Manifest {
            tool: "mcgl".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            argv: argv.to_vec(),
            resolved,
            inputs: Vec::new(),
            outputs: Vec::new(),
            threads: std::env::var("MCGL_THREADS").ok(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(FILE_NAME);
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}
