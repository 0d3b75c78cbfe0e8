//! Run manifests: one JSON file per artifact-producing command.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub command: String,
    /// Arguments after the program name, replayable as-is.
    pub argv: Vec<String>,
    pub working_dir: PathBuf,
    pub params: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    pub wall_time_seconds: f64,
}

/// Collects what a command touched while it runs.
pub struct Recorder {
    command: String,
    argv: Vec<String>,
    params: serde_json::Value,
    seeds: BTreeMap<String, u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    start: Instant,
}

impl Recorder {
    pub fn new(command: &str, argv: &[String], params: impl Serialize) -> CliResult<Self> {
        Ok(Recorder {
            command: command.to_string(),
            argv: argv.to_vec(),
            params: serde_json::to_value(params)?,
            seeds: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            start: Instant::now(),
        })
    }

    pub fn seed(&mut self, name: &str, value: u64) {
        self.seeds.insert(name.to_string(), value);
    }

    pub fn input(&mut self, p: impl AsRef<Path>) {
        self.inputs.push(p.as_ref().to_path_buf());
    }

    pub fn output(&mut self, p: impl AsRef<Path>) {
        self.outputs.push(p.as_ref().to_path_buf());
    }

    /// Writes the manifest to `path` and returns it.
    pub fn finish(mut self, path: impl AsRef<Path>) -> CliResult<RunManifest> {
        let path = path.as_ref();
        self.outputs.push(path.to_path_buf());
        let manifest = RunManifest {
            version: MANIFEST_VERSION,
            command: self.command,
            argv: self.argv,
            working_dir: std::env::current_dir()?,
            params: self.params,
            seeds: self.seeds,
            inputs: self.inputs,
            outputs: self.outputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: self.start.elapsed().as_secs_f64(),
        };
        write_json(path, &manifest)?;
        Ok(manifest)
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> CliResult<RunManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::io(path.display(), e))?;
    if m.version != MANIFEST_VERSION {
        return Err(CliError::BadArgs(format!(
            "unsupported manifest version {}",
            m.version
        )));
    }
    Ok(m)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path.display(), e))
}

/// `out/x.pgm` -> `out/x.pgm.<suffix>`.
pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}
