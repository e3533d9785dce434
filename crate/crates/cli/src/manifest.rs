//! Run manifest: config echo, version, wall time, artifact list and the
//! per-check summary. Written last so a manifest implies complete outputs.

use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ManifestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl ManifestCheck {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        ManifestCheck {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub seed: Option<u64>,
    pub integrator: String,
    pub outputs: Vec<String>,
    pub checks: Vec<ManifestCheck>,
    pub config: serde_json::Value,
}

pub fn write(path: &Path, manifest: &RunManifest) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), manifest)?;
    Ok(())
}
