//! `manifest.json`: one record per command run against an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub tool: String,
    pub runs: Vec<RunRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub tool_version: String,
    pub config: Option<PathBuf>,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    /// RFC 3339, UTC.
    pub started: String,
    pub finished: String,
}

impl Manifest {
    fn new() -> Self {
        Manifest {
            format_version: MANIFEST_FORMAT_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            runs: Vec::new(),
        }
    }

    /// Loads the manifest in `dir`, or starts an empty one. An unreadable
    /// manifest is replaced rather than extended.
    pub fn load_or_new(dir: &Path) -> Self {
        fs::read_to_string(dir.join(MANIFEST_NAME))
            .ok()
            .and_then(|s| serde_json::from_str::<Manifest>(&s).ok())
            .filter(|m| m.format_version == MANIFEST_FORMAT_VERSION)
            .unwrap_or_else(Manifest::new)
    }

    pub fn append(dir: &Path, run: RunRecord) -> std::io::Result<PathBuf> {
        let mut m = Manifest::load_or_new(dir);
        m.runs.push(run);
        let path = dir.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&m).map_err(std::io::Error::other)?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
