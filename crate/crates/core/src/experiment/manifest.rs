use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Written next to every run's outputs as `manifest.json`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the config file copied into the output directory.
    pub config_hash: String,
    pub seeds: Vec<u64>,
    /// Command-line settings applied on top of the copied config.
    pub overrides: Vec<String>,
    pub files: Vec<FileEntry>,
    pub timings_ms: Vec<(String, u128)>,
    pub assertions: Vec<AssertionOutcome>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}
