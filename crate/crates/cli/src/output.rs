use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use surface_threshold::analysis::RAW_FORMAT_VERSION;
use surface_threshold::ptmc::CHECKPOINT_VERSION;

use crate::CliError;

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

/// Output directory with the fixed `raw/`, `analysis/`, `bench/`, `checkpoints/` layout.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: PathBuf) -> Self {
        OutDir { root }
    }

    pub fn path(&self, sub: &str, name: &str) -> PathBuf {
        self.root.join(sub).join(name)
    }

    /// Writes through a temporary file so readers never see a partial table.
    pub fn write(&self, sub: &str, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(sub, name);
        write_atomic(&path, contents)?;
        Ok(path)
    }

    /// Records an output file and its config hash in `manifest.json`.
    pub fn record(&self, seed: u64, entries: &[(String, String)]) -> Result<(), CliError> {
        let path = self.root.join("manifest.json");
        let mut manifest = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| CliError::Io(format!("{}: unreadable manifest: {e}", path.display())))?,
            Err(_) => Manifest::default(),
        };
        manifest.format_version = MANIFEST_FORMAT_VERSION;
        manifest.package_version = env!("CARGO_PKG_VERSION").to_string();
        manifest.master_seed = seed;
        manifest.formats = BTreeMap::from([
            ("raw".to_string(), RAW_FORMAT_VERSION),
            ("checkpoint".to_string(), CHECKPOINT_VERSION),
            ("bench".to_string(), crate::bench::BENCH_FORMAT_VERSION),
        ]);
        for (file, hash) in entries {
            manifest.outputs.insert(file.clone(), hash.clone());
        }
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
        write_atomic(&path, &text)
    }

    pub fn relative(&self, path: &Path) -> String {
        path.strip_prefix(&self.root).unwrap_or(path).display().to_string()
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    package_version: String,
    master_seed: u64,
    formats: BTreeMap<String, u32>,
    /// Output file to the hash of the config sections that produced it.
    outputs: BTreeMap<String, String>,
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}
