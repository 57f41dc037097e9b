//! Run manifests: what was asked for and how long it took.
//!
//! Primary outputs must be byte-identical across runs, so the manifest,
//! which records wall-clock time and thread count, travels beside them:
//! `FILE.manifest.json` next to an `--out FILE`, or one JSON line on
//! standard error when the output went to standard output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
    pub threads: usize,
    pub duration_seconds: f64,
    pub outputs: Vec<String>,
}

pub struct Run {
    subcommand: &'static str,
    started: Instant,
}

impl Run {
    pub fn start(subcommand: &'static str) -> Self {
        Run {
            subcommand,
            started: Instant::now(),
        }
    }

    /// Writes the manifest for a finished run whose primary output went to
    /// `primary` (standard output when `None`).
    pub fn finish<C: Serialize>(self, config: &C, seed: Option<u64>, primary: Option<&Path>, extra: &[&Path]) -> CliResult {
        let mut outputs: Vec<String> = primary.iter().chain(extra).map(|p| p.display().to_string()).collect();
        if primary.is_none() {
            outputs.insert(0, "-".to_string());
        }
        let manifest = RunManifest {
            subcommand: self.subcommand,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config: serde_json::to_value(config).expect("configuration serializes"),
            threads: rayon::current_num_threads(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
            outputs,
        };
        match primary {
            Some(path) => {
                let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
                std::fs::write(sidecar(path), text + "\n")?;
            }
            None => eprintln!("{}", serde_json::to_string(&manifest).expect("manifest serializes")),
        }
        Ok(())
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
