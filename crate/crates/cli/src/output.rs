//! Output bundle: data files first, then `manifest.json`. Every file is
//! written to a temporary sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::CliError;
use crate::scenarios::Outcome;

pub const MANIFEST: &str = "manifest.json";

pub struct RunMeta<'a> {
    pub command: &'a str,
    pub source: &'a [u8],
    pub config: &'a Config,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub wall_time_s: f64,
}

#[derive(Serialize)]
struct FileEntry {
    file: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    scenario: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    config_sha256: String,
    source_sha256: String,
    seed: Option<u64>,
    jobs: usize,
    wall_time_s: f64,
    outputs: Vec<FileEntry>,
    warnings: &'a [String],
    results: &'a Map<String, Value>,
    config: &'a Config,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(path, e));
    }
    Ok(())
}

pub fn write_bundle(dir: &Path, outcome: &Outcome, meta: &RunMeta) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut entries = Vec::with_capacity(outcome.files.len());
    for (name, body) in &outcome.files {
        write_atomic(&dir.join(name), body.as_bytes())?;
        entries.push(FileEntry { file: name.clone(), bytes: body.len(), sha256: sha256_hex(body.as_bytes()) });
    }
    let canonical = serde_json::to_vec(meta.config).expect("config serializes");
    let manifest = Manifest {
        tool: "qsync",
        version: env!("CARGO_PKG_VERSION"),
        command: meta.command,
        scenario: meta.config.scenario.name(),
        status: if outcome.failure.is_some() { "partial" } else { "complete" },
        error: outcome.failure.as_ref().map(|e| e.to_string()),
        config_sha256: sha256_hex(&canonical),
        source_sha256: sha256_hex(meta.source),
        seed: meta.seed,
        jobs: meta.jobs,
        wall_time_s: meta.wall_time_s,
        outputs: entries,
        warnings: &outcome.warnings,
        results: &outcome.results,
        config: meta.config,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_atomic(&dir.join(MANIFEST), json.as_bytes())
}
