use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use nudgem::report::Table;
use serde::Serialize;

/// Bumped whenever a command's CSV columns change.
pub const CSV_SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub command: &'a str,
    pub config: &'a C,
    pub outputs: Vec<String>,
    pub version: &'static str,
    pub csv_schema: u32,
    pub seeds: Vec<u64>,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
}

/// Missing values (NaN) become empty fields.
fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

pub fn write_table(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&v| cell(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub fn write_manifest<C: Serialize>(
    out: &Path,
    command: &str,
    config: &C,
    seeds: Vec<u64>,
    started: SystemTime,
    elapsed: Duration,
) -> Result<PathBuf> {
    let path = manifest_path(out);
    let manifest = RunManifest {
        command,
        config,
        outputs: vec![out.display().to_string()],
        version: env!("CARGO_PKG_VERSION"),
        csv_schema: CSV_SCHEMA,
        seeds,
        started_unix: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        wall_clock_seconds: elapsed.as_secs_f64(),
    };
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}
