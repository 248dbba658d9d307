//! Artifact emission: versioned CSV tables, JSON summaries and the run manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::IoError;

/// Version tag written at the top of every CSV table.
pub const CSV_SCHEMA: &str = "randwave-csv v1";
/// Version of the artifact layout as a whole.
pub const ARTIFACT_VERSION: &str = concat!("randwave ", env!("CARGO_PKG_VERSION"), " artifacts v1");
pub const MANIFEST_FILE: &str = "manifest.json";

/// A table of stringified cells with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Append a row; cells use the shortest round-trip formatting of their type.
    pub fn push(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row width differs from the header");
        self.rows.push(cells);
    }
}

/// Collects artifacts below an output directory, remembering what was written.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(root: &Path) -> Result<Self, IoError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Files written so far, relative to the root.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Record files written by someone else (absolute or root-relative).
    pub fn record(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        for p in paths {
            let rel = p.strip_prefix(&self.root).map(Path::to_path_buf).unwrap_or(p);
            self.written.push(rel);
        }
    }

    /// `name.csv` with a `# randwave-csv v1 experiment=… table=…` header line.
    pub fn csv(&mut self, experiment: &str, table_name: &str, table: &CsvTable) -> Result<PathBuf, IoError> {
        let rel = PathBuf::from(format!("{table_name}.csv"));
        let mut out = BufWriter::new(File::create(self.root.join(&rel))?);
        writeln!(out, "# {CSV_SCHEMA} experiment={experiment} table={table_name}")?;
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        out.flush()?;
        self.written.push(rel.clone());
        Ok(rel)
    }

    /// Pretty JSON file.
    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf, IoError> {
        let rel = PathBuf::from(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.root.join(&rel), text)?;
        self.written.push(rel.clone());
        Ok(rel)
    }

    pub fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }
}

/// One tolerance check of an experiment summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance rule, e.g. `|x − 0.5| <= 0.1`.
    pub rule: String,
    pub passed: bool,
}

impl Check {
    pub fn within(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            rule: format!("|x - {target}| <= {tol}"),
            passed: (value - target).abs() <= tol,
        }
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, rule: format!("x <= {bound}"), passed: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, rule: format!("x >= {bound}"), passed: value >= bound }
    }
}

/// Per-experiment JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub checks: Vec<Check>,
    /// `None` when the experiment has no tolerance to test.
    pub passed: Option<bool>,
    pub details: serde_json::Value,
}

impl Summary {
    pub fn new(experiment: &str, checks: Vec<Check>, details: serde_json::Value) -> Self {
        let passed = if checks.is_empty() { None } else { Some(checks.iter().all(|c| c.passed)) };
        Self { experiment: experiment.into(), checks, passed, details }
    }
}

/// A file of the inventory with its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Outcome of one experiment of a run.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ExperimentOutcome {
    pub name: String,
    pub passed: Option<bool>,
    /// Hard error, if the experiment could not complete.
    pub error: Option<String>,
}

/// Record of a completed run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub config: serde_json::Value,
    pub workers: usize,
    pub wall_clock_seconds: f64,
    pub experiments: Vec<ExperimentOutcome>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    /// `true` when some experiment failed with a hard error.
    pub fn has_hard_error(&self) -> bool {
        self.experiments.iter().any(|e| e.error.is_some())
    }
}

/// Hex SHA-256 of a file's content.
pub fn sha256_file(path: &Path) -> Result<(String, u64), IoError> {
    let mut f = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(hasher.finalize()), total))
}

/// Hash every listed file (relative to `root`), sorted by path.
pub fn inventory(root: &Path, files: &[PathBuf]) -> Result<Vec<FileEntry>, IoError> {
    let mut paths: Vec<&PathBuf> = files.iter().collect();
    paths.sort();
    paths.dedup();
    paths
        .into_iter()
        .map(|rel| {
            let (sha256, bytes) = sha256_file(&root.join(rel))?;
            Ok(FileEntry { path: rel.to_string_lossy().replace('\\', "/"), bytes, sha256 })
        })
        .collect()
}

/// Write `manifest.json` via a temporary file and a rename, so a reader
/// never observes a partial manifest.
pub fn write_manifest_atomic(root: &Path, manifest: &RunManifest) -> Result<PathBuf, IoError> {
    let tmp = root.join(format!(".{MANIFEST_FILE}.tmp"));
    let path = root.join(MANIFEST_FILE);
    {
        let mut f = File::create(&tmp)?;
        f.write_all(serde_json::to_string_pretty(manifest)?.as_bytes())?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Re-hash the inventory of `root/manifest.json`; returns the mismatching paths.
pub fn verify_manifest(root: &Path) -> Result<Vec<String>, IoError> {
    #[derive(serde::Deserialize)]
    struct Stored {
        files: Vec<FileEntry>,
    }
    let stored: Stored = serde_json::from_str(&fs::read_to_string(root.join(MANIFEST_FILE))?)?;
    let mut bad = Vec::new();
    for entry in stored.files {
        match sha256_file(&root.join(&entry.path)) {
            Ok((sha, bytes)) if sha == entry.sha256 && bytes == entry.bytes => {}
            _ => bad.push(entry.path),
        }
    }
    Ok(bad)
}
