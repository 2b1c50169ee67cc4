//! Report files: canonical JSON, CSV companions, and the run manifest they point to.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

/// Rebuilds every object with its keys in lexicographic order.
#[must_use]
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonical(v))).collect::<Map<_, _>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

/// Canonical pretty JSON; non-finite floats (which JSON lacks) become null.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String, Failure> {
    let v = serde_json::to_value(value).map_err(|e| Failure::Internal(format!("serialization: {e}")))?;
    serde_json::to_string_pretty(&canonical(v)).map_err(|e| Failure::Internal(format!("serialization: {e}")))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A rectangular table for the CSV companion.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    #[must_use]
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| (*h).to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Shortest decimal that reads back to the same f64.
#[must_use]
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[must_use]
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryLine {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub manifest_hash: String,
    pub command_line: Vec<String>,
    pub config: Value,
    pub config_hash: String,
    pub versions: BTreeMap<String, String>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
    pub summary: Vec<SummaryLine>,
    pub exit_code: i32,
}

/// Output context of one run. The hash covers command line, config and versions, never timing,
/// so equal hashes mean byte-identical reports.
pub struct Run {
    pub command_line: Vec<String>,
    pub config: Value,
    pub config_hash: String,
    pub manifest_hash: String,
    pub versions: BTreeMap<String, String>,
    outputs: Vec<String>,
    pub summary: Vec<SummaryLine>,
}

impl Run {
    pub fn new<C: Serialize>(command_line: Vec<String>, config: &C) -> Result<Self, Failure> {
        let config = canonical(serde_json::to_value(config).map_err(|e| Failure::Internal(e.to_string()))?);
        let config_hash = sha256_hex(config.to_string().as_bytes());
        let versions: BTreeMap<String, String> = [
            ("stablab-core".to_string(), stablab::VERSION.to_string()),
            ("stablab-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ]
        .into();
        let basis = serde_json::json!({ "command_line": command_line, "config_hash": config_hash, "versions": versions });
        let manifest_hash = sha256_hex(canonical(basis).to_string().as_bytes());
        Ok(Self { command_line, config, config_hash, manifest_hash, versions, outputs: Vec::new(), summary: Vec::new() })
    }

    #[must_use]
    pub fn has_outputs(&self) -> bool {
        !self.outputs.is_empty()
    }

    pub fn record(&mut self, name: impl Into<String>, pass: bool) {
        self.summary.push(SummaryLine { name: name.into(), pass });
    }

    /// Writes `value` as canonical JSON with a top-level `manifest` key.
    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<(), Failure> {
        let mut v = serde_json::to_value(value).map_err(|e| Failure::Internal(format!("serialization: {e}")))?;
        match &mut v {
            Value::Object(m) => {
                m.insert("manifest".into(), Value::String(self.manifest_hash.clone()));
            }
            other => {
                v = serde_json::json!({ "manifest": self.manifest_hash, "data": other.take() });
            }
        }
        let text = to_canonical_string(&v)? + "\n";
        write(path, text.as_bytes())?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    /// Writes the table as CSV after `# manifest=…` and any `# key=value` header lines.
    pub fn write_csv(&mut self, path: &Path, header: &[(&str, String)], table: &Table) -> Result<(), Failure> {
        write(path, csv_text(&self.manifest_hash, header, table)?.as_bytes())?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    /// JSON at `out` plus the CSV companion next to it; an empty table is refused.
    pub fn emit_report<T: Serialize>(&mut self, out: &Path, value: &T, table: &Table) -> Result<(), Failure> {
        if table.rows.is_empty() {
            return Err(Failure::Usage("nothing to report: the check list is empty".into()));
        }
        self.write_json(out, value)?;
        self.write_csv(&companion(out, "csv"), &[], table)
    }

    /// Writes `<out stem>.manifest.json`.
    pub fn finish(self, out: &Path, wall_time_seconds: f64, exit_code: i32) -> Result<PathBuf, Failure> {
        let path = companion(out, "manifest.json");
        let manifest = Manifest {
            manifest_hash: self.manifest_hash,
            command_line: self.command_line,
            config: self.config,
            config_hash: self.config_hash,
            versions: self.versions,
            wall_time_seconds,
            outputs: self.outputs,
            summary: self.summary,
            exit_code,
        };
        write(&path, (to_canonical_string(&manifest)? + "\n").as_bytes())?;
        Ok(path)
    }
}

/// CSV body preceded by `# manifest=…` and `# key=value` comment lines.
pub fn csv_text(manifest_hash: &str, header: &[(&str, String)], table: &Table) -> Result<String, Failure> {
    let mut buf = format!("# manifest={manifest_hash}\n");
    for (k, v) in header {
        buf.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.headers).map_err(|e| Failure::Internal(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    buf.push_str(&String::from_utf8_lossy(&body));
    Ok(buf)
}

/// `out` with its extension replaced by `ext`.
#[must_use]
pub fn companion(out: &Path, ext: &str) -> PathBuf {
    out.with_extension(ext)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Internal(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))
}
