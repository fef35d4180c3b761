//! Report plumbing: provenance headers, digests, atomic writes and the
//! json/csv/tsv format switch.
//!
//! Reports are pure functions of the resolved config and the input files:
//! no timestamps, fixed field order, 6-decimal floats in csv/tsv and
//! full-precision floats in json, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Tsv,
}

impl ReportFormat {
    pub fn separator(self) -> char {
        match self {
            ReportFormat::Csv => ',',
            _ => '\t',
        }
    }
}

impl FromStr for ReportFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(anyhow!("unknown format {other:?} (expected json, csv or tsv)")),
        }
    }
}

impl std::fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReportFormat::Json => write!(f, "json"),
            ReportFormat::Csv => write!(f, "csv"),
            ReportFormat::Tsv => write!(f, "tsv"),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").expect("writing to String cannot fail");
    }
    out
}

/// Run provenance attached to every report: tool version, a digest of the
/// resolved configuration and digests of the input files.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool_version: &'static str,
    pub config_digest: String,
    pub input_digests: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(resolved_config: &str, inputs: &[&Path]) -> Result<Self> {
        let mut input_digests = BTreeMap::new();
        for path in inputs {
            let bytes = std::fs::read(path)
                .with_context(|| format!("reading input {}", path.display()))?;
            input_digests.insert(path.display().to_string(), sha256_hex(&bytes));
        }
        Ok(Provenance {
            tool_version: env!("CARGO_PKG_VERSION"),
            config_digest: sha256_hex(resolved_config.as_bytes()),
            input_digests,
        })
    }

    /// `# key=value` comment lines for tabular formats.
    pub fn comment_lines(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool_version={}", self.tool_version);
        let _ = writeln!(out, "# config_digest={}", self.config_digest);
        for (path, digest) in &self.input_digests {
            let _ = writeln!(out, "# input {path} sha256={digest}");
        }
        out
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Write a file atomically: temp sibling plus rename, creating parent
/// directories as needed.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| anyhow!("invalid output path {}", path.display()))?;
    let mut tmp = PathBuf::from(path);
    tmp.set_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}

/// Write to the output path, or stdout when none is given.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .context("writing to stdout")?;
            Ok(())
        }
    }
}

/// Fixed 6-decimal rendering for tabular output.
pub fn fixed6(value: f64) -> String {
    format!("{value:.6}")
}

/// One-row table with a provenance comment header.
pub fn tabular_report(
    provenance: &Provenance,
    format: ReportFormat,
    header: &[&str],
    row: &[String],
) -> String {
    let sep = format.separator();
    let mut out = provenance.comment_lines();
    let _ = writeln!(out, "{}", header.join(&sep.to_string()));
    let _ = writeln!(out, "{}", row.join(&sep.to_string()));
    out
}
