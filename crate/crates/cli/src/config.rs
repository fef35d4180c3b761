//! Key-value run configuration.
//!
//! A config file holds `key = value` lines (`#` comments allowed);
//! command-line flags override file values so a recorded config plus the
//! invocation reproduces a run exactly. The resolved settings feed the
//! config digest in every report's provenance block.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};

use overlap_core::types::TokenId;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
    /// Resolved values actually used by the command, for the config digest.
    resolved: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            let content = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            for (idx, line) in content.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| {
                        anyhow!("{}:{}: expected key = value", path.display(), idx + 1)
                    })?;
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(FileConfig {
            values,
            resolved: BTreeMap::new(),
        })
    }

    fn record(&mut self, key: &str, value: String) {
        self.resolved.insert(key.to_string(), value);
    }

    /// Resolve an optional string setting; the flag wins over the file.
    pub fn string(&mut self, key: &str, flag: Option<&String>) -> Option<String> {
        let value = flag
            .cloned()
            .or_else(|| self.values.get(key).cloned());
        if let Some(v) = &value {
            self.record(key, v.clone());
        }
        value
    }

    pub fn path(&mut self, key: &str, flag: Option<&PathBuf>) -> Option<PathBuf> {
        let value = flag
            .cloned()
            .or_else(|| self.values.get(key).map(PathBuf::from));
        if let Some(v) = &value {
            self.record(key, v.display().to_string());
        }
        value
    }

    pub fn require_path(&mut self, key: &str, flag: Option<&PathBuf>) -> Result<PathBuf> {
        self.path(key, flag)
            .ok_or_else(|| anyhow!("missing required --{} (or config key {key})", key.replace('_', "-")))
    }

    pub fn parsed<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + ToString,
        <T as FromStr>::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            self.record(key, v.to_string());
            return Ok(Some(v));
        }
        match self.values.get(key) {
            Some(raw) => {
                let parsed = raw
                    .parse::<T>()
                    .map_err(|e| anyhow!("config key {key}: {e}"))?;
                self.record(key, parsed.to_string());
                Ok(Some(parsed))
            }
            None => Ok(None),
        }
    }

    pub fn parsed_or<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + ToString,
        <T as FromStr>::Err: std::fmt::Display,
    {
        let value = self.parsed(key, flag)?.unwrap_or(default);
        self.record(key, value.to_string());
        Ok(value)
    }

    pub fn require_parsed<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + ToString,
        <T as FromStr>::Err: std::fmt::Display,
    {
        self.parsed(key, flag)?.ok_or_else(|| {
            anyhow!("missing required --{} (or config key {key})", key.replace('_', "-"))
        })
    }

    /// Comma-separated token-id list, e.g. `0,1,2,3`.
    pub fn token_set(&mut self, key: &str, flag: Option<&String>) -> Result<BTreeSet<TokenId>> {
        let raw = self.string(key, flag);
        let mut out = BTreeSet::new();
        if let Some(raw) = raw {
            for field in raw.split(',').filter(|f| !f.trim().is_empty()) {
                let id: u32 = field
                    .trim()
                    .parse()
                    .map_err(|_| anyhow!("{key}: malformed token id {field:?}"))?;
                out.insert(TokenId(id));
            }
        }
        Ok(out)
    }

    /// Comma-separated layer list with `a-b` ranges, e.g. `1-12` or `1,5,6`.
    pub fn layer_list(&mut self, key: &str, flag: Option<&String>) -> Result<Option<Vec<u32>>> {
        let raw = match self.string(key, flag) {
            Some(raw) => raw,
            None => return Ok(None),
        };
        let mut layers = Vec::new();
        for field in raw.split(',').filter(|f| !f.trim().is_empty()) {
            let field = field.trim();
            if let Some((lo, hi)) = field.split_once('-') {
                let lo: u32 = lo
                    .trim()
                    .parse()
                    .map_err(|_| anyhow!("{key}: malformed layer {lo:?}"))?;
                let hi: u32 = hi
                    .trim()
                    .parse()
                    .map_err(|_| anyhow!("{key}: malformed layer {hi:?}"))?;
                if lo > hi {
                    return Err(anyhow!("{key}: empty layer range {field:?}"));
                }
                layers.extend(lo..=hi);
            } else {
                layers.push(
                    field
                        .parse()
                        .map_err(|_| anyhow!("{key}: malformed layer {field:?}"))?,
                );
            }
        }
        layers.sort_unstable();
        layers.dedup();
        Ok(Some(layers))
    }

    /// Canonical `key=value` lines of everything this command resolved.
    pub fn resolved_canonical(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.resolved {
            out.push_str(key);
            out.push('=');
            out.push_str(value);
            out.push('\n');
        }
        out
    }
}
