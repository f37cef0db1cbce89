//! Flat key=value config files for the simulate commands. One pair per line,
//! `#` comments allowed; explicit CLI flags override config values. True
//! parameters use a `param.` prefix, e.g. `param.rho=0.5`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

const KNOWN_KEYS: [&str; 9] =
    ["reps", "n", "seed", "level", "engines", "epsilon", "draws", "bootstrap_b", "grid"];

pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Loads a config file; `None` yields an empty config (defaults apply).
    /// Unknown keys are rejected so typos surface immediately.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!("config {}:{}: expected key=value", path.display(), i + 1);
                };
                entries.insert(key.trim().to_string(), value.trim().to_string());
            }
            for key in entries.keys() {
                if !KNOWN_KEYS.contains(&key.as_str()) && !key.starts_with("param.") {
                    bail!("config {}: unknown key '{key}'", path.display());
                }
            }
        }
        Ok(ConfigFile { entries })
    }

    /// Resolution order: explicit CLI flag, then config entry, then default.
    pub fn pick<T>(&self, key: &str, cli: Option<T>, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.entries.get(key) {
            Some(raw) => raw.parse().map_err(|e| anyhow!("config {key}='{raw}': {e}")),
            None => Ok(default),
        }
    }

    /// Optional config entry with no default.
    pub fn maybe<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            Some(raw) => {
                raw.parse().map(Some).map_err(|e| anyhow!("config {key}='{raw}': {e}"))
            }
            None => Ok(None),
        }
    }

    /// Comma-separated list entry; empty when absent.
    pub fn list(&self, key: &str) -> Vec<String> {
        self.entries
            .get(key)
            .map(|raw| {
                raw.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
            })
            .unwrap_or_default()
    }

    /// All `param.NAME=value` entries as (NAME, value).
    pub fn params(&self) -> Result<Vec<(String, f64)>> {
        let mut out = Vec::new();
        for (key, raw) in &self.entries {
            if let Some(name) = key.strip_prefix("param.") {
                let value: f64 =
                    raw.parse().map_err(|e| anyhow!("config {key}='{raw}': {e}"))?;
                out.push((name.to_string(), value));
            }
        }
        Ok(out)
    }
}
