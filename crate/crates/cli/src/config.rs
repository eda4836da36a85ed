//! Flat `key = value` configuration files. Keys are the long flag names.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const KEYS: &[&str] = &[
    "beta", "alpha", "x", "y", "lambda", "eps", "stop", "start", "m", "n", "seed", "format", "out",
    "y-start", "y-step", "y-max", "samples", "max-iter", "method",
];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!(crate::UsageError(format!(
                    "config line {}: expected key = value",
                    i + 1
                )));
            };
            let k = k.trim().trim_start_matches("--").replace('_', "-");
            if !KEYS.contains(&k.as_str()) {
                bail!(crate::UsageError(format!(
                    "config line {}: unknown key '{k}'",
                    i + 1
                )));
            }
            values.insert(k, v.trim().to_owned());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}
