//! Flat `key = value` run configuration. Keys mirror the long flag names;
//! a flag given on the command line always wins over the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::Result;

use crate::usage;

pub const KEYS: &[&str] = &[
    "zeros",
    "zeros-format",
    "checksum",
    "coverage",
    "cache-dir",
    "output",
    "format",
    "threads",
    "tol",
    "no-timestamp",
    "T",
    "alpha",
    "mode",
    "band",
    "kernel",
    "threshold",
    "grid-step",
    "x",
    "y",
    "t",
    "budget",
    "sieve-limit",
    "sigma",
    "kv-c",
    "slack",
    "t-grid",
    "x-max",
    "step",
    "bound-c",
    "samples",
    "only",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(usage(format!("line {}: expected key = value", i + 1)));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(usage(format!("line {}: unknown key {key:?}", i + 1)));
            }
            if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(usage(format!("line {}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `flag`, else the file value for `key`, else `None`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key {key}: cannot parse {v:?}: {e}"))),
        }
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        Ok(self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| usage(format!("bad number {s:?} in grid {spec:?}: {e}")))
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!("range {spec:?} must be start:stop:step")));
        }
        let (start, stop, step) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
        if !(step > 0.0) || !(stop >= start) {
            return Err(usage(format!("range {spec:?} needs step > 0 and stop >= start")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // round to suppress drift like 0.30000000000000004
        return Ok((0..=n).map(|k| round12(start + k as f64 * step)).collect());
    }
    spec.split(',').map(number).collect()
}

fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}
