//! `key=value` parameter resolution.
//!
//! Sources are layered: config file, then positional `key=value` arguments,
//! then dedicated flags. Every key a command reads is recorded together with
//! its resolved value (defaults included) so it can be echoed into the CSV
//! header. Keys nobody reads are rejected by [`Params::finish`].

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
    used: Vec<String>,
    resolved: Vec<(String, String)>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn split_pair(raw: &str, origin: &str) -> Result<(String, String), CliError> {
    let (k, v) = raw
        .split_once('=')
        .ok_or_else(|| config_err(format!("{origin}: expected key=value, got `{raw}`")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(config_err(format!("{origin}: empty key in `{raw}`")));
    }
    Ok((k.to_string(), v.to_string()))
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_pair(line, &format!("{}:{}", path.display(), no + 1))?;
            self.values.insert(k, v);
        }
        Ok(())
    }

    pub fn set_pair(&mut self, raw: &str) -> Result<(), CliError> {
        let (k, v) = split_pair(raw, "argument")?;
        self.values.insert(k, v);
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.values.get(key).cloned()
    }

    fn record(&mut self, key: &str, value: String) {
        if let Some(slot) = self.resolved.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            self.resolved.push((key.to_string(), value));
        }
    }

    fn parsed<T, F>(&mut self, key: &str, default: T, parse: F, show: fn(&T) -> String) -> Result<T, CliError>
    where
        F: Fn(&str) -> Option<T>,
    {
        let value = match self.raw(key) {
            Some(s) => parse(&s).ok_or_else(|| config_err(format!("invalid value for {key}: `{s}`")))?,
            None => default,
        };
        self.record(key, show(&value));
        Ok(value)
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        self.parsed(key, default, parse_real, |v| fmt_real(*v))
    }

    /// Accepts `inf`, plain linear values, or values suffixed with `dB`.
    pub fn level(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        self.parsed(key, default, parse_level, |v| fmt_real(*v))
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        self.parsed(key, default, |s| s.parse().ok(), |v| v.to_string())
    }

    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64, CliError> {
        self.parsed(key, default, |s| s.parse().ok(), |v| v.to_string())
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            Some(s) => {
                let v = parse_real(&s).ok_or_else(|| config_err(format!("invalid value for {key}: `{s}`")))?;
                self.record(key, fmt_real(v));
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    pub fn opt_usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        match self.raw(key) {
            Some(s) => {
                let v = s.parse().map_err(|_| config_err(format!("invalid value for {key}: `{s}`")))?;
                self.record(key, format!("{v}"));
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    pub fn string(&mut self, key: &str, default: &str) -> Result<String, CliError> {
        self.parsed(key, default.to_string(), |s| Some(s.to_string()), |v| v.clone())
    }

    pub fn opt_string(&mut self, key: &str) -> Option<String> {
        let v = self.raw(key);
        if let Some(s) = &v {
            self.record(key, s.clone());
        }
        v
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        self.parsed(
            key,
            default.to_vec(),
            |s| parse_list(s, parse_real),
            |v| v.iter().map(|x| fmt_real(*x)).collect::<Vec<_>>().join(","),
        )
    }

    pub fn usize_list(&mut self, key: &str, default: &[usize]) -> Result<Vec<usize>, CliError> {
        self.parsed(
            key,
            default.to_vec(),
            |s| parse_list(s, |t| t.parse().ok()),
            |v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        )
    }

    /// Reads a value without echoing it to the header.
    pub fn hidden_usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            Some(s) => s.parse().map_err(|_| config_err(format!("invalid value for {key}: `{s}`"))),
            None => Ok(default),
        }
    }

    pub fn hidden_string(&mut self, key: &str) -> Option<String> {
        self.raw(key)
    }

    /// Same raw values and consumed keys, fresh header record.
    pub fn fork(&self) -> Self {
        Self {
            values: self.values.clone(),
            used: self.used.clone(),
            resolved: Vec::new(),
        }
    }

    /// Overrides what the header shows for `key`.
    pub fn record_raw(&mut self, key: &str, value: String) {
        self.record(key, value);
    }

    /// Fails on any key that no getter asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !self.used.iter().any(|u| u == *k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(config_err(format!("unknown key(s) for this experiment: {}", unknown.join(", "))))
        }
    }

    pub fn resolved(&self) -> &[(String, String)] {
        &self.resolved
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        t => t.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

fn parse_level(s: &str) -> Option<f64> {
    let t = s.trim();
    match t.strip_suffix("dB").or_else(|| t.strip_suffix("db")) {
        Some(db) => parse_real(db.trim()).map(|v| 10f64.powf(v / 10.0)),
        None => parse_real(t),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    let items: Option<Vec<T>> = s.split(',').map(|t| item(t.trim())).collect();
    items.filter(|v| !v.is_empty())
}

/// Shortest round-trip decimal form; `inf` for infinity, empty for NaN.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}
