//! Line-oriented job configuration: `[section]` headers and `key = value` lines.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::{Error, Point, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    /// section -> key -> (value, line)
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        let mut current = String::from("job");
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line_no, "unterminated section header"))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(Error::parse(line_no, format!("bad section name '{name}'")));
                }
                current = name.to_string();
                cfg.sections.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(line_no, "expected 'key = value'"))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::parse(line_no, "empty key"));
            }
            let sec = cfg.sections.entry(current.clone()).or_default();
            if sec.insert(k.to_string(), (v.trim().to_string(), line_no)).is_some() {
                return Err(Error::parse(line_no, format!("duplicate key '{k}' in [{current}]")));
            }
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl ToString) {
        self.sections.entry(section.to_string()).or_default().insert(key.to_string(), (value.to_string(), 0));
    }

    pub fn remove(&mut self, section: &str, key: &str) -> Option<String> {
        self.sections.get_mut(section).and_then(|s| s.remove(key)).map(|(v, _)| v)
    }

    pub fn has(&self, section: &str, key: &str) -> bool {
        self.raw(section, key).is_some()
    }

    fn raw(&self, section: &str, key: &str) -> Option<&(String, usize)> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn string(&self, section: &str, key: &str, default: &str) -> String {
        self.raw(section, key).map(|(v, _)| v.clone()).unwrap_or_else(|| default.to_string())
    }

    pub fn optional(&self, section: &str, key: &str) -> Option<String> {
        self.raw(section, key).map(|(v, _)| v.clone())
    }

    fn typed<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        match self.raw(section, key) {
            None => Ok(default),
            Some((v, line)) => v
                .parse()
                .map_err(|_| Error::parse(*line, format!("[{section}] {key}: cannot parse '{v}'"))),
        }
    }

    pub fn f64(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        self.typed(section, key, default)
    }

    pub fn usize(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        self.typed(section, key, default)
    }

    pub fn u64(&self, section: &str, key: &str, default: u64) -> Result<u64> {
        self.typed(section, key, default)
    }

    pub fn bool(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        self.typed(section, key, default)
    }

    pub fn list(&self, section: &str, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.raw(section, key) {
            None => Ok(default.to_vec()),
            Some((v, line)) => parse_list(v).map_err(|_| Error::parse(*line, format!("[{section}] {key}: bad list '{v}'"))),
        }
    }

    pub fn point(&self, section: &str, key: &str, default: Point) -> Result<Point> {
        let v = self.list(section, key, &default)?;
        if v.len() != 3 {
            let line = self.raw(section, key).map(|r| r.1).unwrap_or(0);
            return Err(Error::parse(line, format!("[{section}] {key}: expected three components")));
        }
        Ok([v[0], v[1], v[2]])
    }

    /// Rejects keys outside `allowed` (pairs of section and key).
    pub fn check_keys(&self, allowed: &[(&str, &str)]) -> Result<()> {
        for (sec, keys) in &self.sections {
            for (k, (_, line)) in keys {
                if !allowed.iter().any(|(s, a)| s == sec && a == k) {
                    return Err(Error::parse(*line, format!("unknown key '{k}' in [{sec}]")));
                }
            }
        }
        Ok(())
    }

    /// Canonical text: sorted sections and keys, normalized spacing.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for (sec, keys) in &self.sections {
            if keys.is_empty() {
                continue;
            }
            s.push_str(&format!("[{sec}]\n"));
            for (k, (v, _)) in keys {
                s.push_str(&format!("{k} = {v}\n"));
            }
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_list(v: &str) -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
    v.split(',').map(|p| p.trim()).filter(|p| !p.is_empty()).map(|p| p.parse::<f64>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sections_and_hash() {
        let a = Config::parse("seed = 3\n[ueg]\nrho0 = 1.5 # density\nscales = 4, 8,16\n").unwrap();
        assert_eq!(a.u64("job", "seed", 0).unwrap(), 3);
        assert_eq!(a.f64("ueg", "rho0", 0.0).unwrap(), 1.5);
        assert_eq!(a.list("ueg", "scales", &[]).unwrap(), vec![4.0, 8.0, 16.0]);
        let b = Config::parse("[ueg]\nscales=4, 8,16\nrho0=1.5\n[job]\nseed=3\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match Config::parse("[ueg]\nrho0 1.5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let c = Config::parse("[ueg]\n\nrho0 = abc\n").unwrap();
        match c.f64("ueg", "rho0", 0.0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(Config::parse("[a]\nx=1\nx=2\n").is_err());
        assert!(c.check_keys(&[("ueg", "scales")]).is_err());
    }
}
