//! `key=value` configuration files and the flag > file > default merge.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

/// Seed used when neither a flag nor the config file sets one.
pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_WORKERS: usize = 1;

const KEYS: [&str; 6] = ["seed", "workers", "paths", "dt", "cells", "family"];

/// Values read from a config file. `param.<name>=v` lines become family
/// parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub values: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = FileConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim().to_string());
            if let Some(p) = k.strip_prefix("param.") {
                cfg.params.insert(p.to_string(), v);
            } else if KEYS.contains(&k) {
                cfg.values.insert(k.to_string(), v);
            } else {
                return Err(CliError::Usage(format!("config line {}: unknown key {k:?}", n + 1)));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        FileConfig::parse(&text)
    }

    /// The flag if given, else the file value, else `None`.
    pub fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config value {key}={raw:?} is invalid"))),
        }
    }

    /// File parameters overridden by flag parameters.
    pub fn merged_params(&self, flags: &BTreeMap<String, String>) -> BTreeMap<String, String> {
        let mut out = self.params.clone();
        out.extend(flags.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }
}

/// Parses `k=v` as given to `--param`.
pub fn parse_param(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected k=v, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_merges() {
        let cfg = FileConfig::parse("# comment\nseed = 7\nparam.mu=2\n\nparam.sigma=3\nworkers=2\n").unwrap();
        assert_eq!(cfg.pick::<u64>(None, "seed").unwrap(), Some(7));
        assert_eq!(cfg.pick(Some(9u64), "seed").unwrap(), Some(9));
        assert_eq!(cfg.pick::<usize>(None, "paths").unwrap(), None);
        let flags = BTreeMap::from([("mu".to_string(), "5".to_string())]);
        let p = cfg.merged_params(&flags);
        assert_eq!(p["mu"], "5");
        assert_eq!(p["sigma"], "3");
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(FileConfig::parse("seed").is_err());
        assert!(FileConfig::parse("colour=red").is_err());
        let cfg = FileConfig::parse("seed=abc").unwrap();
        assert!(cfg.pick::<u64>(None, "seed").is_err());
    }

    #[test]
    fn param_syntax() {
        assert_eq!(parse_param("g=2.5").unwrap(), ("g".into(), "2.5".into()));
        assert!(parse_param("g").is_err());
        assert!(parse_param("=1").is_err());
    }
}
