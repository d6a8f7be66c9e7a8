//! `key = value` run configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const KEYS: &[&str] = &[
    "seed",
    "jobs",
    "pixel_spacing",
    "anterior_side",
    "proximal_end",
    "ranges",
    "dilate",
    "size",
    "smooth_window",
    "sample_spacing",
    "arc_ratio",
    "prune_frac",
    "window_frac",
    "folds",
    "k",
    "max_depth",
    "min_leaf",
    "lambda",
    "epochs",
    "n",
    "balance",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key = value", origin.display(), i + 1))?;
            let (k, v) = (k.trim().replace('-', "_"), v.trim().to_string());
            if !KEYS.contains(&k.as_str()) {
                bail!("{}:{}: unknown key {k:?}", origin.display(), i + 1);
            }
            values.insert(k, v);
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text, path)
    }

    /// Flag value if given, else the config value, else `None`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config key {key}: {e}")),
        }
    }

    pub fn get<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let c = Config::parse("# run\nseed = 7\nk=3 # neighbours\n\n", Path::new("c")).unwrap();
        assert_eq!(c.get::<u64>(None, "seed", 0).unwrap(), 7);
        assert_eq!(c.get(Some(9u64), "seed", 0).unwrap(), 9);
        assert_eq!(c.get::<usize>(None, "k", 5).unwrap(), 3);
        assert_eq!(c.get::<usize>(None, "epochs", 200).unwrap(), 200);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("seed 7", Path::new("c")).is_err());
        assert!(Config::parse("colour = red", Path::new("c")).is_err());
        let c = Config::parse("seed = x", Path::new("c")).unwrap();
        assert!(c.get::<u64>(None, "seed", 0).is_err());
    }
}
