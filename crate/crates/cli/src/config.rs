//! Experiment configuration: defaults, a flat key-value config file, and
//! command-line overrides, with precedence CLI > file > defaults.

use sdelab::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: String,
    pub horizon: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub samples: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: "ex3".into(),
            horizon: 2.0,
            k_min: 1,
            k_max: 16,
            samples: 100_000,
            seed: 0,
            out: None,
            svg: None,
        }
    }
}

/// Unvalidated overrides collected from a config file or the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub horizon: Option<f64>,
    pub k_min: Option<u32>,
    pub k_max: Option<u32>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub quick: bool,
    pub full: bool,
}

impl Overrides {
    /// Parse a flat `key = value` file. Lines starting with `#` and blank
    /// lines are ignored.
    pub fn from_file(path: &Path) -> Result<Overrides> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Domain(format!("cannot read config {}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Domain(format!(
                    "{}:{}: expected `key = value`, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut o = Overrides::default();
        for (key, value) in map {
            let bad = |e: &dyn std::fmt::Display| {
                Error::Domain(format!("config key {key}: bad value {value:?} ({e})"))
            };
            match key.as_str() {
                "model" => o.model = Some(value),
                "T" | "horizon" => o.horizon = Some(value.parse().map_err(|e| bad(&e))?),
                "k_min" => o.k_min = Some(value.parse().map_err(|e| bad(&e))?),
                "k_max" => o.k_max = Some(value.parse().map_err(|e| bad(&e))?),
                "samples" => o.samples = Some(value.parse().map_err(|e| bad(&e))?),
                "seed" => o.seed = Some(value.parse().map_err(|e| bad(&e))?),
                "out" => o.out = Some(PathBuf::from(value)),
                "svg" => o.svg = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::Domain(format!("unknown config key {other:?}")));
                }
            }
        }
        Ok(o)
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        // presets first so explicit keys can override them
        if self.quick {
            cfg.k_max = 10;
            cfg.samples = 10_000;
        }
        if self.full {
            // the full-scale run: 2^30 steps, documented as long-running
            cfg.k_max = 30;
            cfg.samples = 100_000;
        }
        if let Some(v) = &self.model {
            cfg.model = v.clone();
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.k_min {
            cfg.k_min = v;
        }
        if let Some(v) = self.k_max {
            cfg.k_max = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = &self.svg {
            cfg.svg = Some(v.clone());
        }
    }
}

/// Resolve defaults, then the config file, then command-line overrides.
pub fn resolve(file: Option<&Path>, cli: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = file {
        Overrides::from_file(path)?.apply(&mut cfg);
    }
    cli.apply(&mut cfg);
    if cfg.k_min == 0 || cfg.k_min > cfg.k_max {
        return Err(Error::Domain(format!(
            "need 1 <= k_min <= k_max, got {}..{}",
            cfg.k_min, cfg.k_max
        )));
    }
    if cfg.quickly_invalid() {
        return Err(Error::Domain("samples must be positive".into()));
    }
    Ok(cfg)
}

impl ExperimentConfig {
    fn quickly_invalid(&self) -> bool {
        self.samples == 0
    }

    pub fn levels(&self) -> Vec<u32> {
        (self.k_min..=self.k_max).collect()
    }
}
