//! Run configuration: defaults, a `key=value` file, then flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use euler_attractor::density::{ClassifyConfig, DEFAULT_SAMPLES, DEFAULT_TOL_ATTR};
use euler_attractor::mproots::Precision;
use euler_attractor::szego::SzegoConfig;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(CliError::Usage(format!(
                "unknown format {other:?}, expected json or csv"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision: Precision,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub alpha: f64,
    pub mu: u32,
    pub tol_real: Option<f64>,
    pub tol_attr: f64,
    /// Samples per attractor arc.
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: Precision::Auto,
            seed: 0,
            cache_dir: None,
            format: OutputFormat::Json,
            alpha: SzegoConfig::default().alpha(),
            mu: 1,
            tol_real: None,
            tol_attr: DEFAULT_TOL_ATTR,
            samples: DEFAULT_SAMPLES,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("invalid value {value:?} for {key}")))
}

/// `auto` or a bit count.
pub fn parse_precision(value: &str) -> Result<Precision, CliError> {
    match value.trim() {
        "auto" | "AUTO" => Ok(Precision::Auto),
        v => Ok(Precision::Bits(parse("precision_bits", v)?)),
    }
}

impl RunConfig {
    /// Sets one key; names use underscores or dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key.trim().replace('-', "_").as_str() {
            "precision_bits" => self.precision = parse_precision(value)?,
            "seed" => self.seed = parse(key, value)?,
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.trim().parse()?,
            "alpha" => self.alpha = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "tol_real" => {
                self.tol_real = match value.trim() {
                    "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "tol_attr" => self.tol_attr = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown configuration key {other:?}"
                )))
            }
        }
        Ok(())
    }

    /// Applies a `key=value` file; blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        SzegoConfig::new(self.alpha)?;
        self.classify().validate()?;
        if let Precision::Bits(b) = self.precision {
            if b < 64 {
                return Err(CliError::Validation(format!(
                    "precision_bits = {b} is below 64"
                )));
            }
        }
        Ok(())
    }

    pub fn classify(&self) -> ClassifyConfig {
        ClassifyConfig {
            tol_real: self.tol_real,
            tol_attr: self.tol_attr,
        }
    }

    /// Settings that affect results, recorded in every output. The cache
    /// directory and output format are left out so cached and fresh runs
    /// agree byte for byte.
    pub fn provenance(&self) -> BTreeMap<String, String> {
        let precision = match self.precision {
            Precision::Auto => "auto".to_string(),
            Precision::Bits(b) => b.to_string(),
        };
        let mut m = BTreeMap::new();
        m.insert("precision_bits".into(), precision);
        m.insert("seed".into(), self.seed.to_string());
        m.insert("alpha".into(), self.alpha.to_string());
        m.insert("mu".into(), self.mu.to_string());
        m.insert(
            "tol_real".into(),
            self.tol_real.map_or("auto".into(), |t| t.to_string()),
        );
        m.insert("tol_attr".into(), self.tol_attr.to_string());
        m.insert("samples".into(), self.samples.to_string());
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        m
    }
}
