//! TOML experiment description: dataset, preprocessing, split shape, and
//! the algorithm roster.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::corpus::InputFormat;
use crate::harness::algorithm::{AlgorithmKind, HyperParams};
use crate::harness::presets::{canonical_tag, preset};
use crate::harness::runner::AlgorithmSpec;
use crate::{Error, Result};

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_ENV: &str = "RECBENCH_OUT";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_cutoffs")]
    pub cutoffs: Vec<usize>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub algorithms: Vec<AlgorithmConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: String,
    /// Ratings at or below this are dropped before anything else happens.
    #[serde(default = "default_threshold")]
    pub rating_threshold: f64,
    /// Minimum interactions per user and per item; 0 disables the filter.
    #[serde(default)]
    pub core: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: String,
    /// Display label; defaults to the algorithm name.
    pub name: Option<String>,
    /// Dataset tag whose published tuned values seed the parameters.
    pub preset: Option<String>,
    /// Explicit values; these win over the preset on key collisions.
    #[serde(default)]
    pub params: HyperParams,
}

fn default_cutoffs() -> Vec<usize> {
    vec![10, 20]
}
fn default_repeats() -> usize {
    5
}
fn default_test_fraction() -> f64 {
    0.2
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_format() -> String {
    "csv".to_string()
}
fn default_threshold() -> f64 {
    3.0
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoffs.is_empty() {
            return Err(Error::Config("cutoffs must not be empty".into()));
        }
        if self.cutoffs.contains(&0) {
            return Err(Error::Config("cutoffs must be positive".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must lie strictly between 0 and 1, got {}",
                self.test_fraction
            )));
        }
        self.dataset.input_format()?;
        for alg in &self.algorithms {
            let kind = AlgorithmKind::parse(&alg.kind).ok_or_else(|| {
                Error::Config(format!("unknown algorithm kind `{}`", alg.kind))
            })?;
            if let Some(tag) = &alg.preset {
                if preset(kind, tag).is_none() {
                    return Err(Error::Config(format!(
                        "no preset tag `{tag}`; expected movielens, amazon, or epinions"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Materializes the roster, merging preset values under explicit ones.
    pub fn resolved_algorithms(&self) -> Result<Vec<AlgorithmSpec>> {
        self.algorithms
            .iter()
            .map(|alg| {
                let kind = AlgorithmKind::parse(&alg.kind)
                    .ok_or_else(|| Error::Config(format!("unknown algorithm kind `{}`", alg.kind)))?;
                let base = match &alg.preset {
                    Some(tag) => preset(kind, tag).ok_or_else(|| {
                        Error::Config(format!("no preset tag `{tag}`"))
                    })?,
                    None => HyperParams::new(),
                };
                let params = base.overlaid_with(&alg.params);
                let label = alg.name.clone().unwrap_or_else(|| kind.label().to_string());
                Ok(AlgorithmSpec::labeled(&label, kind, params))
            })
            .collect()
    }

    /// Output directory, with the `RECBENCH_OUT` environment variable
    /// taking precedence over the configured value.
    pub fn resolve_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }

    /// The preset tag this dataset maps onto, when its name is recognized.
    pub fn dataset_tag(&self) -> Option<&'static str> {
        canonical_tag(&self.dataset.name)
    }
}

impl DatasetConfig {
    pub fn input_format(&self) -> Result<InputFormat> {
        match self.format.as_str() {
            "csv" => Ok(InputFormat::csv()),
            "tsv" => Ok(InputFormat::tsv()),
            "movielens" => Ok(InputFormat::movielens()),
            "trust" => Ok(InputFormat::trust_edges()),
            "unary" => Ok(InputFormat::csv().unary()),
            other => Err(Error::Config(format!(
                "unknown input format `{other}`; expected csv, tsv, movielens, trust, or unary"
            ))),
        }
    }
}
