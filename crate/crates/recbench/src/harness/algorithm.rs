//! Algorithm catalog: names, hyperparameter bags, and one fit entry point
//! that turns (kind, params, train, seed) into a trained model.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::InteractionMatrix;
use crate::models::linear::{Ease, Slim};
use crate::models::memory::{ItemKnn, MostPop, Random, Rp3Beta, Similarity, UserKnn};
use crate::models::mf::{BiasedMf, BiasedMfConfig, BprConfig, BprMf, ConfidenceScaling, Ials};
use crate::models::neural::{MultiVae, MultiVaeConfig, NeuMf, NeuMfConfig};
use crate::models::RecommenderModel;
use crate::{Error, Result};

/// One value of a hyperparameter. The untagged serde layout lets config
/// files write `topk = 100`, `alpha = 0.5`, `similarity = "cosine"`,
/// `normalization = true` without any wrapper syntax.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Flag(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Flag(v) => write!(f, "{v}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Text(v) => write!(f, "{v}"),
        }
    }
}

/// Sorted name-to-value bag. Iteration order is the key order, so anything
/// derived from it (logs, file output, sampling-independent hashing) is
/// stable.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HyperParams(pub BTreeMap<String, ParamValue>);

impl HyperParams {
    pub fn new() -> HyperParams {
        HyperParams::default()
    }

    pub fn set(mut self, key: &str, value: ParamValue) -> HyperParams {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn with_int(self, key: &str, v: i64) -> HyperParams {
        self.set(key, ParamValue::Int(v))
    }

    pub fn with_float(self, key: &str, v: f64) -> HyperParams {
        self.set(key, ParamValue::Float(v))
    }

    pub fn with_text(self, key: &str, v: &str) -> HyperParams {
        self.set(key, ParamValue::Text(v.to_string()))
    }

    pub fn with_flag(self, key: &str, v: bool) -> HyperParams {
        self.set(key, ParamValue::Flag(v))
    }

    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.0.get(key)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `other` wins on key collisions.
    pub fn overlaid_with(&self, other: &HyperParams) -> HyperParams {
        let mut merged = self.clone();
        for (k, v) in &other.0 {
            merged.0.insert(k.clone(), v.clone());
        }
        merged
    }

    pub fn int_or(&self, key: &str, default: i64) -> Result<i64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(ParamValue::Int(v)) => Ok(*v),
            Some(other) => Err(Error::Config(format!(
                "parameter `{key}` expects an integer, got `{other}`"
            ))),
        }
    }

    /// Integers are accepted where floats are expected, since config files
    /// routinely write `l2 = 100`.
    pub fn float_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(ParamValue::Float(v)) => Ok(*v),
            Some(ParamValue::Int(v)) => Ok(*v as f64),
            Some(other) => Err(Error::Config(format!(
                "parameter `{key}` expects a number, got `{other}`"
            ))),
        }
    }

    pub fn text_or(&self, key: &str, default: &str) -> Result<String> {
        match self.0.get(key) {
            None => Ok(default.to_string()),
            Some(ParamValue::Text(v)) => Ok(v.clone()),
            Some(other) => Err(Error::Config(format!(
                "parameter `{key}` expects a string, got `{other}`"
            ))),
        }
    }

    pub fn flag_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.0.get(key) {
            None => Ok(default),
            Some(ParamValue::Flag(v)) => Ok(*v),
            Some(other) => Err(Error::Config(format!(
                "parameter `{key}` expects true or false, got `{other}`"
            ))),
        }
    }

    fn usize_or(&self, key: &str, default: i64) -> Result<usize> {
        let v = self.int_or(key, default)?;
        usize::try_from(v)
            .map_err(|_| Error::Config(format!("parameter `{key}` must be non-negative, got {v}")))
    }

    /// `key=value` pairs joined by spaces, empty bag shown as `-`.
    pub fn describe(&self) -> String {
        if self.0.is_empty() {
            return "-".to_string();
        }
        self.0
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for HyperParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// The twelve benchmarked recommenders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    Random,
    MostPop,
    UserKnn,
    ItemKnn,
    Rp3Beta,
    Slim,
    Ease,
    Ials,
    BprMf,
    Mf2020,
    NeuMf,
    MultiVae,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 12] = [
        AlgorithmKind::Random,
        AlgorithmKind::MostPop,
        AlgorithmKind::UserKnn,
        AlgorithmKind::ItemKnn,
        AlgorithmKind::Rp3Beta,
        AlgorithmKind::Slim,
        AlgorithmKind::Ease,
        AlgorithmKind::Ials,
        AlgorithmKind::BprMf,
        AlgorithmKind::Mf2020,
        AlgorithmKind::NeuMf,
        AlgorithmKind::MultiVae,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::Random => "Random",
            AlgorithmKind::MostPop => "MostPop",
            AlgorithmKind::UserKnn => "UserKNN",
            AlgorithmKind::ItemKnn => "ItemKNN",
            AlgorithmKind::Rp3Beta => "RP3beta",
            AlgorithmKind::Slim => "SLIM",
            AlgorithmKind::Ease => "EASE",
            AlgorithmKind::Ials => "iALS",
            AlgorithmKind::BprMf => "BPRMF",
            AlgorithmKind::Mf2020 => "MF2020",
            AlgorithmKind::NeuMf => "NeuMF",
            AlgorithmKind::MultiVae => "MultiVAE",
        }
    }

    pub fn parse(s: &str) -> Option<AlgorithmKind> {
        AlgorithmKind::ALL
            .iter()
            .copied()
            .find(|k| k.label().eq_ignore_ascii_case(s))
    }

    /// Trains this algorithm on `train`. Parameters missing from `params`
    /// fall back to small defaults meant for smoke runs, not for accuracy.
    pub fn fit(
        self,
        train: &InteractionMatrix,
        params: &HyperParams,
        seed: u64,
    ) -> Result<Box<dyn RecommenderModel>> {
        Ok(match self {
            AlgorithmKind::Random => Box::new(Random::fit(train, seed)),
            AlgorithmKind::MostPop => Box::new(MostPop::fit(train)),
            AlgorithmKind::UserKnn => Box::new(UserKnn::fit(
                train,
                params.usize_or("topk", 100)?,
                parse_similarity(&params.text_or("similarity", "cosine")?)?,
            )),
            AlgorithmKind::ItemKnn => Box::new(ItemKnn::fit(
                train,
                params.usize_or("topk", 100)?,
                parse_similarity(&params.text_or("similarity", "cosine")?)?,
            )),
            AlgorithmKind::Rp3Beta => Box::new(Rp3Beta::fit(
                train,
                params.usize_or("topk", 100)?,
                params.float_or("alpha", 1.0)?,
                params.float_or("beta", 0.6)?,
                params.flag_or("normalization", true)?,
            )),
            AlgorithmKind::Slim => Box::new(Slim::fit(
                train,
                params.usize_or("topk", 100)?,
                params.float_or("l1_ratio", 0.1)?,
                params.float_or("alpha", 0.1)?,
            )),
            AlgorithmKind::Ease => Box::new(Ease::fit(train, params.float_or("l2", 100.0)?)?),
            AlgorithmKind::Ials => {
                let alpha = params.float_or("alpha", 1.0)?;
                let scaling = match params.text_or("scaling", "log")?.as_str() {
                    "linear" => ConfidenceScaling::Linear { alpha },
                    "log" => ConfidenceScaling::Log {
                        alpha,
                        epsilon: params.float_or("epsilon", 1.0)?,
                    },
                    other => {
                        return Err(Error::Config(format!(
                            "parameter `scaling` must be linear or log, got `{other}`"
                        )))
                    }
                };
                Box::new(Ials::fit(
                    train,
                    params.usize_or("factors", 50)?,
                    params.usize_or("epochs", 10)?,
                    params.float_or("reg", 0.01)?,
                    scaling,
                    seed,
                )?)
            }
            AlgorithmKind::BprMf => Box::new(BprMf::fit(
                train,
                &BprConfig {
                    factors: params.usize_or("factors", 64)?,
                    epochs: params.usize_or("epochs", 10)?,
                    learning_rate: params.float_or("learning_rate", 0.05)?,
                    batch_size: params.usize_or("batch_size", 256)?,
                    reg_user: params.float_or("reg_user", 0.0025)?,
                    reg_positive: params.float_or("reg_positive", 0.0025)?,
                    reg_negative: params.float_or("reg_negative", 0.0025)?,
                },
                seed,
            )),
            AlgorithmKind::Mf2020 => Box::new(BiasedMf::fit(
                train,
                &BiasedMfConfig {
                    factors: params.usize_or("factors", 64)?,
                    epochs: params.usize_or("epochs", 10)?,
                    learning_rate: params.float_or("learning_rate", 0.01)?,
                    reg: params.float_or("reg", 0.005)?,
                    negatives: params.usize_or("negatives", 4)?,
                },
                seed,
            )),
            AlgorithmKind::NeuMf => Box::new(NeuMf::fit(
                train,
                &NeuMfConfig {
                    factors: params.usize_or("factors", 16)?,
                    epochs: params.usize_or("epochs", 10)?,
                    learning_rate: params.float_or("learning_rate", 0.001)?,
                    batch_size: params.usize_or("batch_size", 256)?,
                    negatives: params.usize_or("negatives", 4)?,
                },
                seed,
            )),
            AlgorithmKind::MultiVae => Box::new(MultiVae::fit(
                train,
                &MultiVaeConfig {
                    epochs: params.usize_or("epochs", 10)?,
                    learning_rate: params.float_or("learning_rate", 0.001)?,
                    batch_size: params.usize_or("batch_size", 128)?,
                    intermediate: params.usize_or("intermediate", 600)?,
                    latent: params.usize_or("latent", 200)?,
                    reg: params.float_or("reg", 0.2)?,
                },
                seed,
            )),
        })
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmKind::parse(s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// Similarity names as used in configs, case-insensitive. `correlation` is
/// accepted as an alias for pearson.
pub fn parse_similarity(name: &str) -> Result<Similarity> {
    let mut canonical = name.to_ascii_lowercase();
    if canonical == "correlation" {
        canonical = "pearson".to_string();
    }
    Similarity::parse(&canonical)
        .ok_or_else(|| Error::Config(format!("unknown similarity `{name}`")))
}
