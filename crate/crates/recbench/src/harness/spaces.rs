//! Hyperparameter search domains for every algorithm, plus sampling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::harness::algorithm::{AlgorithmKind, HyperParams, ParamValue};

/// Sampling distribution of one hyperparameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Dist {
    /// Inclusive integer range, sampled uniformly.
    IntUniform { lo: i64, hi: i64 },
    Uniform { lo: f64, hi: f64 },
    /// Uniform in log space; bounds must be positive.
    LogUniform { lo: f64, hi: f64 },
    Choice(Vec<ParamValue>),
}

impl Dist {
    fn sample(&self, rng: &mut ChaCha8Rng) -> ParamValue {
        match self {
            Dist::IntUniform { lo, hi } => ParamValue::Int(rng.gen_range(*lo..=*hi)),
            Dist::Uniform { lo, hi } => ParamValue::Float(rng.gen_range(*lo..*hi)),
            Dist::LogUniform { lo, hi } => {
                ParamValue::Float(rng.gen_range(lo.ln()..hi.ln()).exp())
            }
            Dist::Choice(options) => options[rng.gen_range(0..options.len())].clone(),
        }
    }

    fn contains(&self, value: &ParamValue) -> bool {
        match (self, value) {
            (Dist::IntUniform { lo, hi }, ParamValue::Int(v)) => (lo..=hi).contains(&v),
            (Dist::Uniform { lo, hi }, ParamValue::Float(v))
            | (Dist::LogUniform { lo, hi }, ParamValue::Float(v)) => {
                *lo <= *v && *v <= *hi
            }
            (Dist::Choice(options), v) => options.contains(v),
            _ => false,
        }
    }
}

/// Named sampling dimensions; an empty space describes a hyperparameter-free
/// algorithm.
#[derive(Clone, Debug, Default)]
pub struct SearchSpace {
    pub dims: Vec<(String, Dist)>,
}

impl SearchSpace {
    fn dim(mut self, name: &str, dist: Dist) -> SearchSpace {
        debug_assert!(self.dims.iter().all(|(n, _)| n != name));
        match &dist {
            Dist::IntUniform { lo, hi } => assert!(lo <= hi),
            Dist::Uniform { lo, hi } => assert!(lo < hi),
            Dist::LogUniform { lo, hi } => assert!(0.0 < *lo && lo < hi),
            Dist::Choice(options) => assert!(!options.is_empty()),
        }
        self.dims.push((name.to_string(), dist));
        self
    }

    pub fn n_dims(&self) -> usize {
        self.dims.len()
    }

    /// One configuration drawn per dimension, in declaration order.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> HyperParams {
        let mut params = HyperParams::new();
        for (name, dist) in &self.dims {
            params = params.set(name, dist.sample(rng));
        }
        params
    }

    /// Whether the value fits the named dimension. `None` when the space has
    /// no such dimension.
    pub fn contains(&self, name: &str, value: &ParamValue) -> Option<bool> {
        self.dims
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d.contains(value))
    }
}

fn choice_ints(values: &[i64]) -> Dist {
    Dist::Choice(values.iter().map(|&v| ParamValue::Int(v)).collect())
}

fn choice_texts(values: &[&str]) -> Dist {
    Dist::Choice(
        values
            .iter()
            .map(|v| ParamValue::Text(v.to_string()))
            .collect(),
    )
}

const FACTOR_CHOICES: [i64; 6] = [8, 16, 32, 64, 128, 256];
const SIMILARITIES: [&str; 5] = ["cosine", "jaccard", "dice", "pearson", "euclidean"];

/// The search domain for one algorithm. Epoch counts for iALS and BPRMF are
/// deliberately absent: they are not sampled and come from the caller's
/// configuration instead.
pub fn search_space(kind: AlgorithmKind) -> SearchSpace {
    let s = SearchSpace::default;
    match kind {
        AlgorithmKind::Random | AlgorithmKind::MostPop => s(),
        AlgorithmKind::UserKnn | AlgorithmKind::ItemKnn => s()
            .dim("topk", Dist::IntUniform { lo: 5, hi: 1000 })
            .dim("similarity", choice_texts(&SIMILARITIES)),
        AlgorithmKind::Rp3Beta => s()
            .dim("topk", Dist::IntUniform { lo: 5, hi: 1000 })
            .dim("alpha", Dist::Uniform { lo: 0.0, hi: 2.0 })
            .dim("beta", Dist::Uniform { lo: 0.0, hi: 2.0 })
            .dim(
                "normalization",
                Dist::Choice(vec![ParamValue::Flag(true), ParamValue::Flag(false)]),
            ),
        AlgorithmKind::Slim => s()
            .dim("topk", Dist::IntUniform { lo: 5, hi: 1000 })
            .dim("l1_ratio", Dist::LogUniform { lo: 1e-5, hi: 1.0 })
            .dim("alpha", Dist::Uniform { lo: 0.01, hi: 1.0 }),
        AlgorithmKind::Ease => s().dim("l2", Dist::LogUniform { lo: 1.0, hi: 1e7 }),
        AlgorithmKind::Mf2020 => s()
            .dim("factors", choice_ints(&FACTOR_CHOICES))
            .dim("epochs", Dist::IntUniform { lo: 30, hi: 100 })
            .dim("learning_rate", Dist::LogUniform { lo: 1e-5, hi: 1.0 })
            .dim("reg", Dist::LogUniform { lo: 1e-5, hi: 0.1 })
            .dim("negatives", choice_ints(&[4, 6, 8])),
        AlgorithmKind::Ials => s()
            .dim("factors", Dist::IntUniform { lo: 1, hi: 200 })
            .dim("scaling", choice_texts(&["linear", "log"]))
            .dim("alpha", Dist::Uniform { lo: 0.001, hi: 50.0 })
            .dim("epsilon", Dist::Uniform { lo: 0.001, hi: 10.0 })
            .dim("reg", Dist::Uniform { lo: 0.001, hi: 0.01 }),
        AlgorithmKind::BprMf => s()
            .dim("factors", choice_ints(&FACTOR_CHOICES))
            .dim("learning_rate", Dist::LogUniform { lo: 1e-5, hi: 1.0 })
            .dim("batch_size", choice_ints(&[128, 256, 512]))
            .dim("reg_user", Dist::LogUniform { lo: 1e-5, hi: 0.1 })
            .dim("reg_positive", Dist::LogUniform { lo: 1e-5, hi: 0.1 })
            .dim("reg_negative", Dist::LogUniform { lo: 1e-5, hi: 0.1 }),
        AlgorithmKind::NeuMf => s()
            .dim("factors", choice_ints(&FACTOR_CHOICES))
            .dim("epochs", Dist::IntUniform { lo: 30, hi: 100 })
            .dim("learning_rate", Dist::LogUniform { lo: 1e-5, hi: 1.0 })
            .dim("batch_size", choice_ints(&[128, 256, 512]))
            .dim("negatives", choice_ints(&[4, 6, 8])),
        AlgorithmKind::MultiVae => s()
            .dim("epochs", Dist::IntUniform { lo: 100, hi: 300 })
            .dim("learning_rate", Dist::LogUniform { lo: 1e-5, hi: 1.0 })
            .dim("batch_size", choice_ints(&[64, 128, 256]))
            .dim("intermediate", Dist::IntUniform { lo: 400, hi: 800 })
            .dim("latent", Dist::IntUniform { lo: 100, hi: 400 })
            .dim("reg", Dist::LogUniform { lo: 1e-5, hi: 1.0 }),
    }
}

/// Search budget: 50 trials for wide spaces, 20 for narrow ones, a single
/// trial when there is nothing to choose.
pub fn default_trials(kind: AlgorithmKind) -> usize {
    match search_space(kind).n_dims() {
        0 => 1,
        1..=3 => 20,
        _ => 50,
    }
}
