//! Biased dot-product factorization trained pointwise with a logistic loss.
//!
//! For every training positive the optimizer also visits a fixed number of
//! sampled unseen items labelled 0. Updates are plain per-sample SGD; the
//! L2 penalty decays every touched parameter except the global bias.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::InteractionMatrix;
use crate::linalg::{dot, Mat};
use crate::models::neural::{gradient_check, GradCheckReport};
use crate::models::RecommenderModel;

#[derive(Clone, Copy, Debug)]
pub struct BiasedMfConfig {
    pub factors: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub reg: f64,
    pub negatives: usize,
}

pub struct BiasedMf {
    train: InteractionMatrix,
    users: Mat,
    items: Mat,
    user_bias: Vec<f64>,
    item_bias: Vec<f64>,
    global_bias: f64,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl BiasedMf {
    fn logit(&self, u: usize, i: usize) -> f64 {
        self.global_bias
            + self.user_bias[u]
            + self.item_bias[i]
            + dot(self.users.row(u), self.items.row(i))
    }

    /// One SGD visit of (u, i, label).
    fn update(&mut self, u: usize, i: usize, label: f64, lr: f64, reg: f64) {
        let err = sigmoid(self.logit(u, i)) - label;
        let f = self.users.n_cols();
        for k in 0..f {
            let pu = self.users.get(u, k);
            let qi = self.items.get(i, k);
            self.users.set(u, k, pu - lr * (err * qi + reg * pu));
            self.items.set(i, k, qi - lr * (err * pu + reg * qi));
        }
        self.user_bias[u] -= lr * (err + reg * self.user_bias[u]);
        self.item_bias[i] -= lr * (err + reg * self.item_bias[i]);
        self.global_bias -= lr * err;
    }

    pub fn fit(train: &InteractionMatrix, cfg: &BiasedMfConfig, seed: u64) -> BiasedMf {
        assert!(cfg.factors >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 0.01).unwrap();
        let mut users = Mat::zeros(train.n_users(), cfg.factors);
        let mut items = Mat::zeros(train.n_items(), cfg.factors);
        for v in users.data_mut() {
            *v = normal.sample(&mut rng);
        }
        for v in items.data_mut() {
            *v = normal.sample(&mut rng);
        }
        let mut model = BiasedMf {
            train: train.clone(),
            users,
            items,
            user_bias: vec![0.0; train.n_users()],
            item_bias: vec![0.0; train.n_items()],
            global_bias: 0.0,
        };

        let mut positives = train.pairs();
        let n_items = train.n_items() as u32;
        for _ in 0..cfg.epochs {
            positives.shuffle(&mut rng);
            for &(u, i) in &positives {
                model.update(u as usize, i as usize, 1.0, cfg.learning_rate, cfg.reg);
                if train.row(u).len() == train.n_items() {
                    continue;
                }
                for _ in 0..cfg.negatives {
                    let j = loop {
                        let j = rng.gen_range(0..n_items);
                        if !train.contains(u, j) {
                            break j;
                        }
                    };
                    model.update(u as usize, j as usize, 0.0, cfg.learning_rate, cfg.reg);
                }
            }
        }
        model
    }

    /// Per-sample loss matching `update`: binary cross entropy plus half the
    /// decay strength on the touched parameters.
    fn sample_loss(&self, u: usize, i: usize, label: f64, reg: f64) -> f64 {
        let x = self.logit(u, i);
        let bce = if x >= 0.0 {
            (1.0 - label) * x + (1.0 + (-x).exp()).ln()
        } else {
            -label * x + (1.0 + x.exp()).ln()
        };
        let pu = self.users.row(u);
        let qi = self.items.row(i);
        bce + 0.5
            * reg
            * (dot(pu, pu)
                + dot(qi, qi)
                + self.user_bias[u] * self.user_bias[u]
                + self.item_bias[i] * self.item_bias[i])
    }

    /// Checks the gradient formulas applied by `update` against central
    /// differences of `sample_loss` at a random point. Samples pair each
    /// user's first seen item (label 1) with their first unseen one (label 0).
    pub fn check_gradients(
        train: &InteractionMatrix,
        cfg: &BiasedMfConfig,
        seed: u64,
    ) -> GradCheckReport {
        let f = cfg.factors;
        assert!(f >= 1);
        let (nu, ni) = (train.n_users(), train.n_items());
        let bias_at = (nu + ni) * f;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 0.3).unwrap();
        let mut params: Vec<f64> = (0..bias_at + nu + ni + 1)
            .map(|_| normal.sample(&mut rng))
            .collect();

        let mut samples: Vec<(usize, usize, f64)> = Vec::new();
        for u in 0..nu {
            if let Some(&i) = train.row(u as u32).first() {
                samples.push((u, i as usize, 1.0));
            }
            if let Some(j) = (0..ni as u32).find(|&j| !train.contains(u as u32, j)) {
                samples.push((u, j as usize, 0.0));
            }
        }
        assert!(!samples.is_empty(), "empty training matrix");

        let rebuild = |p: &[f64]| -> BiasedMf {
            let mut users = Mat::zeros(nu, f);
            users.data_mut().copy_from_slice(&p[..nu * f]);
            let mut items = Mat::zeros(ni, f);
            items.data_mut().copy_from_slice(&p[nu * f..bias_at]);
            BiasedMf {
                train: train.clone(),
                users,
                items,
                user_bias: p[bias_at..bias_at + nu].to_vec(),
                item_bias: p[bias_at + nu..bias_at + nu + ni].to_vec(),
                global_bias: p[bias_at + nu + ni],
            }
        };

        let model = rebuild(&params);
        let mut analytic = vec![0.0; params.len()];
        for &(u, i, label) in &samples {
            let err = sigmoid(model.logit(u, i)) - label;
            for k in 0..f {
                analytic[u * f + k] +=
                    err * model.items.get(i, k) + cfg.reg * model.users.get(u, k);
                analytic[(nu + i) * f + k] +=
                    err * model.users.get(u, k) + cfg.reg * model.items.get(i, k);
            }
            analytic[bias_at + u] += err + cfg.reg * model.user_bias[u];
            analytic[bias_at + nu + i] += err + cfg.reg * model.item_bias[i];
            analytic[bias_at + nu + ni] += err;
        }
        gradient_check(
            &mut |p| {
                let probe = rebuild(p);
                samples
                    .iter()
                    .map(|&(u, i, l)| probe.sample_loss(u, i, l, cfg.reg))
                    .sum()
            },
            &mut params,
            &analytic,
            200,
            seed.wrapping_add(1),
        )
    }
}

impl RecommenderModel for BiasedMf {
    fn name(&self) -> &'static str {
        "MF2020"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        let u = user as usize;
        let base = self.global_bias + self.user_bias[u];
        self.items
            .mat_vec(self.users.row(u))
            .into_iter()
            .zip(&self.item_bias)
            .map(|(d, b)| base + b + d)
            .collect()
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}
