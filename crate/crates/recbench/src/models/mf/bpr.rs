//! Pairwise ranking factorization trained on (user, seen, unseen) triples.
//!
//! Each triple contributes -ln sigmoid(x) with x the score margin between
//! the seen and unseen item, plus separate L2 penalties for the user, the
//! positive item and the negative item. Updates average the gradient over a
//! mini-batch.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::InteractionMatrix;
use crate::linalg::{dot, Mat};
use crate::models::neural::{gradient_check, GradCheckReport};
use crate::models::RecommenderModel;

#[derive(Clone, Copy, Debug)]
pub struct BprConfig {
    pub factors: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub reg_user: f64,
    pub reg_positive: f64,
    pub reg_negative: f64,
}

pub struct BprMf {
    train: InteractionMatrix,
    users: Mat,
    items: Mat,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Accumulated gradients keyed by embedding row index.
pub(crate) type RowGrads = HashMap<u32, Vec<f64>>;

/// Mean loss over the batch and the gradients it induces on every touched
/// row, as (loss, user grads, item grads).
pub(crate) fn batch_loss_and_grads(
    users: &Mat,
    items: &Mat,
    batch: &[(u32, u32, u32)],
    cfg: &BprConfig,
) -> (f64, RowGrads, RowGrads) {
    let f = users.n_cols();
    let scale = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    let mut user_grads: RowGrads = HashMap::new();
    let mut item_grads: RowGrads = HashMap::new();

    for &(u, i, j) in batch {
        let pu = users.row(u as usize);
        let qi = items.row(i as usize);
        let qj = items.row(j as usize);
        let x = dot(pu, qi) - dot(pu, qj);
        // -ln sigmoid(x), stable for both signs
        loss += scale
            * (if x >= 0.0 {
                (1.0 + (-x).exp()).ln()
            } else {
                -x + (1.0 + x.exp()).ln()
            });
        loss += scale
            * (cfg.reg_user * dot(pu, pu)
                + cfg.reg_positive * dot(qi, qi)
                + cfg.reg_negative * dot(qj, qj));

        let slope = -sigmoid(-x); // d(-ln sigmoid(x)) / dx
        let gu = user_grads.entry(u).or_insert_with(|| vec![0.0; f]);
        for k in 0..f {
            gu[k] += scale * (slope * (qi[k] - qj[k]) + 2.0 * cfg.reg_user * pu[k]);
        }
        let gi = item_grads.entry(i).or_insert_with(|| vec![0.0; f]);
        for k in 0..f {
            gi[k] += scale * (slope * pu[k] + 2.0 * cfg.reg_positive * qi[k]);
        }
        let gj = item_grads.entry(j).or_insert_with(|| vec![0.0; f]);
        for k in 0..f {
            gj[k] += scale * (-slope * pu[k] + 2.0 * cfg.reg_negative * qj[k]);
        }
    }
    (loss, user_grads, item_grads)
}

impl BprMf {
    /// Checks the analytic batch gradients against central differences at a
    /// random point. The batch pairs each user's first seen item with their
    /// first unseen one; users lacking either are left out.
    pub fn check_gradients(
        train: &InteractionMatrix,
        cfg: &BprConfig,
        seed: u64,
    ) -> GradCheckReport {
        let f = cfg.factors;
        let n_user_params = train.n_users() * f;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 0.3).unwrap();
        let mut params: Vec<f64> = (0..n_user_params + train.n_items() * f)
            .map(|_| normal.sample(&mut rng))
            .collect();

        let batch: Vec<(u32, u32, u32)> = (0..train.n_users() as u32)
            .filter_map(|u| {
                let i = *train.row(u).first()?;
                let j = (0..train.n_items() as u32).find(|&j| !train.contains(u, j))?;
                Some((u, i, j))
            })
            .collect();
        assert!(!batch.is_empty(), "no user has both a seen and an unseen item");

        let unflatten = |p: &[f64]| {
            let mut users = Mat::zeros(train.n_users(), f);
            users.data_mut().copy_from_slice(&p[..n_user_params]);
            let mut items = Mat::zeros(train.n_items(), f);
            items.data_mut().copy_from_slice(&p[n_user_params..]);
            (users, items)
        };
        let (users, items) = unflatten(&params);
        let (_, user_grads, item_grads) = batch_loss_and_grads(&users, &items, &batch, cfg);
        let mut analytic = vec![0.0; params.len()];
        for (&u, g) in &user_grads {
            analytic[u as usize * f..(u as usize + 1) * f].copy_from_slice(g);
        }
        for (&i, g) in &item_grads {
            let at = n_user_params + i as usize * f;
            analytic[at..at + f].copy_from_slice(g);
        }
        gradient_check(
            &mut |p| {
                let (users, items) = unflatten(p);
                batch_loss_and_grads(&users, &items, &batch, cfg).0
            },
            &mut params,
            &analytic,
            200,
            seed.wrapping_add(1),
        )
    }

    pub fn fit(train: &InteractionMatrix, cfg: &BprConfig, seed: u64) -> BprMf {
        assert!(cfg.factors >= 1 && cfg.batch_size >= 1);
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

        let pairs = train.pairs();
        let n_items = train.n_items() as u32;
        let steps_per_epoch = pairs.len().div_ceil(cfg.batch_size);
        let mut batch = Vec::with_capacity(cfg.batch_size);

        for _ in 0..cfg.epochs {
            for _ in 0..steps_per_epoch {
                batch.clear();
                while batch.len() < cfg.batch_size {
                    let &(u, i) = &pairs[rng.gen_range(0..pairs.len())];
                    if train.row(u).len() == train.n_items() {
                        continue; // no negative exists for this user
                    }
                    let j = loop {
                        let j = rng.gen_range(0..n_items);
                        if !train.contains(u, j) {
                            break j;
                        }
                    };
                    batch.push((u, i, j));
                }
                let (_, user_grads, item_grads) =
                    batch_loss_and_grads(&users, &items, &batch, cfg);
                for (u, g) in user_grads {
                    let row = users.row_mut(u as usize);
                    for k in 0..row.len() {
                        row[k] -= cfg.learning_rate * g[k];
                    }
                }
                for (i, g) in item_grads {
                    let row = items.row_mut(i as usize);
                    for k in 0..row.len() {
                        row[k] -= cfg.learning_rate * g[k];
                    }
                }
            }
        }
        BprMf {
            train: train.clone(),
            users,
            items,
        }
    }
}

impl RecommenderModel for BprMf {
    fn name(&self) -> &'static str {
        "BPRMF"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        self.items.mat_vec(self.users.row(user as usize))
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}
