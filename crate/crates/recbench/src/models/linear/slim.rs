//! Sparse item-item weights by per-column elastic-net coordinate descent
//! with nonnegativity and an excluded diagonal.
//!
//! Regularization follows the convention that scales the mean squared error
//! by the user count: in absolute terms the column objective is
//! 0.5 ||y - Xw||^2 + m a r ||w||_1 + 0.5 m a (1 - r) ||w||^2 with m users,
//! strength a and mix r. Only items co-occurring with the target can enter:
//! under nonnegativity every other coordinate has a nonpositive gradient
//! correlation and stays at zero.

use rayon::prelude::*;

use crate::corpus::InteractionMatrix;
use crate::models::RecommenderModel;

const SWEEP_CAP: usize = 100;
const REL_TOL: f64 = 1e-4;

pub struct Slim {
    train: InteractionMatrix,
    /// rows[i] holds (j, w) meaning item i contributes w to item j's score.
    rows: Vec<Vec<(u32, f64)>>,
}

pub(crate) struct ColumnFit {
    /// (item, weight) pairs with weight > 0, unordered.
    pub weights: Vec<(u32, f64)>,
    /// Column objective after each sweep; descent proofs read it.
    pub objective_trace: Vec<f64>,
}

/// Coordinate descent for one target column.
pub(crate) fn fit_column(
    target: u32,
    columns: &[Vec<u32>],
    n_users: usize,
    lambda1: f64,
    lambda2: f64,
) -> ColumnFit {
    // candidates must co-occur with the target
    let mut cooccur = vec![0u32; columns.len()];
    let target_users = &columns[target as usize];
    let mut user_in_target = vec![false; n_users];
    for &u in target_users {
        user_in_target[u as usize] = true;
    }
    for (i, col) in columns.iter().enumerate() {
        if i == target as usize {
            continue;
        }
        cooccur[i] = col
            .iter()
            .filter(|&&u| user_in_target[u as usize])
            .count() as u32;
    }
    let candidates: Vec<u32> = (0..columns.len() as u32)
        .filter(|&i| cooccur[i as usize] > 0)
        .collect();

    let mut residual = vec![0.0f64; n_users];
    for &u in target_users {
        residual[u as usize] = 1.0;
    }
    let mut weights = vec![0.0f64; candidates.len()];
    let mut trace = Vec::new();

    let objective = |residual: &[f64], weights: &[f64]| {
        let sq: f64 = residual.iter().map(|r| r * r).sum();
        let l1: f64 = weights.iter().sum();
        let l2: f64 = weights.iter().map(|w| w * w).sum();
        0.5 * sq + lambda1 * l1 + 0.5 * lambda2 * l2
    };

    let sweep = |active_only: bool, weights: &mut [f64], residual: &mut [f64]| -> f64 {
        let mut max_delta = 0.0f64;
        for (slot, &i) in candidates.iter().enumerate() {
            let w_old = weights[slot];
            if active_only && w_old == 0.0 {
                continue;
            }
            let col = &columns[i as usize];
            let d_i = col.len() as f64;
            let mut rho = d_i * w_old;
            for &u in col {
                rho += residual[u as usize];
            }
            let w_new = ((rho - lambda1) / (d_i + lambda2)).max(0.0);
            let delta = w_new - w_old;
            if delta != 0.0 {
                for &u in col {
                    residual[u as usize] -= delta;
                }
                weights[slot] = w_new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    };

    let mut sweeps = 0;
    let converged = |max_delta: f64, weights: &[f64]| {
        let scale = weights.iter().fold(0.0f64, |m, w| m.max(w.abs())).max(1e-12);
        max_delta / scale < REL_TOL
    };
    // alternate: one pass over everything, then cheap passes over the active
    // set until they stall, then re-check everything
    loop {
        let full_delta = sweep(false, &mut weights, &mut residual);
        sweeps += 1;
        trace.push(objective(&residual, &weights));
        if converged(full_delta, &weights) || sweeps >= SWEEP_CAP {
            break;
        }
        loop {
            let active_delta = sweep(true, &mut weights, &mut residual);
            sweeps += 1;
            trace.push(objective(&residual, &weights));
            if converged(active_delta, &weights) || sweeps >= SWEEP_CAP {
                break;
            }
        }
        if sweeps >= SWEEP_CAP {
            break;
        }
    }

    ColumnFit {
        weights: candidates
            .into_iter()
            .zip(weights)
            .filter(|&(_, w)| w > 0.0)
            .collect(),
        objective_trace: trace,
    }
}

impl Slim {
    pub fn fit(train: &InteractionMatrix, k: usize, l1_ratio: f64, alpha: f64) -> Slim {
        assert!((0.0..=1.0).contains(&l1_ratio), "mix must be in [0, 1]");
        assert!(alpha > 0.0, "strength must be positive");
        let n_users = train.n_users();
        let n_items = train.n_items();
        let columns = train.transpose();
        let m = n_users as f64;
        let lambda1 = m * alpha * l1_ratio;
        let lambda2 = m * alpha * (1.0 - l1_ratio);

        let per_column: Vec<Vec<(u32, f64)>> = (0..n_items as u32)
            .into_par_iter()
            .map(|j| {
                let mut fit = fit_column(j, &columns, n_users, lambda1, lambda2).weights;
                let rank = |x: &(u32, f64), y: &(u32, f64)| {
                    y.1.total_cmp(&x.1).then(x.0.cmp(&y.0))
                };
                let keep = k.min(fit.len());
                if keep < fit.len() {
                    fit.select_nth_unstable_by(keep.saturating_sub(1), rank);
                    fit.truncate(keep);
                }
                fit.sort_unstable_by(rank);
                fit
            })
            .collect();

        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_items];
        for (j, list) in per_column.iter().enumerate() {
            for &(i, w) in list {
                rows[i as usize].push((j as u32, w));
            }
        }
        Slim {
            train: train.clone(),
            rows,
        }
    }

    /// Count of stored nonzero weights.
    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Per-sweep column objectives for every target column, under the same
    /// penalty scaling as [`Slim::fit`]. The solver only ever lowers these;
    /// descent audits assert that from the outside.
    pub fn sweep_objectives(
        train: &InteractionMatrix,
        l1_ratio: f64,
        alpha: f64,
    ) -> Vec<Vec<f64>> {
        assert!((0.0..=1.0).contains(&l1_ratio), "mix must be in [0, 1]");
        assert!(alpha > 0.0, "strength must be positive");
        let n_users = train.n_users();
        let columns = train.transpose();
        let m = n_users as f64;
        let lambda1 = m * alpha * l1_ratio;
        let lambda2 = m * alpha * (1.0 - l1_ratio);
        (0..train.n_items() as u32)
            .map(|j| fit_column(j, &columns, n_users, lambda1, lambda2).objective_trace)
            .collect()
    }
}

impl RecommenderModel for Slim {
    fn name(&self) -> &'static str {
        "SLIM"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        let mut scores = vec![0.0; self.train.n_items()];
        for &i in self.train.row(user) {
            for &(j, w) in &self.rows[i as usize] {
                scores[j as usize] += w;
            }
        }
        scores
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}
