//! Three-hop random walk with popularity suppression.
//!
//! The item-to-item weight aggregates walk probabilities item -> user -> item
//! with every transition probability raised to alpha, then divides by the
//! destination's popularity raised to beta. A user's score for j is the sum
//! of weights from their profile items; the constant user -> item first hop
//! scales all of a user's scores equally and is dropped.

use rayon::prelude::*;

use crate::corpus::InteractionMatrix;
use crate::models::RecommenderModel;

pub struct Rp3Beta {
    train: InteractionMatrix,
    /// Sparse rows of the pruned, reweighted walk matrix.
    rows: Vec<Vec<(u32, f64)>>,
}

impl Rp3Beta {
    pub fn fit(
        train: &InteractionMatrix,
        k: usize,
        alpha: f64,
        beta: f64,
        normalize: bool,
    ) -> Rp3Beta {
        let n_items = train.n_items();
        let columns = train.transpose();
        let item_degree: Vec<usize> = columns.iter().map(|c| c.len()).collect();
        let user_degree: Vec<usize> = train.rows().iter().map(|r| r.len()).collect();
        let pop_penalty: Vec<f64> = item_degree
            .iter()
            .map(|&d| if d == 0 { 1.0 } else { (d as f64).powf(beta) })
            .collect();

        let rows: Vec<Vec<(u32, f64)>> = (0..n_items)
            .into_par_iter()
            .map(|i| {
                let d_i = item_degree[i];
                if d_i == 0 {
                    return Vec::new();
                }
                let leave_i = (1.0 / d_i as f64).powf(alpha);
                let mut dense = vec![0.0f64; n_items];
                for &v in &columns[i] {
                    let hop = leave_i * (1.0 / user_degree[v as usize] as f64).powf(alpha);
                    for &j in train.row(v) {
                        dense[j as usize] += hop;
                    }
                }
                let mut entries: Vec<(u32, f64)> = dense
                    .iter()
                    .enumerate()
                    .filter(|&(_, &w)| w > 0.0)
                    .map(|(j, &w)| (j as u32, w / pop_penalty[j]))
                    .collect();
                let rank = |x: &(u32, f64), y: &(u32, f64)| {
                    y.1.total_cmp(&x.1).then(x.0.cmp(&y.0))
                };
                let keep = k.min(entries.len());
                if keep < entries.len() {
                    entries.select_nth_unstable_by(keep.saturating_sub(1), rank);
                    entries.truncate(keep);
                }
                entries.sort_unstable_by(rank);
                if normalize {
                    let total: f64 = entries.iter().map(|&(_, w)| w).sum();
                    if total > 0.0 {
                        for e in &mut entries {
                            e.1 /= total;
                        }
                    }
                }
                entries
            })
            .collect();

        Rp3Beta {
            train: train.clone(),
            rows,
        }
    }

    pub fn walk_row(&self, item: u32) -> &[(u32, f64)] {
        &self.rows[item as usize]
    }
}

impl RecommenderModel for Rp3Beta {
    fn name(&self) -> &'static str {
        "RP3beta"
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
