//! The twelve recommenders, grouped by family.

pub mod linear;
pub mod memory;
pub mod mf;
pub mod neural;

use crate::corpus::InteractionMatrix;

/// A trained recommender scoring the full catalog for one user.
pub trait RecommenderModel: Send + Sync {
    /// Human-readable family name, used in reports.
    fn name(&self) -> &'static str;

    /// One score per catalog item. Higher means more recommendable.
    fn score_items(&self, user: u32) -> Vec<f64>;

    /// The matrix the model was fit on; its rows are excluded from rankings.
    fn train_matrix(&self) -> &InteractionMatrix;

    /// Top-n unseen items, ordered by score descending with index ascending
    /// as the tie-break.
    fn recommend(&self, user: u32, n: usize) -> Vec<(u32, f64)> {
        let scores = self.score_items(user);
        top_n_excluding(&scores, self.train_matrix().row(user), n)
    }
}

/// Ranked lists for every user at once, users with empty train rows marked
/// `None` (there is nothing to personalize on and nothing to exclude, so
/// they are left out of evaluation). Items only, scores dropped.
pub fn batch_recommend(model: &dyn RecommenderModel, n: usize) -> Vec<Option<Vec<u32>>> {
    use rayon::prelude::*;
    let train = model.train_matrix();
    (0..train.n_users() as u32)
        .into_par_iter()
        .map(|u| {
            if train.row(u).is_empty() {
                None
            } else {
                Some(model.recommend(u, n).into_iter().map(|(i, _)| i).collect())
            }
        })
        .collect()
}

/// Selects the n best-scoring items not present in `exclude` (which must be
/// sorted ascending). Ordering is score descending, then item index
/// ascending, so equal scores always resolve the same way.
pub fn top_n_excluding(scores: &[f64], exclude: &[u32], n: usize) -> Vec<(u32, f64)> {
    let mut candidates: Vec<u32> = (0..scores.len() as u32)
        .filter(|i| exclude.binary_search(i).is_err())
        .collect();
    let n = n.min(candidates.len());
    if n == 0 {
        return Vec::new();
    }
    let rank = |a: &u32, b: &u32| {
        scores[*b as usize]
            .total_cmp(&scores[*a as usize])
            .then(a.cmp(b))
    };
    if n < candidates.len() {
        candidates.select_nth_unstable_by(n - 1, rank);
        candidates.truncate(n);
    }
    candidates.sort_unstable_by(rank);
    candidates
        .into_iter()
        .map(|i| (i, scores[i as usize]))
        .collect()
}
