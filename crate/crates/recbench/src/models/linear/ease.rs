//! Closed-form item-item ridge regression with a zero-diagonal constraint.
//!
//! With G = X'X and P = (G + l2 I)^-1, the constrained least-squares weights
//! are B[i][j] = -P[i][j] / P[j][j] off the diagonal and 0 on it.

use crate::corpus::InteractionMatrix;
use crate::error::Result;
use crate::linalg::{cholesky, cholesky_inverse, Mat};
use crate::models::RecommenderModel;

pub struct Ease {
    train: InteractionMatrix,
    weights: Mat,
}

/// Dense co-occurrence Gram matrix G[i][j] = |users(i) and users(j)|.
pub(crate) fn gram_matrix(train: &InteractionMatrix) -> Mat {
    let n = train.n_items();
    let mut g = Mat::zeros(n, n);
    for row in train.rows() {
        for &i in row {
            let gi = g.row_mut(i as usize);
            for &j in row {
                gi[j as usize] += 1.0;
            }
        }
    }
    g
}

impl Ease {
    pub fn fit(train: &InteractionMatrix, l2: f64) -> Result<Ease> {
        assert!(l2 > 0.0, "ridge strength must be positive");
        let n = train.n_items();
        let mut a = gram_matrix(train);
        for d in 0..n {
            let v = a.get(d, d) + l2;
            a.set(d, d, v);
        }
        let p = cholesky_inverse(&cholesky(&a)?);
        let mut weights = Mat::zeros(n, n);
        for i in 0..n {
            let pi = p.row(i);
            let wi = weights.row_mut(i);
            for j in 0..n {
                if i != j {
                    wi[j] = -pi[j] / p.get(j, j);
                }
            }
        }
        Ok(Ease {
            train: train.clone(),
            weights,
        })
    }

    pub fn weights(&self) -> &Mat {
        &self.weights
    }
}

impl RecommenderModel for Ease {
    fn name(&self) -> &'static str {
        "EASE"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        let mut scores = vec![0.0; self.train.n_items()];
        for &i in self.train.row(user) {
            let wi = self.weights.row(i as usize);
            for (s, &w) in scores.iter_mut().zip(wi) {
                *s += w;
            }
        }
        scores
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_matrix, Interaction, RawDataset};
    use rand::{Rng, SeedableRng};

    fn matrix_from(pairs: &[(&str, &str)]) -> InteractionMatrix {
        build_matrix(&RawDataset::from_interactions(
            pairs
                .iter()
                .map(|(u, i)| Interaction {
                    user: (*u).into(),
                    item: (*i).into(),
                    rating: 1.0,
                    timestamp: None,
                })
                .collect(),
        ))
    }

    fn random_matrix(seed: u64, n_users: u32, n_items: u32) -> InteractionMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for u in 0..n_users {
            for i in 0..n_items {
                if rng.gen_bool(0.45) {
                    pairs.push((u, i));
                }
            }
            pairs.push((u, u % n_items));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let owned: Vec<(String, String)> = pairs
            .iter()
            .map(|&(u, i)| (format!("u{u}"), format!("i{i}")))
            .collect();
        let borrowed: Vec<(&str, &str)> =
            owned.iter().map(|(u, i)| (u.as_str(), i.as_str())).collect();
        matrix_from(&borrowed)
    }

    #[test]
    fn two_item_weights_match_hand_computation() {
        // X = [[1,1],[1,0]]: G = [[2,1],[1,1]]; with l2 = 1,
        // (G + I)^-1 = 1/5 [[2,-1],[-1,3]] so B01 = 1/3, B10 = 1/2.
        let m = matrix_from(&[("a", "x"), ("a", "y"), ("b", "x")]);
        let model = Ease::fit(&m, 1.0).unwrap();
        let b = model.weights();
        assert!((b.get(0, 1) - 1.0 / 3.0).abs() < 1e-12);
        assert!((b.get(1, 0) - 0.5).abs() < 1e-12);
        assert_eq!(b.get(0, 0), 0.0);
        assert_eq!(b.get(1, 1), 0.0);
    }

    #[test]
    fn stationarity_residual_is_diagonal() {
        // At the constrained optimum, (G + l2 I) B - G must vanish off the
        // diagonal; the diagonal absorbs the Lagrange multipliers.
        let m = random_matrix(3, 14, 9);
        let l2 = 2.5;
        let model = Ease::fit(&m, l2).unwrap();
        let g = gram_matrix(&m);
        let n = m.n_items();
        for i in 0..n {
            for j in 0..n {
                let mut r = -g.get(i, j);
                for t in 0..n {
                    let a_it = g.get(i, t) + if i == t { l2 } else { 0.0 };
                    r += a_it * model.weights().get(t, j);
                }
                if i != j {
                    assert!(r.abs() < 1e-8, "residual[{i}][{j}] = {r}");
                }
            }
        }
    }

    #[test]
    fn duplicated_item_gets_the_heaviest_weight() {
        // x and y have identical user sets, so each should reconstruct best
        // from the other.
        let m = matrix_from(&[
            ("a", "x"),
            ("a", "y"),
            ("b", "x"),
            ("b", "y"),
            ("c", "x"),
            ("c", "y"),
            ("a", "z"),
            ("d", "z"),
            ("d", "w"),
            ("b", "w"),
        ]);
        let model = Ease::fit(&m, 0.1).unwrap();
        let x = m.ids.item_index("x").unwrap() as usize;
        let y = m.ids.item_index("y").unwrap() as usize;
        let row = model.weights().row(x);
        let best = (0..row.len())
            .filter(|&j| j != x)
            .max_by(|&a, &b| row[a].total_cmp(&row[b]))
            .unwrap();
        assert_eq!(best, y);
    }

    #[test]
    fn scores_are_profile_row_sums() {
        let m = random_matrix(9, 8, 6);
        let model = Ease::fit(&m, 1.3).unwrap();
        for user in 0..m.n_users() as u32 {
            let got = model.score_items(user);
            for (j, &got_j) in got.iter().enumerate() {
                let want: f64 = m
                    .row(user)
                    .iter()
                    .map(|&i| model.weights().get(i as usize, j))
                    .sum();
                assert!((got_j - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn recommendations_exclude_profile() {
        let m = random_matrix(4, 10, 7);
        let model = Ease::fit(&m, 5.0).unwrap();
        for user in 0..m.n_users() as u32 {
            for (item, _) in model.recommend(user, 7) {
                assert!(!m.contains(user, item));
            }
        }
    }
}
