//! Alternating least squares over implicit feedback with constant
//! per-observation confidence.
//!
//! Unobserved cells carry confidence 1 and target 0, observed cells carry
//! confidence c and target 1. Each half-step solves its side's normal
//! equations exactly, using the Gram trick so the dense zero part is shared
//! across rows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::corpus::InteractionMatrix;
use crate::error::Result;
use crate::linalg::{solve_spd, Mat};
use crate::models::RecommenderModel;

/// How a raw observation is turned into a confidence weight.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfidenceScaling {
    /// c = 1 + alpha
    Linear { alpha: f64 },
    /// c = 1 + alpha * ln(1 + 1/epsilon)
    Log { alpha: f64, epsilon: f64 },
}

impl ConfidenceScaling {
    pub fn confidence(&self) -> f64 {
        match *self {
            ConfidenceScaling::Linear { alpha } => 1.0 + alpha,
            ConfidenceScaling::Log { alpha, epsilon } => {
                1.0 + alpha * (1.0 + 1.0 / epsilon).ln()
            }
        }
    }
}

pub struct Ials {
    train: InteractionMatrix,
    users: Mat,
    items: Mat,
}

fn gaussian_mat(rows: usize, cols: usize, std: f64, rng: &mut ChaCha8Rng) -> Mat {
    let normal = Normal::new(0.0, std).unwrap();
    let mut m = Mat::zeros(rows, cols);
    for v in m.data_mut() {
        *v = normal.sample(rng);
    }
    m
}

/// factors' Gram plus the regularization ridge, shared by every row solve.
fn base_system(factors: &Mat, reg: f64) -> Mat {
    let f = factors.n_cols();
    let mut gram = Mat::zeros(f, f);
    for r in 0..factors.n_rows() {
        let row = factors.row(r);
        for a in 0..f {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            let g = gram.row_mut(a);
            for b in 0..f {
                g[b] += ra * row[b];
            }
        }
    }
    for d in 0..f {
        let v = gram.get(d, d) + reg;
        gram.set(d, d, v);
    }
    gram
}

/// Solves every row of `side` given the opposite factors.
fn solve_side(
    profiles: &[Vec<u32>],
    opposite: &Mat,
    reg: f64,
    confidence: f64,
) -> Result<Mat> {
    let f = opposite.n_cols();
    let base = base_system(opposite, reg);
    let extra = confidence - 1.0;
    let rows: Vec<Vec<f64>> = profiles
        .par_iter()
        .map(|profile| {
            let mut a = base.clone();
            let mut b = vec![0.0f64; f];
            for &idx in profile {
                let v = opposite.row(idx as usize);
                for p in 0..f {
                    let vp = v[p];
                    b[p] += confidence * vp;
                    let ap = a.row_mut(p);
                    for q in 0..f {
                        ap[q] += extra * vp * v[q];
                    }
                }
            }
            solve_spd(&a, &b)
        })
        .collect::<Result<_>>()?;
    Ok(Mat::from_rows(&rows))
}

impl Ials {
    pub fn fit(
        train: &InteractionMatrix,
        factors: usize,
        epochs: usize,
        reg: f64,
        scaling: ConfidenceScaling,
        seed: u64,
    ) -> Result<Ials> {
        assert!(factors >= 1);
        assert!(reg > 0.0, "ridge keeps the systems positive definite");
        let confidence = scaling.confidence();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut users = gaussian_mat(train.n_users(), factors, 0.01, &mut rng);
        let mut items = gaussian_mat(train.n_items(), factors, 0.01, &mut rng);
        let columns = train.transpose();

        for _ in 0..epochs {
            users = solve_side(train.rows(), &items, reg, confidence)?;
            items = solve_side(&columns, &users, reg, confidence)?;
        }
        Ok(Ials {
            train: train.clone(),
            users,
            items,
        })
    }

    /// Weighted squared error plus ridge over the full user-item grid.
    /// Quadratic in the factors, so it is only used on small instances.
    fn objective(
        train: &InteractionMatrix,
        users: &Mat,
        items: &Mat,
        reg: f64,
        confidence: f64,
    ) -> f64 {
        let mut total = 0.0;
        for u in 0..train.n_users() {
            let pu = users.row(u);
            for i in 0..train.n_items() {
                let pred = crate::linalg::dot(pu, items.row(i));
                if train.contains(u as u32, i as u32) {
                    total += confidence * (1.0 - pred) * (1.0 - pred);
                } else {
                    total += pred * pred;
                }
            }
        }
        let sq = |m: &Mat| m.data().iter().map(|v| v * v).sum::<f64>();
        total + reg * (sq(users) + sq(items))
    }

    /// Objective at initialization and after every half-step of a fresh fit.
    /// Evaluates the full grid, so only suitable for small instances; descent
    /// audits assert the trace never rises.
    pub fn objective_trace(
        train: &InteractionMatrix,
        factors: usize,
        epochs: usize,
        reg: f64,
        scaling: ConfidenceScaling,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let confidence = scaling.confidence();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut users = gaussian_mat(train.n_users(), factors, 0.01, &mut rng);
        let mut items = gaussian_mat(train.n_items(), factors, 0.01, &mut rng);
        let columns = train.transpose();
        let mut trace = vec![Self::objective(train, &users, &items, reg, confidence)];
        for _ in 0..epochs {
            users = solve_side(train.rows(), &items, reg, confidence)?;
            trace.push(Self::objective(train, &users, &items, reg, confidence));
            items = solve_side(&columns, &users, reg, confidence)?;
            trace.push(Self::objective(train, &users, &items, reg, confidence));
        }
        Ok(trace)
    }
}

impl RecommenderModel for Ials {
    fn name(&self) -> &'static str {
        "iALS"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        self.items.mat_vec(self.users.row(user as usize))
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_matrix, Interaction, RawDataset};
    use rand::Rng;

    fn random_matrix(seed: u64, n_users: u32, n_items: u32, density: f64) -> InteractionMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for u in 0..n_users {
            for i in 0..n_items {
                if rng.gen_bool(density) {
                    pairs.push((u, i));
                }
            }
            pairs.push((u, u % n_items));
        }
        pairs.sort_unstable();
        pairs.dedup();
        build_matrix(&RawDataset::from_interactions(
            pairs
                .iter()
                .map(|&(u, i)| Interaction {
                    user: format!("u{u}"),
                    item: format!("i{i}"),
                    rating: 1.0,
                    timestamp: None,
                })
                .collect(),
        ))
    }

    #[test]
    fn confidence_formulas() {
        assert_eq!(ConfidenceScaling::Linear { alpha: 40.0 }.confidence(), 41.0);
        let log = ConfidenceScaling::Log {
            alpha: 2.0,
            epsilon: 1.0,
        };
        assert!((log.confidence() - (1.0 + 2.0 * 2.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn each_half_step_lowers_the_objective() {
        let m = random_matrix(41, 9, 7, 0.4);
        for alpha in [4.0, 20.0] {
            let scaling = ConfidenceScaling::Linear { alpha };
            let trace = Ials::objective_trace(&m, 3, 6, 0.1, scaling, 11).unwrap();
            for pair in trace.windows(2) {
                let rel = (pair[1] - pair[0]) / pair[0].abs().max(1e-12);
                assert!(rel <= 1e-9, "objective rose: {pair:?}");
            }
        }
    }

    #[test]
    fn solved_rows_satisfy_their_normal_equations() {
        let m = random_matrix(5, 8, 6, 0.45);
        let reg = 0.2;
        let c = 11.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let items = gaussian_mat(m.n_items(), 3, 0.5, &mut rng);
        let users = solve_side(m.rows(), &items, reg, c).unwrap();
        // residual of d/du [sum_i c_ui (p_ui - u.v_i)^2 + reg u.u] must vanish
        for u in 0..m.n_users() {
            let pu = users.row(u);
            let mut grad = [0.0f64; 3];
            for i in 0..m.n_items() {
                let vi = items.row(i);
                let pred = crate::linalg::dot(pu, vi);
                let (cw, target) = if m.contains(u as u32, i as u32) {
                    (c, 1.0)
                } else {
                    (1.0, 0.0)
                };
                for f in 0..3 {
                    grad[f] += cw * (pred - target) * vi[f];
                }
            }
            for f in 0..3 {
                grad[f] += reg * pu[f];
                assert!(grad[f].abs() < 1e-9, "user {u} grad[{f}] = {}", grad[f]);
            }
        }
    }

    #[test]
    fn separable_communities_sort_themselves_out() {
        // two user groups with disjoint 4-item catalogs; each user skips one
        // of their own group's items in rotation. Rank 2 cannot fit the
        // skipped zeros exactly, so the group structure must fill them in.
        let mut pairs = Vec::new();
        for u in 0..8u32 {
            let base = if u < 4 { 0 } else { 4 };
            for o in 0..4u32 {
                if o != u % 4 {
                    pairs.push((u, base + o));
                }
            }
        }
        let m = build_matrix(&RawDataset::from_interactions(
            pairs
                .iter()
                .map(|&(u, i)| Interaction {
                    user: format!("u{u}"),
                    item: format!("i{i}"),
                    rating: 1.0,
                    timestamp: None,
                })
                .collect(),
        ));
        let model = Ials::fit(
            &m,
            2,
            20,
            0.1,
            ConfidenceScaling::Linear { alpha: 10.0 },
            7,
        )
        .unwrap();
        for u in 0..8u32 {
            let top = model.recommend(u, 1)[0].0;
            let skipped = if u < 4 { u % 4 } else { 4 + u % 4 };
            let want = m.ids.item_index(&format!("i{skipped}")).unwrap();
            assert_eq!(top, want, "user {u}");
        }
    }

    #[test]
    fn fit_is_seed_deterministic() {
        let m = random_matrix(2, 7, 6, 0.4);
        let s = ConfidenceScaling::Linear { alpha: 10.0 };
        let a = Ials::fit(&m, 3, 3, 0.1, s, 5).unwrap();
        let b = Ials::fit(&m, 3, 3, 0.1, s, 5).unwrap();
        for u in 0..m.n_users() as u32 {
            assert_eq!(a.score_items(u), b.score_items(u));
        }
    }
}
