//! User and item neighborhood models over binary feedback.

use crate::corpus::InteractionMatrix;
use crate::models::memory::similarity::{top_k_similar, Similarity};
use crate::models::RecommenderModel;

/// Scores an item by the summed similarity of the k most similar users that
/// interacted with it.
pub struct UserKnn {
    train: InteractionMatrix,
    neighbors: Vec<Vec<(u32, f64)>>,
}

impl UserKnn {
    pub fn fit(train: &InteractionMatrix, k: usize, kind: Similarity) -> UserKnn {
        let neighbors = top_k_similar(train.rows(), train.n_items(), kind, k);
        UserKnn {
            train: train.clone(),
            neighbors,
        }
    }
}

impl RecommenderModel for UserKnn {
    fn name(&self) -> &'static str {
        "UserKNN"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        let mut scores = vec![0.0; self.train.n_items()];
        for &(neighbor, weight) in &self.neighbors[user as usize] {
            for &item in self.train.row(neighbor) {
                scores[item as usize] += weight;
            }
        }
        scores
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}

/// Scores an item by its summed similarity to the profile items whose top-k
/// neighborhoods contain it.
pub struct ItemKnn {
    train: InteractionMatrix,
    /// incoming[j] lists the items i with j among i's top-k, with sim(i, j).
    incoming: Vec<Vec<(u32, f64)>>,
}

impl ItemKnn {
    pub fn fit(train: &InteractionMatrix, k: usize, kind: Similarity) -> ItemKnn {
        let columns = train.transpose();
        let neighbors = top_k_similar(&columns, train.n_users(), kind, k);
        let mut incoming: Vec<Vec<(u32, f64)>> = vec![Vec::new(); train.n_items()];
        for (item, list) in neighbors.iter().enumerate() {
            for &(neighbor, weight) in list {
                incoming[neighbor as usize].push((item as u32, weight));
            }
        }
        ItemKnn {
            train: train.clone(),
            incoming,
        }
    }
}

impl RecommenderModel for ItemKnn {
    fn name(&self) -> &'static str {
        "ItemKNN"
    }

    fn score_items(&self, user: u32) -> Vec<f64> {
        let mut scores = vec![0.0; self.train.n_items()];
        for &profile_item in self.train.row(user) {
            for &(item, weight) in &self.incoming[profile_item as usize] {
                scores[item as usize] += weight;
            }
        }
        scores
    }

    fn train_matrix(&self) -> &InteractionMatrix {
        &self.train
    }
}
