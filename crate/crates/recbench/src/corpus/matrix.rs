//! Compact index-based view of a binarized dataset.

use std::collections::HashMap;
use std::sync::Arc;

use crate::corpus::load::RawDataset;

/// Bidirectional maps between external string ids and dense indices.
/// Index order is first appearance in the interaction stream, which makes the
/// mapping a pure function of the input file.
#[derive(Clone, Debug, Default)]
pub struct IdMaps {
    pub users: Vec<String>,
    pub items: Vec<String>,
    user_index: HashMap<String, u32>,
    item_index: HashMap<String, u32>,
}

impl IdMaps {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn user_index(&self, id: &str) -> Option<u32> {
        self.user_index.get(id).copied()
    }

    pub fn item_index(&self, id: &str) -> Option<u32> {
        self.item_index.get(id).copied()
    }

    fn intern_user(&mut self, id: &str) -> u32 {
        match self.user_index.get(id) {
            Some(&idx) => idx,
            None => {
                let idx = self.users.len() as u32;
                self.users.push(id.to_string());
                self.user_index.insert(id.to_string(), idx);
                idx
            }
        }
    }

    fn intern_item(&mut self, id: &str) -> u32 {
        match self.item_index.get(id) {
            Some(&idx) => idx,
            None => {
                let idx = self.items.len() as u32;
                self.items.push(id.to_string());
                self.item_index.insert(id.to_string(), idx);
                idx
            }
        }
    }

    /// Placeholder ids `u0..` and `i0..` for fixtures built directly in
    /// index space.
    pub fn synthetic(n_users: usize, n_items: usize) -> IdMaps {
        let mut ids = IdMaps::default();
        for u in 0..n_users {
            ids.intern_user(&format!("u{u}"));
        }
        for i in 0..n_items {
            ids.intern_item(&format!("i{i}"));
        }
        ids
    }
}

/// Binary user-item matrix stored as sorted per-user item lists.
/// Every row is strictly increasing, so membership checks binary-search.
#[derive(Clone, Debug)]
pub struct InteractionMatrix {
    pub ids: Arc<IdMaps>,
    rows: Vec<Vec<u32>>,
}

impl InteractionMatrix {
    pub fn n_users(&self) -> usize {
        self.rows.len()
    }

    pub fn n_items(&self) -> usize {
        self.ids.n_items()
    }

    pub fn n_interactions(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, user: u32) -> &[u32] {
        &self.rows[user as usize]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn contains(&self, user: u32, item: u32) -> bool {
        self.rows[user as usize].binary_search(&item).is_ok()
    }

    /// Same id space, different interactions. Rows are sorted and deduplicated
    /// here so callers can pass them in any order.
    pub fn with_rows(&self, rows: Vec<Vec<u32>>) -> InteractionMatrix {
        InteractionMatrix::from_index_rows(Arc::clone(&self.ids), rows)
    }

    /// Builds directly from index-space rows. Rows are sorted and
    /// deduplicated here so callers can pass them in any order.
    pub fn from_index_rows(ids: Arc<IdMaps>, mut rows: Vec<Vec<u32>>) -> InteractionMatrix {
        assert_eq!(rows.len(), ids.n_users(), "row count must match user count");
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            if let Some(&max) = row.last() {
                assert!((max as usize) < ids.n_items(), "item index out of range");
            }
        }
        InteractionMatrix { ids, rows }
    }

    /// Number of users per item, indexed by item.
    pub fn item_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_items()];
        for row in &self.rows {
            for &item in row {
                counts[item as usize] += 1;
            }
        }
        counts
    }

    /// Item-major view: for each item, the sorted list of users holding it.
    pub fn transpose(&self) -> Vec<Vec<u32>> {
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); self.n_items()];
        for (user, row) in self.rows.iter().enumerate() {
            for &item in row {
                cols[item as usize].push(user as u32);
            }
        }
        // users are visited in increasing order, so each column is sorted
        cols
    }

    /// All (user, item) pairs in row-major order.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.n_interactions());
        for (user, row) in self.rows.iter().enumerate() {
            for &item in row {
                out.push((user as u32, item));
            }
        }
        out
    }
}

/// Builds the index-space matrix from deduplicated interactions.
pub fn build_matrix(raw: &RawDataset) -> InteractionMatrix {
    let mut ids = IdMaps::default();
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(raw.interactions.len());
    for it in &raw.interactions {
        let u = ids.intern_user(&it.user);
        let i = ids.intern_item(&it.item);
        pairs.push((u, i));
    }
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); ids.n_users()];
    for (u, i) in pairs {
        rows[u as usize].push(i);
    }
    for row in &mut rows {
        row.sort_unstable();
        // duplicates were collapsed at load time
    }
    InteractionMatrix {
        ids: Arc::new(ids),
        rows,
    }
}

/// Headline numbers for a prepared dataset.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DatasetStats {
    pub users: usize,
    pub items: usize,
    pub interactions: usize,
    pub density: f64,
}

impl DatasetStats {
    pub fn of(matrix: &InteractionMatrix) -> DatasetStats {
        let users = matrix.n_users();
        let items = matrix.n_items();
        let interactions = matrix.n_interactions();
        let density = if users == 0 || items == 0 {
            0.0
        } else {
            interactions as f64 / (users as f64 * items as f64)
        };
        DatasetStats {
            users,
            items,
            interactions,
            density,
        }
    }

    pub fn csv_header() -> &'static str {
        "users,items,interactions,density"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6}",
            self.users, self.items, self.interactions, self.density
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load::Interaction;

    fn dataset(pairs: &[(&str, &str)]) -> RawDataset {
        RawDataset::from_interactions(
            pairs
                .iter()
                .map(|(u, i)| Interaction {
                    user: (*u).into(),
                    item: (*i).into(),
                    rating: 1.0,
                    timestamp: None,
                })
                .collect(),
        )
    }

    #[test]
    fn indices_follow_first_appearance() {
        let m = build_matrix(&dataset(&[("b", "y"), ("a", "x"), ("b", "x")]));
        assert_eq!(m.ids.users, vec!["b", "a"]);
        assert_eq!(m.ids.items, vec!["y", "x"]);
        assert_eq!(m.ids.user_index("a"), Some(1));
        assert_eq!(m.ids.item_index("x"), Some(1));
    }

    #[test]
    fn rows_are_sorted_and_queryable() {
        let m = build_matrix(&dataset(&[("u", "c"), ("u", "a"), ("u", "b")]));
        assert_eq!(m.row(0), &[0, 1, 2]);
        assert!(m.contains(0, 2));
        assert!(!m.contains(0, 3));
    }

    #[test]
    fn transpose_round_trips() {
        let m = build_matrix(&dataset(&[
            ("a", "x"),
            ("a", "y"),
            ("b", "y"),
            ("c", "x"),
        ]));
        let cols = m.transpose();
        let mut rebuilt: Vec<Vec<u32>> = vec![Vec::new(); m.n_users()];
        for (item, users) in cols.iter().enumerate() {
            assert!(users.windows(2).all(|w| w[0] < w[1]));
            for &u in users {
                rebuilt[u as usize].push(item as u32);
            }
        }
        for row in &mut rebuilt {
            row.sort_unstable();
        }
        assert_eq!(rebuilt, m.rows().to_vec());
    }

    #[test]
    fn item_counts_match_transpose_lengths() {
        let m = build_matrix(&dataset(&[
            ("a", "x"),
            ("b", "x"),
            ("b", "y"),
            ("c", "x"),
        ]));
        let counts = m.item_counts();
        let cols = m.transpose();
        for (item, users) in cols.iter().enumerate() {
            assert_eq!(counts[item] as usize, users.len());
        }
    }

    #[test]
    fn stats_density_of_full_matrix_is_one() {
        let m = build_matrix(&dataset(&[
            ("a", "x"),
            ("a", "y"),
            ("b", "x"),
            ("b", "y"),
        ]));
        let stats = DatasetStats::of(&m);
        assert_eq!(stats.users, 2);
        assert_eq!(stats.items, 2);
        assert_eq!(stats.interactions, 4);
        assert!((stats.density - 1.0).abs() < 1e-12);
    }

    #[test]
    fn with_rows_sorts_and_keeps_id_space() {
        let m = build_matrix(&dataset(&[("a", "x"), ("a", "y"), ("b", "y")]));
        let derived = m.with_rows(vec![vec![1, 0], vec![]]);
        assert_eq!(derived.row(0), &[0, 1]);
        assert_eq!(derived.row(1), &[] as &[u32]);
        assert_eq!(derived.ids.users, m.ids.users);
    }
}
