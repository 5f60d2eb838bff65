//! Pairwise similarity between binary profiles.
//!
//! Every measure here depends only on the profile sizes `na`, `nb`, the
//! overlap `c` and (for Pearson) the vector dimension, so similarities are
//! computed from co-occurrence counts instead of dense vectors. Overlap
//! counting uses an inverted index and runs rows in parallel.

use rayon::prelude::*;

/// Similarity measure between two binary profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Similarity {
    Cosine,
    Jaccard,
    Dice,
    Pearson,
    Euclidean,
}

impl Similarity {
    pub const ALL: [Similarity; 5] = [
        Similarity::Cosine,
        Similarity::Jaccard,
        Similarity::Dice,
        Similarity::Pearson,
        Similarity::Euclidean,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Similarity::Cosine => "cosine",
            Similarity::Jaccard => "jaccard",
            Similarity::Dice => "dice",
            Similarity::Pearson => "pearson",
            Similarity::Euclidean => "euclidean",
        }
    }

    pub fn parse(s: &str) -> Option<Similarity> {
        Similarity::ALL.iter().copied().find(|k| k.label() == s)
    }

    /// True when the measure is zero whenever the overlap is zero, letting the
    /// pair scan skip non-co-occurring profiles.
    fn vanishes_without_overlap(&self) -> bool {
        matches!(
            self,
            Similarity::Cosine | Similarity::Jaccard | Similarity::Dice
        )
    }

    /// Similarity from profile sizes and overlap. `dim` is the length of the
    /// underlying binary vectors; only Pearson uses it. Returns None when the
    /// measure is undefined for the pair (an empty or constant profile).
    pub fn from_counts(&self, na: usize, nb: usize, c: usize, dim: usize) -> Option<f64> {
        debug_assert!(c <= na && c <= nb);
        let (na_f, nb_f, c_f) = (na as f64, nb as f64, c as f64);
        match self {
            Similarity::Cosine => {
                if na == 0 || nb == 0 {
                    return None;
                }
                Some(c_f / (na_f * nb_f).sqrt())
            }
            Similarity::Jaccard => {
                if na + nb == c {
                    return None; // both empty
                }
                Some(c_f / (na_f + nb_f - c_f))
            }
            Similarity::Dice => {
                if na + nb == 0 {
                    return None;
                }
                Some(2.0 * c_f / (na_f + nb_f))
            }
            Similarity::Pearson => {
                // centered binary vectors over the full dimension
                let d = dim as f64;
                let var_a = na_f - na_f * na_f / d;
                let var_b = nb_f - nb_f * nb_f / d;
                if var_a <= 0.0 || var_b <= 0.0 {
                    return None; // constant vector, correlation undefined
                }
                Some((c_f - na_f * nb_f / d) / (var_a.sqrt() * var_b.sqrt()))
            }
            Similarity::Euclidean => {
                // squared distance between binary vectors is na + nb - 2c
                Some(1.0 / (1.0 + (na_f + nb_f - 2.0 * c_f).sqrt()))
            }
        }
    }
}

/// For each profile, its k most similar other profiles as (index, weight),
/// ordered weight descending then index ascending.
///
/// `dim` is the dimension profiles live in (catalog size for user profiles,
/// user count for item profiles). Self-similarity is always excluded.
pub fn top_k_similar(
    rows: &[Vec<u32>],
    dim: usize,
    kind: Similarity,
    k: usize,
) -> Vec<Vec<(u32, f64)>> {
    let n = rows.len();
    let mut inverted: Vec<Vec<u32>> = vec![Vec::new(); dim];
    for (idx, row) in rows.iter().enumerate() {
        for &e in row {
            inverted[e as usize].push(idx as u32);
        }
    }
    let sparse_scan = kind.vanishes_without_overlap();

    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut overlap = vec![0u32; n];
            let mut touched: Vec<u32> = Vec::new();
            for &e in &rows[a] {
                for &b in &inverted[e as usize] {
                    if overlap[b as usize] == 0 {
                        touched.push(b);
                    }
                    overlap[b as usize] += 1;
                }
            }

            let na = rows[a].len();
            let mut weighted: Vec<(u32, f64)> = Vec::new();
            let mut push = |b: u32, c: usize| {
                if b as usize == a {
                    return;
                }
                if let Some(w) = kind.from_counts(na, rows[b as usize].len(), c, dim) {
                    weighted.push((b, w));
                }
            };
            if sparse_scan {
                for &b in &touched {
                    push(b, overlap[b as usize] as usize);
                }
            } else {
                for b in 0..n as u32 {
                    push(b, overlap[b as usize] as usize);
                }
            }

            let k = k.min(weighted.len());
            let rank = |x: &(u32, f64), y: &(u32, f64)| {
                y.1.total_cmp(&x.1).then(x.0.cmp(&y.0))
            };
            if k < weighted.len() {
                weighted.select_nth_unstable_by(k.saturating_sub(1), rank);
                weighted.truncate(k);
            }
            weighted.sort_unstable_by(rank);
            weighted
        })
        .collect()
}
