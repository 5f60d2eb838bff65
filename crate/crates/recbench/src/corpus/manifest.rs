//! Reproducibility manifest written next to prepared datasets and splits.

use std::fs;
use std::path::Path;

use crate::corpus::matrix::{DatasetStats, InteractionMatrix};
use crate::corpus::split::SplitSet;
use crate::error::{Error, Result};

/// FNV-1a over 8-byte little-endian words. Stable across platforms, cheap,
/// and good enough to detect a changed split or dataset.
pub fn fnv1a64(words: impl IntoIterator<Item = u64>) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for word in words {
        for byte in word.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(PRIME);
        }
    }
    hash
}

fn checksum_rows(rows: &[Vec<u32>]) -> u64 {
    let words = rows.iter().enumerate().flat_map(|(u, row)| {
        std::iter::once(((u as u64) << 32) | row.len() as u64)
            .chain(row.iter().map(|&i| i as u64))
    });
    fnv1a64(words)
}

/// Everything needed to confirm that a prepared dataset and its folds came
/// from the same inputs, seed and parameters.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PrepManifest {
    pub dataset: String,
    pub rating_threshold: Option<f64>,
    pub core: u32,
    pub stats: DatasetStats,
    pub split_seed: Option<u64>,
    pub test_fraction: Option<f64>,
    pub matrix_checksum: String,
    #[serde(default)]
    pub fold_checksums: Vec<String>,
}

impl PrepManifest {
    pub fn new(
        dataset: &str,
        rating_threshold: Option<f64>,
        core: u32,
        matrix: &InteractionMatrix,
    ) -> PrepManifest {
        PrepManifest {
            dataset: dataset.to_string(),
            rating_threshold,
            core,
            stats: DatasetStats::of(matrix),
            split_seed: None,
            test_fraction: None,
            matrix_checksum: format!("{:016x}", checksum_rows(matrix.rows())),
            fold_checksums: Vec::new(),
        }
    }

    /// Records the split alongside the dataset: seed, fraction and one
    /// checksum per fold over (train, test) rows.
    pub fn with_split(mut self, split: &SplitSet) -> PrepManifest {
        self.split_seed = Some(split.seed);
        self.test_fraction = Some(split.test_fraction);
        self.fold_checksums = split
            .folds
            .iter()
            .map(|fold| {
                let train = checksum_rows(fold.train.rows());
                let test = checksum_rows(fold.test.rows());
                format!("{:016x}{:016x}", train, test)
            })
            .collect();
        self
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PrepManifest> {
        let path = path.as_ref();
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&content).map_err(|e| {
            Error::Config(format!("manifest {} is not valid JSON: {e}", path.display()))
        })
    }

    /// True when `other` was produced by an identical preparation run.
    pub fn matches(&self, other: &PrepManifest) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load::{Interaction, RawDataset};
    use crate::corpus::matrix::build_matrix;
    use crate::corpus::split::split_repeated_holdout;

    fn matrix() -> InteractionMatrix {
        let interactions = (0..6)
            .flat_map(|u| {
                (0..6).map(move |i| Interaction {
                    user: format!("u{u}"),
                    item: format!("i{i}"),
                    rating: 1.0,
                    timestamp: None,
                })
            })
            .collect();
        build_matrix(&RawDataset::from_interactions(interactions))
    }

    #[test]
    fn fnv_distinguishes_order() {
        assert_ne!(fnv1a64([1, 2, 3]), fnv1a64([3, 2, 1]));
        assert_eq!(fnv1a64([1, 2, 3]), fnv1a64([1, 2, 3]));
        // regression pin: empty input is the offset basis
        assert_eq!(fnv1a64([]), 0xcbf2_9ce4_8422_2325);
    }

    #[test]
    fn manifest_round_trips_through_disk() {
        let m = matrix();
        let split = split_repeated_holdout(&m, 5, 0.2, 17);
        let manifest = PrepManifest::new("toy", Some(3.0), 5, &m).with_split(&split);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prep.json");
        manifest.save(&path).unwrap();
        let loaded = PrepManifest::load(&path).unwrap();
        assert!(manifest.matches(&loaded));
        assert_eq!(loaded.fold_checksums.len(), 5);
    }

    #[test]
    fn different_seed_changes_fold_checksums() {
        let m = matrix();
        let a = PrepManifest::new("toy", None, 1, &m)
            .with_split(&split_repeated_holdout(&m, 5, 0.2, 1));
        let b = PrepManifest::new("toy", None, 1, &m)
            .with_split(&split_repeated_holdout(&m, 5, 0.2, 2));
        assert_eq!(a.matrix_checksum, b.matrix_checksum);
        assert_ne!(a.fold_checksums, b.fold_checksums);
    }
}
