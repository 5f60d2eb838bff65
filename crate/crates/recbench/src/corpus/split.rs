//! Repeated holdout splitting with disjoint test fifths.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::matrix::InteractionMatrix;

/// Per-user relevant items of one test partition, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    rows: Vec<Vec<u32>>,
}

impl GroundTruth {
    pub fn from_rows(mut rows: Vec<Vec<u32>>) -> GroundTruth {
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
        }
        GroundTruth { rows }
    }

    pub fn n_users(&self) -> usize {
        self.rows.len()
    }

    pub fn relevant(&self, user: u32) -> &[u32] {
        &self.rows[user as usize]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn n_interactions(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }
}

/// One train/test partition over a shared id space.
#[derive(Clone, Debug)]
pub struct Fold {
    pub train: InteractionMatrix,
    pub test: GroundTruth,
}

/// All folds produced by one splitting run, plus the seed that made them.
#[derive(Clone, Debug)]
pub struct SplitSet {
    pub folds: Vec<Fold>,
    pub seed: u64,
    pub test_fraction: f64,
}

/// Splits by shuffling every (user, item) pair once and carving the shuffle
/// into test partitions.
///
/// When `repeats * test_fraction` is 1 the partitions are the exhaustive
/// fifths (or halves, etc.) of the shuffle, so every interaction appears in
/// exactly one test set. Otherwise each repeat takes the next disjoint chunk
/// of `round(test_fraction * total)` pairs, which still never reuses a pair
/// across test sets but may leave a remainder untested.
pub fn split_repeated_holdout(
    matrix: &InteractionMatrix,
    repeats: usize,
    test_fraction: f64,
    seed: u64,
) -> SplitSet {
    assert!(repeats >= 1, "need at least one repeat");
    assert!(
        test_fraction > 0.0 && test_fraction < 1.0,
        "test fraction must be in (0, 1)"
    );

    let mut pairs = matrix.pairs();
    let total = pairs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);

    let exhaustive = (repeats as f64 * test_fraction - 1.0).abs() < 1e-9;
    let bounds: Vec<(usize, usize)> = if exhaustive {
        // chunk sizes as even as possible: first (total % repeats) get one extra
        let base = total / repeats;
        let extra = total % repeats;
        let mut start = 0;
        (0..repeats)
            .map(|r| {
                let len = base + usize::from(r < extra);
                let b = (start, start + len);
                start += len;
                b
            })
            .collect()
    } else {
        let chunk = (test_fraction * total as f64).round() as usize;
        assert!(
            chunk >= 1 && repeats * chunk <= total,
            "disjoint test chunks do not fit: {repeats} x {chunk} > {total}"
        );
        (0..repeats).map(|r| (r * chunk, (r + 1) * chunk)).collect()
    };

    let n_users = matrix.n_users();
    let folds = bounds
        .into_iter()
        .map(|(lo, hi)| {
            let mut test_rows: Vec<Vec<u32>> = vec![Vec::new(); n_users];
            let mut train_rows: Vec<Vec<u32>> = vec![Vec::new(); n_users];
            for (idx, &(u, i)) in pairs.iter().enumerate() {
                if idx >= lo && idx < hi {
                    test_rows[u as usize].push(i);
                } else {
                    train_rows[u as usize].push(i);
                }
            }
            Fold {
                train: matrix.with_rows(train_rows),
                test: GroundTruth::from_rows(test_rows),
            }
        })
        .collect();

    SplitSet {
        folds,
        seed,
        test_fraction,
    }
}

/// Carves a validation partition out of a fold's training matrix for model
/// selection. The fold's test set is never touched.
pub fn carve_validation(
    fold: &Fold,
    fraction: f64,
    seed: u64,
) -> (InteractionMatrix, GroundTruth) {
    assert!(
        fraction > 0.0 && fraction < 1.0,
        "validation fraction must be in (0, 1)"
    );
    let mut pairs = fold.train.pairs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);

    let n_val = (fraction * pairs.len() as f64).round() as usize;
    let n_val = n_val.clamp(1, pairs.len().saturating_sub(1));

    let n_users = fold.train.n_users();
    let mut val_rows: Vec<Vec<u32>> = vec![Vec::new(); n_users];
    let mut train_rows: Vec<Vec<u32>> = vec![Vec::new(); n_users];
    for (idx, &(u, i)) in pairs.iter().enumerate() {
        if idx < n_val {
            val_rows[u as usize].push(i);
        } else {
            train_rows[u as usize].push(i);
        }
    }
    (
        fold.train.with_rows(train_rows),
        GroundTruth::from_rows(val_rows),
    )
}
