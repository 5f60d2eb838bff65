//! Repeated holdout anatomy: the interaction pool is shuffled once and cut
//! into disjoint test slices, so no interaction is ever tested twice.
//!
//!   cargo run --example holdout_splits

use std::collections::HashSet;

use recbench::corpus::{build_matrix, split_repeated_holdout, Interaction, RawDataset};

fn main() {
    let mut interactions = Vec::new();
    for u in 0..40 {
        for i in 0..25 {
            if (u * 7 + i * 3) % 5 != 0 {
                interactions.push(Interaction {
                    user: format!("u{u}"),
                    item: format!("i{i}"),
                    rating: 1.0,
                    timestamp: None,
                });
            }
        }
    }
    let matrix = build_matrix(&RawDataset {
        interactions,
        duplicates_collapsed: 0,
    });
    let total = matrix.n_interactions();
    println!("pool: {total} interactions");

    let split = split_repeated_holdout(&matrix, 5, 0.2, 42);
    let mut seen_test: HashSet<(u32, u32)> = HashSet::new();
    for (k, fold) in split.folds.iter().enumerate() {
        let train = fold.train.n_interactions();
        let test = fold.test.n_interactions();
        println!("fold {k}: {train} train + {test} test = {}", train + test);
        assert_eq!(train + test, total, "folds partition the pool");

        for (u, row) in fold.test.rows().iter().enumerate() {
            for &i in row {
                // disjointness across repeats and against this fold's train
                assert!(seen_test.insert((u as u32, i)), "interaction tested twice");
                assert!(!fold.train.contains(u as u32, i), "test leaked into train");
            }
        }
    }
    println!(
        "5 x 20% covers {}/{} interactions exactly once as test",
        seen_test.len(),
        total
    );

    // same seed, same split; different seed, different split
    let again = split_repeated_holdout(&matrix, 5, 0.2, 42);
    assert_eq!(split.folds[0].test.rows(), again.folds[0].test.rows());
    let other = split_repeated_holdout(&matrix, 5, 0.2, 43);
    assert_ne!(split.folds[0].test.rows(), other.folds[0].test.rows());
    println!("splits are a pure function of the seed");
}
