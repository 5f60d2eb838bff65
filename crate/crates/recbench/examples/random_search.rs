//! Hyperparameter search over the published domains: sample configurations
//! at random, score each on a validation slice carved from the training
//! fold, keep the best.
//!
//!   cargo run --example random_search

use recbench::corpus::{build_matrix, split_repeated_holdout, Interaction, RawDataset};
use recbench::harness::{default_trials, search_space, tune, AlgorithmKind};

fn main() -> recbench::Result<()> {
    let mut interactions = Vec::new();
    for u in 0..50u32 {
        for i in 0..30u32 {
            if (u * 13 + i * 7) % 4 != 0 {
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
    let split = split_repeated_holdout(&matrix, 1, 0.2, 99);

    for kind in [AlgorithmKind::MostPop, AlgorithmKind::Rp3Beta] {
        let space = search_space(kind);
        let budget = default_trials(kind).min(10);
        println!(
            "\n{kind}: {} dimensions, budget {budget}",
            space.n_dims()
        );
        let result = tune(kind, &space, budget, &split.folds[0], 99)?;
        for t in &result.trials {
            match t.score {
                Some(s) => println!("  trial {:>2}  {s:.4}  {}", t.trial, t.params),
                None => println!("  trial {:>2}  failed", t.trial),
            }
        }
        println!(
            "  winner: trial {} at {:.4} with {}",
            result.best_trial, result.best_score, result.best
        );
        // every winner must have come from the sampled domain
        for (key, value) in &result.best.0 {
            assert_eq!(
                space.contains(key, value),
                Some(true),
                "sampled value escaped its domain"
            );
        }
    }
    Ok(())
}
