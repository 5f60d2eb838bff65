//! The two item-item linear models: the closed-form autoencoder solves one
//! ridge system for the whole weight matrix, the sparse elastic-net model
//! fits one regularized column per item.
//!
//!   cargo run --example linear_models

use recbench::corpus::{build_matrix, split_repeated_holdout, Interaction, RawDataset};
use recbench::metrics::{EvalContext, Metric};
use recbench::models::linear::{Ease, Slim};
use recbench::models::{batch_recommend, RecommenderModel};

fn main() -> recbench::Result<()> {
    let mut interactions = Vec::new();
    // 3 overlapping genres of 8 items; users sample mostly from one
    for u in 0..45u32 {
        let genre = u % 3;
        for d in 0..8u32 {
            if (u + d) % 4 != 0 {
                interactions.push(Interaction {
                    user: format!("u{u}"),
                    item: format!("i{}", genre * 8 + d),
                    rating: 1.0,
                    timestamp: None,
                });
            }
        }
        // a little cross-genre noise
        interactions.push(Interaction {
            user: format!("u{u}"),
            item: format!("i{}", (genre * 8 + 11 + u) % 24),
            rating: 1.0,
            timestamp: None,
        });
    }
    let matrix = build_matrix(&RawDataset {
        interactions,
        duplicates_collapsed: 0,
    });
    let split = split_repeated_holdout(&matrix, 1, 0.2, 3);
    let fold = &split.folds[0];

    let ease = Ease::fit(&fold.train, 20.0)?;
    let slim = Slim::fit(&fold.train, 24, 0.05, 0.05);

    for model in [&ease as &dyn RecommenderModel, &slim] {
        let lists = batch_recommend(model, 10);
        let ctx = EvalContext::new(&fold.train, &fold.test, &lists, 10);
        println!(
            "{:<6} nDCG@10 = {:.4}  Recall@10 = {:.4}",
            model.name(),
            ctx.evaluate(Metric::Ndcg)?,
            ctx.evaluate(Metric::Recall)?,
        );
    }

    // the elastic net leaves most of the weight matrix empty
    let nnz = slim.nonzeros();
    let dense = matrix.n_items() * matrix.n_items();
    println!(
        "sparse model keeps {nnz}/{dense} weights ({:.1}%)",
        100.0 * nnz as f64 / dense as f64
    );
    Ok(())
}
