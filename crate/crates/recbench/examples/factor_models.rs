//! Three latent-factor recommenders trained on the same data: weighted
//! alternating least squares, pairwise-ranking SGD, and pointwise logistic
//! SGD with biases and negative sampling.
//!
//!   cargo run --example factor_models

use recbench::corpus::{build_matrix, split_repeated_holdout, Interaction, RawDataset};
use recbench::metrics::{EvalContext, Metric};
use recbench::models::mf::{BiasedMf, BiasedMfConfig, BprConfig, BprMf, ConfidenceScaling, Ials};
use recbench::models::{batch_recommend, RecommenderModel};

fn main() -> recbench::Result<()> {
    let mut interactions = Vec::new();
    for u in 0..48u32 {
        let group = u % 4;
        for d in 0..9u32 {
            if (u / 4 + d) % 3 != 0 {
                interactions.push(Interaction {
                    user: format!("u{u}"),
                    item: format!("i{}", group * 9 + d),
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
    let split = split_repeated_holdout(&matrix, 1, 0.2, 17);
    let fold = &split.folds[0];

    let ials = Ials::fit(
        &fold.train,
        8,
        15,
        0.05,
        ConfidenceScaling::Log {
            alpha: 10.0,
            epsilon: 1.0,
        },
        17,
    )?;

    let bpr = BprMf::fit(
        &fold.train,
        &BprConfig {
            factors: 8,
            epochs: 200,
            learning_rate: 0.08,
            batch_size: 32,
            reg_user: 0.002,
            reg_positive: 0.002,
            reg_negative: 0.002,
        },
        17,
    );

    let biased = BiasedMf::fit(
        &fold.train,
        &BiasedMfConfig {
            factors: 8,
            epochs: 60,
            learning_rate: 0.05,
            reg: 0.002,
            negatives: 4,
        },
        17,
    );

    for model in [&ials as &dyn RecommenderModel, &bpr, &biased] {
        let lists = batch_recommend(model, 10);
        let ctx = EvalContext::new(&fold.train, &fold.test, &lists, 10);
        let ndcg = ctx.evaluate(Metric::Ndcg)?;
        println!("{:<8} nDCG@10 = {ndcg:.4}", model.name());
        assert!(
            ndcg > 0.2,
            "{} should beat chance comfortably on planted groups",
            model.name()
        );
    }
    Ok(())
}
