//! The two neural recommenders: a fused matrix-factorization/MLP scorer
//! trained on sampled negatives, and a variational autoencoder over whole
//! interaction rows.
//!
//!   cargo run --example neural_models

use recbench::corpus::{build_matrix, split_repeated_holdout, Interaction, RawDataset};
use recbench::metrics::{EvalContext, Metric};
use recbench::models::neural::{MultiVae, MultiVaeConfig, NeuMf, NeuMfConfig};
use recbench::models::{batch_recommend, RecommenderModel};

fn main() -> recbench::Result<()> {
    let mut interactions = Vec::new();
    for u in 0..40u32 {
        let group = u % 2;
        for d in 0..12u32 {
            if (u / 2 + d) % 4 != 0 {
                interactions.push(Interaction {
                    user: format!("u{u}"),
                    item: format!("i{}", group * 12 + d),
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
    let split = split_repeated_holdout(&matrix, 1, 0.2, 23);
    let fold = &split.folds[0];

    let neumf = NeuMf::fit(
        &fold.train,
        &NeuMfConfig {
            factors: 8,
            epochs: 40,
            learning_rate: 0.01,
            batch_size: 32,
            negatives: 4,
        },
        23,
    );

    let vae = MultiVae::fit(
        &fold.train,
        &MultiVaeConfig {
            epochs: 60,
            learning_rate: 0.01,
            batch_size: 16,
            intermediate: 24,
            latent: 8,
            reg: 0.1,
        },
        23,
    );

    for model in [&neumf as &dyn RecommenderModel, &vae] {
        let lists = batch_recommend(model, 10);
        let ctx = EvalContext::new(&fold.train, &fold.test, &lists, 10);
        let ndcg = ctx.evaluate(Metric::Ndcg)?;
        let recall = ctx.evaluate(Metric::Recall)?;
        println!(
            "{:<9} nDCG@10 = {ndcg:.4}  Recall@10 = {recall:.4}",
            model.name()
        );
        assert!(ndcg > 0.2, "{} underfits the planted split", model.name());
    }
    Ok(())
}
