//! The full measurement battery on one split: ranking accuracy, catalog
//! coverage, novelty, and popularity-bias statistics side by side for a
//! personalized model and the popularity baseline.
//!
//!   cargo run --example evaluate_metrics

use recbench::corpus::{build_matrix, split_repeated_holdout, Interaction, RawDataset};
use recbench::metrics::{EvalContext, Metric};
use recbench::models::memory::{ItemKnn, MostPop, Similarity};
use recbench::models::{batch_recommend, RecommenderModel};

fn main() -> recbench::Result<()> {
    // popularity-skewed catalog: item i is owned by roughly 60/(i+1) users
    let mut interactions = Vec::new();
    for u in 0..60u32 {
        for i in 0..30u32 {
            if u % (i + 1) == 0 {
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
    let split = split_repeated_holdout(&matrix, 1, 0.2, 31);
    let fold = &split.folds[0];

    let knn = ItemKnn::fit(&fold.train, 10, Similarity::Cosine);
    let pop = MostPop::fit(&fold.train);

    let models: [(&str, &dyn RecommenderModel); 2] = [("ItemKNN", &knn), ("MostPop", &pop)];
    let mut columns = Vec::new();
    for (label, model) in models {
        let lists = batch_recommend(model, 10);
        let ctx = EvalContext::new(&fold.train, &fold.test, &lists, 10);
        let mut values = Vec::new();
        for metric in Metric::ALL {
            // the popularity-group measures can be undefined on tiny data;
            // show the gap instead of failing the whole table
            match ctx.evaluate(metric) {
                Ok(v) => values.push(format!("{v:.4}")),
                Err(_) => values.push("n/a".to_string()),
            }
        }
        columns.push((label, values));
    }

    println!("{:<16} {:>10} {:>10}", "measure", columns[0].0, columns[1].0);
    for (row, metric) in Metric::ALL.iter().enumerate() {
        println!(
            "{:<16} {:>10} {:>10}",
            metric.label(),
            columns[0].1[row],
            columns[1].1[row]
        );
    }

    // the baseline repeats the same head items for everyone, so the
    // personalized model must cover more catalog
    let coverage = |label: &str| {
        let idx = Metric::ALL
            .iter()
            .position(|m| *m == Metric::ItemCoverage)
            .unwrap();
        let col = columns.iter().find(|(l, _)| *l == label).unwrap();
        col.1[idx].parse::<f64>().unwrap()
    };
    assert!(coverage("ItemKNN") > coverage("MostPop"));
    println!("\npersonalization widens coverage, popularity narrows it");
    Ok(())
}
