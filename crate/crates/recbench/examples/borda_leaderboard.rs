//! Rank aggregation: each (dataset, metric) pair votes for algorithms in
//! its preferred order, and the point totals form a consensus leaderboard
//! that ignores how large the metric gaps are.
//!
//!   cargo run --example borda_leaderboard

use recbench::harness::borda_count;
use recbench::metrics::{AggregateRow, Metric};

fn row(alg: &str, dataset: &str, metric: Metric, mean: f64) -> AggregateRow {
    AggregateRow {
        algorithm: alg.to_string(),
        dataset: dataset.to_string(),
        cutoff: 10,
        metric,
        mean,
        std: 0.0,
        folds: 5,
    }
}

fn main() -> recbench::Result<()> {
    // three systems, two datasets: Steady is middling everywhere, Sprinter
    // dominates one dataset and collapses on the other, Laggard trails
    let metrics = [Metric::Ndcg, Metric::Recall];
    let mut rows = Vec::new();
    for metric in metrics {
        rows.push(row("Steady", "books", metric, 0.30));
        rows.push(row("Sprinter", "books", metric, 0.45));
        rows.push(row("Laggard", "books", metric, 0.10));

        rows.push(row("Steady", "music", metric, 0.28));
        rows.push(row("Sprinter", "music", metric, 0.05));
        rows.push(row("Laggard", "music", metric, 0.12));
    }

    let board = borda_count(&rows, &metrics, 10)?;
    println!("{:<10} {:>7} {:>10}", "algorithm", "points", "mean rank");
    for e in &board {
        println!("{:<10} {:>7} {:>10.2}", e.algorithm, e.points, e.mean_rank());
    }

    // 4 votes, 2 points for a win: consistency beats one big splash
    assert_eq!(board[0].algorithm, "Steady");
    assert_eq!(board[0].points, 6.0);
    let sprinter = board.iter().find(|e| e.algorithm == "Sprinter").unwrap();
    assert_eq!(sprinter.points, 4.0);
    println!("\nSprinter wins every books vote yet loses overall:");
    println!("rank points reward being good everywhere, not spiking once");

    // scaling a dataset's values changes nothing, only order matters
    let mut scaled = rows.clone();
    for r in &mut scaled {
        if r.dataset == "music" {
            r.mean *= 1000.0;
        }
    }
    assert_eq!(borda_count(&scaled, &metrics, 10)?, board);
    println!("multiplying one dataset's scores by 1000 leaves the board unchanged");
    Ok(())
}
