//! Rank aggregation across datasets and measures.
//!
//! Each (dataset, metric) pair casts one vote: algorithms are ordered by
//! their cross-fold mean and awarded `c - 1 - rank` points, where `c` is
//! the number of contenders. Exactly equal values split their point mass
//! evenly. Summing over votes yields a consensus leaderboard that only
//! depends on orderings, never on the magnitudes behind them.

use std::collections::{BTreeMap, BTreeSet};

use crate::metrics::{AggregateRow, Metric};
use crate::{Error, Result};

/// Final standing of one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct LeaderboardEntry {
    pub algorithm: String,
    pub points: f64,
    /// Tie-averaged 1-based rank in each vote, vote order being dataset
    /// (ascending) major, metric (as passed) minor.
    pub ranks: Vec<f64>,
}

impl LeaderboardEntry {
    pub fn mean_rank(&self) -> f64 {
        if self.ranks.is_empty() {
            return f64::NAN;
        }
        self.ranks.iter().sum::<f64>() / self.ranks.len() as f64
    }
}

/// Aggregates `rows` at one cutoff into a leaderboard. Every algorithm
/// must have a value for every (dataset, metric) vote; a hole is an error
/// rather than a silent zero, because missing evidence and losing are not
/// the same thing.
pub fn borda_count(
    rows: &[AggregateRow],
    metrics: &[Metric],
    cutoff: usize,
) -> Result<Vec<LeaderboardEntry>> {
    assert!(!metrics.is_empty(), "at least one metric is required");
    let at_cutoff: Vec<&AggregateRow> = rows.iter().filter(|r| r.cutoff == cutoff).collect();

    let mut algorithms: BTreeSet<&str> = BTreeSet::new();
    let mut datasets: BTreeSet<&str> = BTreeSet::new();
    let mut cells: BTreeMap<(&str, &'static str, &str), f64> = BTreeMap::new();
    for r in &at_cutoff {
        algorithms.insert(&r.algorithm);
        datasets.insert(&r.dataset);
        cells.insert((&r.dataset, r.metric.label(), &r.algorithm), r.mean);
    }
    if algorithms.is_empty() {
        return Err(Error::Config(format!(
            "no aggregate rows at cutoff {cutoff}"
        )));
    }
    let c = algorithms.len();

    let mut points: BTreeMap<&str, f64> = algorithms.iter().map(|&a| (a, 0.0)).collect();
    let mut ranks: BTreeMap<&str, Vec<f64>> = algorithms.iter().map(|&a| (a, Vec::new())).collect();

    for dataset in &datasets {
        for metric in metrics {
            // gather the column for this vote, failing loudly on holes
            let mut column: Vec<(&str, f64)> = Vec::with_capacity(c);
            for &alg in &algorithms {
                match cells.get(&(*dataset, metric.label(), alg)) {
                    Some(&v) => column.push((alg, v)),
                    None => {
                        return Err(Error::MissingCell {
                            algorithm: alg.to_string(),
                            dataset: dataset.to_string(),
                            metric: metric.label().to_string(),
                        })
                    }
                }
            }
            column.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));

            // walk runs of exactly equal values and split their points
            let mut start = 0;
            while start < column.len() {
                let mut end = start + 1;
                while end < column.len() && column[end].1 == column[start].1 {
                    end += 1;
                }
                let span = (end - start) as f64;
                let shared_points = (start..end)
                    .map(|r| (c - 1 - r) as f64)
                    .sum::<f64>()
                    / span;
                let shared_rank = (start..end).map(|r| (r + 1) as f64).sum::<f64>() / span;
                for &(alg, _) in &column[start..end] {
                    *points.get_mut(alg).unwrap() += shared_points;
                    ranks.get_mut(alg).unwrap().push(shared_rank);
                }
                start = end;
            }
        }
    }

    let mut board: Vec<LeaderboardEntry> = algorithms
        .iter()
        .map(|&a| LeaderboardEntry {
            algorithm: a.to_string(),
            points: points[a],
            ranks: ranks.remove(a).unwrap(),
        })
        .collect();
    board.sort_by(|a, b| {
        b.points
            .partial_cmp(&a.points)
            .unwrap()
            .then(a.algorithm.cmp(&b.algorithm))
    });
    Ok(board)
}
