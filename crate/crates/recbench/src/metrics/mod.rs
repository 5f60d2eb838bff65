//! Ranking quality, catalog coverage, novelty, and exposure measures.
//!
//! All measures are computed from the same [`EvalContext`]: the train fold,
//! the held-out truth, and one truncated top-N list per evaluable user.
//! A user is evaluable when a list was produced for them; users with an
//! empty train row get no list and are excluded everywhere.
//!
//! Accuracy measures additionally skip users whose truth set is empty.
//! Coverage, popularity, and exposure measures use every evaluable user.
//! Accumulation is sequential in user order so repeated runs are
//! bit-identical.

pub mod accuracy;
pub mod beyond;
pub mod correlation;
pub mod report;

pub use correlation::{pearson, CorrelationMatrix};
pub use report::{AggregateRow, MetricReport, ReportRow};

use serde::{Deserialize, Serialize};

use crate::corpus::{GroundTruth, InteractionMatrix};
use crate::{Error, Result};

/// Everything reported for a single (model, fold, cutoff) evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "nDCG")]
    Ndcg,
    #[serde(rename = "MAP")]
    Map,
    #[serde(rename = "MRR")]
    Mrr,
    #[serde(rename = "Precision")]
    Precision,
    #[serde(rename = "Recall")]
    Recall,
    #[serde(rename = "F1")]
    F1,
    #[serde(rename = "ItemCoverage")]
    ItemCoverage,
    #[serde(rename = "GiniComplement")]
    GiniComplement,
    #[serde(rename = "EFD")]
    Efd,
    #[serde(rename = "EPC")]
    Epc,
    #[serde(rename = "PREO")]
    Preo,
    #[serde(rename = "PRSP")]
    Prsp,
    #[serde(rename = "APLT")]
    Aplt,
    #[serde(rename = "ACLT")]
    Aclt,
    #[serde(rename = "ARP")]
    Arp,
}

impl Metric {
    pub const ALL: [Metric; 15] = [
        Metric::Ndcg,
        Metric::Map,
        Metric::Mrr,
        Metric::Precision,
        Metric::Recall,
        Metric::F1,
        Metric::ItemCoverage,
        Metric::GiniComplement,
        Metric::Efd,
        Metric::Epc,
        Metric::Preo,
        Metric::Prsp,
        Metric::Aplt,
        Metric::Aclt,
        Metric::Arp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Ndcg => "nDCG",
            Metric::Map => "MAP",
            Metric::Mrr => "MRR",
            Metric::Precision => "Precision",
            Metric::Recall => "Recall",
            Metric::F1 => "F1",
            Metric::ItemCoverage => "ItemCoverage",
            Metric::GiniComplement => "GiniComplement",
            Metric::Efd => "EFD",
            Metric::Epc => "EPC",
            Metric::Preo => "PREO",
            Metric::Prsp => "PRSP",
            Metric::Aplt => "APLT",
            Metric::Aclt => "ACLT",
            Metric::Arp => "ARP",
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        Metric::ALL
            .iter()
            .copied()
            .find(|m| m.label().eq_ignore_ascii_case(s))
    }

    /// True for measures that compare lists against held-out truth.
    pub fn is_accuracy(self) -> bool {
        matches!(
            self,
            Metric::Ndcg
                | Metric::Map
                | Metric::Mrr
                | Metric::Precision
                | Metric::Recall
                | Metric::F1
        )
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::parse(s).ok_or_else(|| Error::Config(format!("unknown metric `{s}`")))
    }
}

/// Shared state for scoring one set of recommendation lists against one fold.
///
/// `lists[u]` is `None` for non-evaluable users and is truncated to `cutoff`
/// before any measure sees it.
pub struct EvalContext<'a> {
    train: &'a InteractionMatrix,
    truth: &'a GroundTruth,
    lists: &'a [Option<Vec<u32>>],
    cutoff: usize,
    item_counts: Vec<u32>,
    total_interactions: u64,
    max_count: u32,
    short_head: Vec<bool>,
}

impl<'a> EvalContext<'a> {
    pub fn new(
        train: &'a InteractionMatrix,
        truth: &'a GroundTruth,
        lists: &'a [Option<Vec<u32>>],
        cutoff: usize,
    ) -> Self {
        assert_eq!(lists.len(), train.n_users(), "one list slot per user");
        assert!(cutoff > 0, "cutoff must be positive");
        let item_counts = train.item_counts();
        let total_interactions = item_counts.iter().map(|&c| u64::from(c)).sum();
        let max_count = item_counts.iter().copied().max().unwrap_or(0);
        let short_head = short_head_mask(&item_counts);
        EvalContext {
            train,
            truth,
            lists,
            cutoff,
            item_counts,
            total_interactions,
            max_count,
            short_head,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn train(&self) -> &InteractionMatrix {
        self.train
    }

    pub fn truth(&self) -> &GroundTruth {
        self.truth
    }

    pub fn item_counts(&self) -> &[u32] {
        &self.item_counts
    }

    pub fn total_interactions(&self) -> u64 {
        self.total_interactions
    }

    pub fn max_count(&self) -> u32 {
        self.max_count
    }

    /// Short-head flag per item: the `ceil(0.2 * catalog)` most interacted
    /// items of the train fold, ties broken by lower index.
    pub fn short_head(&self) -> &[bool] {
        &self.short_head
    }

    /// Evaluable users with their lists truncated to the cutoff.
    pub fn evaluable_lists(&self) -> impl Iterator<Item = (u32, &[u32])> {
        let cutoff = self.cutoff;
        self.lists.iter().enumerate().filter_map(move |(u, l)| {
            l.as_ref()
                .map(|l| (u as u32, &l[..l.len().min(cutoff)]))
        })
    }

    /// Evaluable users that also have held-out truth, as (user, list, truth).
    pub fn scored_lists(&self) -> impl Iterator<Item = (u32, &[u32], &[u32])> {
        self.evaluable_lists().filter_map(move |(u, l)| {
            let t = self.truth.relevant(u);
            if t.is_empty() {
                None
            } else {
                Some((u, l, t))
            }
        })
    }

    pub fn evaluate(&self, metric: Metric) -> Result<f64> {
        match metric {
            Metric::Ndcg => Ok(self.mean_scored(accuracy::ndcg_at)),
            Metric::Map => Ok(self.mean_scored(accuracy::average_precision_at)),
            Metric::Mrr => Ok(self.mean_scored(|l, t, _| accuracy::reciprocal_rank(l, t))),
            Metric::Precision => Ok(self.mean_scored(accuracy::precision_at)),
            Metric::Recall => Ok(self.mean_scored(|l, t, _| accuracy::recall(l, t))),
            Metric::F1 => Ok(accuracy::f1_per_user(&self.precision_recall_pairs())),
            Metric::ItemCoverage => Ok(beyond::item_coverage(self)),
            Metric::GiniComplement => beyond::gini_complement(self),
            Metric::Efd => Ok(beyond::expected_free_discovery(self)),
            Metric::Epc => Ok(beyond::expected_popularity_complement(self)),
            Metric::Preo => beyond::popularity_equal_opportunity(self),
            Metric::Prsp => beyond::popularity_statistical_parity(self),
            Metric::Aplt => Ok(beyond::long_tail_share(self)),
            Metric::Aclt => Ok(beyond::long_tail_count(self)),
            Metric::Arp => Ok(beyond::mean_recommended_popularity(self)),
        }
    }

    /// All measures in [`Metric::ALL`] order; fails on the first error.
    pub fn evaluate_all(&self) -> Result<Vec<(Metric, f64)>> {
        Metric::ALL
            .iter()
            .map(|&m| self.evaluate(m).map(|v| (m, v)))
            .collect()
    }

    /// The alternative F1 convention: harmonic mean of the per-population
    /// Precision and Recall averages instead of a per-user harmonic mean.
    pub fn f1_of_averages(&self) -> f64 {
        accuracy::f1_of_means(&self.precision_recall_pairs())
    }

    fn precision_recall_pairs(&self) -> Vec<(f64, f64)> {
        self.scored_lists()
            .map(|(_, l, t)| {
                (
                    accuracy::precision_at(l, t, self.cutoff),
                    accuracy::recall(l, t),
                )
            })
            .collect()
    }

    fn mean_scored(&self, f: impl Fn(&[u32], &[u32], usize) -> f64) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (_, list, truth) in self.scored_lists() {
            sum += f(list, truth, self.cutoff);
            n += 1;
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

fn short_head_mask(item_counts: &[u32]) -> Vec<bool> {
    let n = item_counts.len();
    let head = ((0.2 * n as f64).ceil() as usize).min(n);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        item_counts[b as usize]
            .cmp(&item_counts[a as usize])
            .then(a.cmp(&b))
    });
    let mut mask = vec![false; n];
    for &i in &order[..head] {
        mask[i as usize] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{GroundTruth, IdMaps, InteractionMatrix};
    use std::sync::Arc;

    fn tiny_matrix(rows: Vec<Vec<u32>>, n_items: usize) -> InteractionMatrix {
        let ids = IdMaps::synthetic(rows.len(), n_items);
        InteractionMatrix::from_index_rows(Arc::new(ids), rows)
    }

    #[test]
    fn labels_round_trip() {
        for m in Metric::ALL {
            assert_eq!(Metric::parse(m.label()), Some(m));
            assert_eq!(Metric::parse(&m.label().to_uppercase()), Some(m));
        }
        assert_eq!(Metric::parse("not-a-metric"), None);
    }

    #[test]
    fn serde_uses_display_labels() {
        let json = serde_json::to_string(&Metric::Ndcg).unwrap();
        assert_eq!(json, "\"nDCG\"");
        let back: Metric = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Metric::Ndcg);
    }

    #[test]
    fn short_head_is_fifth_of_catalog_with_index_tie_break() {
        // Ten items, ceil(0.2 * 10) = 2 head slots. Counts tie at 3 between
        // items 4 and 7, so the lower index wins the second slot.
        let mut counts = vec![1u32; 10];
        counts[2] = 9;
        counts[4] = 3;
        counts[7] = 3;
        let mask = short_head_mask(&counts);
        let head: Vec<usize> = (0..10).filter(|&i| mask[i]).collect();
        assert_eq!(head, vec![2, 4]);
    }

    #[test]
    fn evaluable_lists_skip_missing_users_and_truncate() {
        let train = tiny_matrix(vec![vec![0], vec![1], vec![2]], 4);
        let truth = GroundTruth::from_rows(vec![vec![3], vec![], vec![0]]);
        let lists = vec![Some(vec![1, 2, 3]), None, Some(vec![0])];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);

        let seen: Vec<(u32, Vec<u32>)> = ctx
            .evaluable_lists()
            .map(|(u, l)| (u, l.to_vec()))
            .collect();
        assert_eq!(seen, vec![(0, vec![1, 2]), (2, vec![0])]);

        // user 1 has no list, user 2 has truth, user 0 has truth.
        let scored: Vec<u32> = ctx.scored_lists().map(|(u, _, _)| u).collect();
        assert_eq!(scored, vec![0, 2]);
    }

    #[test]
    fn accuracy_means_ignore_users_without_truth() {
        let train = tiny_matrix(vec![vec![0], vec![1]], 3);
        // User 1 has no held-out items: a perfect hit for user 0 must not be
        // diluted by user 1's empty truth.
        let truth = GroundTruth::from_rows(vec![vec![2], vec![]]);
        let lists = vec![Some(vec![2]), Some(vec![2])];
        let ctx = EvalContext::new(&train, &truth, &lists, 1);
        assert_eq!(ctx.evaluate(Metric::Precision).unwrap(), 1.0);
        assert_eq!(ctx.evaluate(Metric::Ndcg).unwrap(), 1.0);
    }
}
