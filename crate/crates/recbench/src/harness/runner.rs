//! Executes a grid of (algorithm, fold) cells over one dataset split and
//! collects metric rows, wall-clock timings, and failures.
//!
//! Cells run one at a time on purpose: models parallelize internally, and
//! overlapping cells would corrupt the per-cell timing numbers.

use std::time::Instant;

use crate::corpus::SplitSet;
use crate::harness::algorithm::{AlgorithmKind, HyperParams};
use crate::metrics::{EvalContext, Metric, MetricReport, ReportRow};
use crate::models::batch_recommend;

/// One algorithm to run, under a display label (labels let the same kind
/// appear twice with different parameters).
#[derive(Clone, Debug)]
pub struct AlgorithmSpec {
    pub label: String,
    pub kind: AlgorithmKind,
    pub params: HyperParams,
}

impl AlgorithmSpec {
    pub fn new(kind: AlgorithmKind, params: HyperParams) -> AlgorithmSpec {
        AlgorithmSpec {
            label: kind.label().to_string(),
            kind,
            params,
        }
    }

    pub fn labeled(label: &str, kind: AlgorithmKind, params: HyperParams) -> AlgorithmSpec {
        AlgorithmSpec {
            label: label.to_string(),
            kind,
            params,
        }
    }
}

/// Wall-clock seconds for one cell, training and scoring kept separate.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TimingRow {
    pub algorithm: String,
    pub dataset: String,
    pub fold: usize,
    pub train_seconds: f64,
    pub eval_seconds: f64,
}

/// A cell or metric that did not produce a value.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FailureRow {
    pub algorithm: String,
    pub dataset: String,
    pub fold: usize,
    pub error: String,
}

/// Everything one experiment produced.
#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub report: MetricReport,
    pub timings: Vec<TimingRow>,
    pub failures: Vec<FailureRow>,
}

impl RunOutcome {
    /// True when every cell trained and every metric evaluated.
    pub fn fully_successful(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Trains every spec on every fold and evaluates the full metric set at
/// each cutoff. A failed fit skips that cell; a failed metric skips that
/// value; either way the run keeps going and the problem is logged in
/// `failures`.
pub fn run_experiment(
    dataset: &str,
    split: &SplitSet,
    specs: &[AlgorithmSpec],
    cutoffs: &[usize],
    seed: u64,
) -> RunOutcome {
    assert!(!cutoffs.is_empty(), "at least one cutoff is required");
    let max_cutoff = cutoffs.iter().copied().max().unwrap();
    let mut outcome = RunOutcome::default();

    for spec in specs {
        for (fold_idx, fold) in split.folds.iter().enumerate() {
            let fit_seed = seed.wrapping_add(fold_idx as u64);
            let started = Instant::now();
            let model = match spec.kind.fit(&fold.train, &spec.params, fit_seed) {
                Ok(m) => m,
                Err(e) => {
                    outcome.failures.push(FailureRow {
                        algorithm: spec.label.clone(),
                        dataset: dataset.to_string(),
                        fold: fold_idx,
                        error: format!("fit: {e}"),
                    });
                    continue;
                }
            };
            let train_seconds = started.elapsed().as_secs_f64();

            let started = Instant::now();
            let lists = batch_recommend(model.as_ref(), max_cutoff);
            for &cutoff in cutoffs {
                let ctx = EvalContext::new(&fold.train, &fold.test, &lists, cutoff);
                for metric in Metric::ALL {
                    match ctx.evaluate(metric) {
                        Ok(value) => outcome.report.push(ReportRow {
                            algorithm: spec.label.clone(),
                            dataset: dataset.to_string(),
                            fold: fold_idx,
                            cutoff,
                            metric,
                            value,
                        }),
                        Err(e) => outcome.failures.push(FailureRow {
                            algorithm: spec.label.clone(),
                            dataset: dataset.to_string(),
                            fold: fold_idx,
                            error: format!("{metric}@{cutoff}: {e}"),
                        }),
                    }
                }
            }
            let eval_seconds = started.elapsed().as_secs_f64();

            outcome.timings.push(TimingRow {
                algorithm: spec.label.clone(),
                dataset: dataset.to_string(),
                fold: fold_idx,
                train_seconds,
                eval_seconds,
            });
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_matrix, split_repeated_holdout, Interaction, RawDataset};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_split(seed: u64) -> crate::corpus::SplitSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut interactions = Vec::new();
        for u in 0..20 {
            for i in 0..15 {
                if i <= u % 6 + 4 || rng.gen_bool(0.25) {
                    interactions.push(Interaction {
                        user: format!("u{u}"),
                        item: format!("i{i}"),
                        rating: 1.0,
                        timestamp: None,
                    });
                }
            }
        }
        let matrix = build_matrix(&RawDataset { interactions, duplicates_collapsed: 0 });
        split_repeated_holdout(&matrix, 5, 0.2, seed)
    }

    fn specs() -> Vec<AlgorithmSpec> {
        vec![
            AlgorithmSpec::new(AlgorithmKind::MostPop, HyperParams::new()),
            AlgorithmSpec::new(
                AlgorithmKind::ItemKnn,
                HyperParams::new()
                    .with_int("topk", 5)
                    .with_text("similarity", "cosine"),
            ),
        ]
    }

    #[test]
    fn produces_one_row_per_metric_cutoff_fold() {
        let split = toy_split(9);
        let out = run_experiment("toy", &split, &specs(), &[5, 10], 9);
        assert!(out.fully_successful(), "failures: {:?}", out.failures);
        // 2 algorithms x 5 folds x 2 cutoffs x 15 metrics
        assert_eq!(out.report.rows.len(), 2 * 5 * 2 * 15);
        assert_eq!(out.timings.len(), 2 * 5);
        for t in &out.timings {
            assert!(t.train_seconds >= 0.0 && t.eval_seconds >= 0.0);
        }
    }

    #[test]
    fn accuracy_rows_stay_in_unit_interval() {
        let split = toy_split(4);
        let out = run_experiment("toy", &split, &specs(), &[10], 4);
        for row in &out.report.rows {
            if row.metric.is_accuracy() {
                assert!(
                    (0.0..=1.0).contains(&row.value),
                    "{} {} = {}",
                    row.algorithm,
                    row.metric,
                    row.value
                );
            }
        }
    }

    #[test]
    fn reruns_are_byte_identical() {
        let split = toy_split(7);
        let a = run_experiment("toy", &split, &specs(), &[5, 10], 7);
        let b = run_experiment("toy", &split, &specs(), &[5, 10], 7);
        assert_eq!(a.report.to_csv(), b.report.to_csv());
    }

    #[test]
    fn failed_fit_becomes_a_failure_row_and_the_run_continues() {
        let split = toy_split(3);
        let bad = AlgorithmSpec::labeled(
            "BrokenKnn",
            AlgorithmKind::UserKnn,
            HyperParams::new().with_text("similarity", "no-such-thing"),
        );
        let mut all = specs();
        all.push(bad);
        let out = run_experiment("toy", &split, &all, &[10], 3);
        assert!(!out.fully_successful());
        // one fit failure per fold, nothing else
        assert_eq!(out.failures.len(), split.folds.len());
        for f in &out.failures {
            assert_eq!(f.algorithm, "BrokenKnn");
            assert!(f.error.starts_with("fit:"));
        }
        // the healthy specs still produced their full grid
        assert_eq!(out.report.rows.len(), 2 * 5 * 15);
        assert_eq!(out.timings.len(), 2 * 5);
    }

    #[test]
    fn recommendations_never_leak_training_items() {
        let split = toy_split(12);
        let out = run_experiment("toy", &split, &specs(), &[10], 12);
        assert!(out.fully_successful());
        // re-derive the lists exactly as the runner does and cross-check
        for spec in specs() {
            for (fold_idx, fold) in split.folds.iter().enumerate() {
                let model = spec
                    .kind
                    .fit(&fold.train, &spec.params, 12u64.wrapping_add(fold_idx as u64))
                    .unwrap();
                let lists = batch_recommend(model.as_ref(), 10);
                for (u, list) in lists.iter().enumerate() {
                    let Some(list) = list else { continue };
                    for &i in list {
                        assert!(
                            !fold.train.contains(u as u32, i),
                            "{} fold {fold_idx} recommended a training item",
                            spec.label
                        );
                    }
                }
            }
        }
    }
}
