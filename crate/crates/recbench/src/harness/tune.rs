//! Random-search hyperparameter tuning.
//!
//! A validation slice is carved out of the first training fold, candidate
//! configurations are drawn independently from the search space, and each
//! is scored by ranking accuracy at cutoff 10 on the held-back slice. The
//! earliest of equally good trials wins, so a rerun with the same seed
//! reproduces the same choice.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{carve_validation, Fold};
use crate::harness::algorithm::{AlgorithmKind, HyperParams};
use crate::harness::spaces::SearchSpace;
use crate::metrics::{EvalContext, Metric};
use crate::models::batch_recommend;
use crate::{Error, Result};

/// Fraction of the training fold held back for scoring candidates.
const VALIDATION_FRACTION: f64 = 0.2;

/// Cutoff used for the tuning objective.
const OBJECTIVE_CUTOFF: usize = 10;

/// One sampled configuration and what became of it.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: usize,
    pub params: HyperParams,
    /// Objective value, when the trial trained and evaluated cleanly.
    pub score: Option<f64>,
    pub error: Option<String>,
}

/// The winning configuration plus the full trial log.
#[derive(Clone, Debug)]
pub struct TuneResult {
    pub best: HyperParams,
    pub best_score: f64,
    pub best_trial: usize,
    pub trials: Vec<TrialOutcome>,
}

/// Runs `trials` rounds of random search for `kind` over `space`.
///
/// Training happens on the fold's interactions minus the validation slice;
/// the slice itself is never shown to the model. Trials that fail to train
/// or evaluate are logged and skipped. If every trial fails the error
/// messages are bundled into [`Error::TuningFailed`].
pub fn tune(
    kind: AlgorithmKind,
    space: &SearchSpace,
    trials: usize,
    fold: &Fold,
    seed: u64,
) -> Result<TuneResult> {
    assert!(trials > 0, "at least one trial is required");
    let (inner_train, validation) = carve_validation(fold, VALIDATION_FRACTION, seed);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::with_capacity(trials);
    let mut best: Option<(usize, f64, HyperParams)> = None;

    for trial in 0..trials {
        // sample before the fallible part so the rng stream is identical
        // no matter which trials fail
        let params = space.sample(&mut rng);
        let model_seed = seed.wrapping_add(trial as u64);
        let scored = kind
            .fit(&inner_train, &params, model_seed)
            .and_then(|model| {
                let lists = batch_recommend(model.as_ref(), OBJECTIVE_CUTOFF);
                let ctx = EvalContext::new(&inner_train, &validation, &lists, OBJECTIVE_CUTOFF);
                ctx.evaluate(Metric::Ndcg)
            });
        match scored {
            Ok(score) => {
                let improved = match &best {
                    Some((_, incumbent, _)) => score > *incumbent,
                    None => true,
                };
                if improved {
                    best = Some((trial, score, params.clone()));
                }
                outcomes.push(TrialOutcome {
                    trial,
                    params,
                    score: Some(score),
                    error: None,
                });
            }
            Err(e) => outcomes.push(TrialOutcome {
                trial,
                params,
                score: None,
                error: Some(e.to_string()),
            }),
        }
    }

    match best {
        Some((best_trial, best_score, best)) => Ok(TuneResult {
            best,
            best_score,
            best_trial,
            trials: outcomes,
        }),
        None => {
            let diagnostics = outcomes
                .iter()
                .map(|o| {
                    format!(
                        "trial {} [{}]: {}",
                        o.trial,
                        o.params,
                        o.error.as_deref().unwrap_or("unknown failure")
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Err(Error::TuningFailed {
                trials,
                diagnostics,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::split_repeated_holdout;
    use crate::corpus::{build_matrix, Interaction, RawDataset};
    use crate::harness::spaces::{default_trials, search_space, Dist};

    fn toy_fold(n_users: usize, n_items: usize, seed: u64) -> Fold {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut interactions = Vec::new();
        for u in 0..n_users {
            for i in 0..n_items {
                // dense-ish triangular pattern keeps every row non-trivial
                if i <= u + 3 || rng.gen_bool(0.3) {
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
        let split = split_repeated_holdout(&matrix, 2, 0.2, seed);
        split.folds.into_iter().next().unwrap()
    }

    #[test]
    fn mostpop_needs_exactly_one_trial() {
        let fold = toy_fold(12, 10, 7);
        let space = search_space(AlgorithmKind::MostPop);
        let trials = default_trials(AlgorithmKind::MostPop);
        assert_eq!(trials, 1);
        let result = tune(AlgorithmKind::MostPop, &space, trials, &fold, 7).unwrap();
        assert_eq!(result.trials.len(), 1);
        assert!(result.best.is_empty());
        assert!(result.best_score.is_finite());
    }

    #[test]
    fn single_point_space_returns_that_point() {
        let space = SearchSpace {
            dims: vec![(
                "topk".to_string(),
                Dist::Choice(vec![crate::harness::algorithm::ParamValue::Int(3)]),
            )],
        };
        let fold = toy_fold(10, 8, 3);
        let result = tune(AlgorithmKind::ItemKnn, &space, 4, &fold, 3).unwrap();
        assert_eq!(result.best.int_or("topk", 0).unwrap(), 3);
        // identical configurations: the first trial must keep the crown
        assert_eq!(result.best_trial, 0);
    }

    #[test]
    fn best_matches_exhaustive_reevaluation() {
        // replay every logged trial by hand and confirm the argmax agrees
        let fold = toy_fold(16, 12, 11);
        let space = search_space(AlgorithmKind::ItemKnn);
        let seed = 11;
        let result = tune(AlgorithmKind::ItemKnn, &space, 8, &fold, seed).unwrap();

        let (inner_train, validation) = carve_validation(&fold, VALIDATION_FRACTION, seed);
        let mut best_seen = f64::NEG_INFINITY;
        let mut best_trial = usize::MAX;
        for outcome in &result.trials {
            let model = AlgorithmKind::ItemKnn
                .fit(
                    &inner_train,
                    &outcome.params,
                    seed.wrapping_add(outcome.trial as u64),
                )
                .unwrap();
            let lists = batch_recommend(model.as_ref(), OBJECTIVE_CUTOFF);
            let ctx = EvalContext::new(&inner_train, &validation, &lists, OBJECTIVE_CUTOFF);
            let score = ctx.evaluate(Metric::Ndcg).unwrap();
            assert_eq!(Some(score), outcome.score, "trial {} drifted", outcome.trial);
            if score > best_seen {
                best_seen = score;
                best_trial = outcome.trial;
            }
        }
        assert_eq!(result.best_trial, best_trial);
        assert_eq!(result.best_score, best_seen);
    }

    #[test]
    fn reruns_are_identical() {
        let fold = toy_fold(14, 10, 5);
        let space = search_space(AlgorithmKind::UserKnn);
        let a = tune(AlgorithmKind::UserKnn, &space, 6, &fold, 5).unwrap();
        let b = tune(AlgorithmKind::UserKnn, &space, 6, &fold, 5).unwrap();
        assert_eq!(a.best_trial, b.best_trial);
        assert_eq!(a.best_score, b.best_score);
        assert_eq!(a.best, b.best);
        for (x, y) in a.trials.iter().zip(&b.trials) {
            assert_eq!(x.params, y.params);
            assert_eq!(x.score, y.score);
        }
    }

    #[test]
    fn all_failures_bundle_diagnostics() {
        // an impossible similarity name makes every trial die in fit
        let space = SearchSpace {
            dims: vec![(
                "similarity".to_string(),
                Dist::Choice(vec![crate::harness::algorithm::ParamValue::Text(
                    "martian".to_string(),
                )]),
            )],
        };
        let fold = toy_fold(8, 6, 2);
        let err = tune(AlgorithmKind::UserKnn, &space, 3, &fold, 2).unwrap_err();
        match err {
            Error::TuningFailed { trials, diagnostics } => {
                assert_eq!(trials, 3);
                assert_eq!(diagnostics.lines().count(), 3);
                assert!(diagnostics.contains("martian"));
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
