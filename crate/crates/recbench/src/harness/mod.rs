//! Experiment orchestration: algorithm dispatch, search spaces and
//! published presets, random-search tuning, the fold runner, rank
//! aggregation, and report emission.

pub mod algorithm;
pub mod borda;
pub mod config;
pub mod presets;
pub mod report;
pub mod runner;
pub mod spaces;
pub mod tune;

pub use algorithm::{parse_similarity, AlgorithmKind, HyperParams, ParamValue};
pub use borda::{borda_count, LeaderboardEntry};
pub use config::{AlgorithmConfig, DatasetConfig, ExperimentConfig, OUTPUT_ENV};
pub use presets::{canonical_tag, preset, preset_space_deviations, Deviation, DATASET_TAGS};
pub use report::{emit_report, ReportInputs, STRONG_CORRELATION};
pub use runner::{run_experiment, AlgorithmSpec, FailureRow, RunOutcome, TimingRow};
pub use spaces::{default_trials, search_space, Dist, SearchSpace};
pub use tune::{tune, TrialOutcome, TuneResult};
