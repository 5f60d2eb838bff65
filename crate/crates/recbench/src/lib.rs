//! Reproducible benchmarking of top-N recommenders on implicit feedback.
//!
//! The crate is organized as a pipeline: [`corpus`] prepares datasets and
//! splits, [`models`] trains recommenders, [`metrics`] scores their ranked
//! lists, and [`harness`] ties everything together with hyperparameter
//! search, leaderboards and reports.

pub mod corpus;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod models;

pub use error::{Error, Result};
