//! Latent factor models trained by alternating least squares or stochastic
//! gradient descent.

mod bpr;
mod ials;
mod mf2020;

pub use bpr::{BprConfig, BprMf};
pub use ials::{ConfidenceScaling, Ials};
pub use mf2020::{BiasedMf, BiasedMfConfig};
