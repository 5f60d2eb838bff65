//! Neural recommenders and the small dense-network machinery they share.

mod multivae;
mod net;
mod neumf;

pub use multivae::{MultiVae, MultiVaeConfig};
pub use net::{gradient_check, Activation, DenseLayer, GradCheckReport};
pub use neumf::{NeuMf, NeuMfConfig};
