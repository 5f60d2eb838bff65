//! Non-learned recommenders: popularity, random, neighborhoods and the
//! three-hop graph walk.

mod baseline;
mod knn;
mod rp3;
mod similarity;

pub use baseline::{MostPop, Random};
pub use knn::{ItemKnn, UserKnn};
pub use rp3::Rp3Beta;
pub use similarity::{top_k_similar, Similarity};
