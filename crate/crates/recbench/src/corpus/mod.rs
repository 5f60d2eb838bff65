//! Dataset ingestion and preparation: raw interaction files in, binarized
//! p-core filtered sparse matrices and repeated holdout splits out.
//!
//! All types here are immutable once built and safe to share across threads.

mod load;
mod manifest;
mod matrix;
mod split;

pub use load::{binarize, load_interactions, pcore_filter, InputFormat, Interaction, RawDataset};
pub use manifest::{fnv1a64, PrepManifest};
pub use matrix::{build_matrix, DatasetStats, IdMaps, InteractionMatrix};
pub use split::{carve_validation, split_repeated_holdout, Fold, GroundTruth, SplitSet};
