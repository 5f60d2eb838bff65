//! Full-rank linear models: closed-form ridge and elastic-net coordinate
//! descent over the item-item weight matrix.

mod ease;
mod slim;

pub use ease::Ease;
pub use slim::Slim;
