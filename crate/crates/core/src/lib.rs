//! Two-view facial expression recognition: auxiliary-view crop synthesis,
//! embedding datasets, an attention fusion network with a hand-derived
//! backward pass, and frame-sequence evaluation utilities.

pub mod data;
pub mod error;
pub mod eval;
pub mod label;
pub mod nn;
pub mod synthesis;
pub mod tensor;

pub use error::{Error, Result};
pub use label::{ExpressionClass, NUM_CLASSES};
pub use tensor::Tensor;
