//! Fair-data preprocessing: an adversarial encoder/decoder that strips
//! protected-attribute information from tabular data, plus the bias audit
//! used to measure downstream models before and after.

pub mod audit;
pub mod debias;
pub mod error;
pub mod linalg;
pub mod ml;
pub mod rng;
pub mod studies;
pub mod tabular;

pub use error::{Error, Result};
