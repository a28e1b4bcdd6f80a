//! Laplace noise and the adaptive tree-based mechanism.

mod laplace;
mod tree;

use thiserror::Error;

pub use laplace::{lap_sample, laplace_quantile, LaplaceScale, NoiseMode, NoiseSource};
pub use tree::{tree_noise_bound, AdaptiveTree, TreeDraw};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanismError {
    #[error("laplace scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("value {value} exceeds declared bound {bound}")]
    BoundViolation { value: f64, bound: f64 },
    #[error("bound decreased from {previous} to {next}")]
    DecreasingBound { previous: f64, next: f64 },
    #[error("tree is full ({horizon} items)")]
    HorizonExceeded { horizon: u64 },
    #[error("{0}")]
    InvalidParameter(String),
}
