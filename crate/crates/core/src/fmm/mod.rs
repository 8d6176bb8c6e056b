//! Interpolation-based fast multipole compression of the single-layer
//! operator.

mod interpolation;
mod operator;
mod tree;

pub use interpolation::Chebyshev;
pub use operator::{CompressedOperator, FarField, FmmConfig, FmmStats, NearField};
pub use tree::{is_admissible, ClusterTree, Partition};
