//! Concrete Hadamard-space backends.

pub mod euclidean;
pub mod poincare;
pub mod tree;

pub use euclidean::{Constraint, EuclideanSpace};
pub use poincare::PoincareBall;
pub use tree::{MetricTree, TreePoint};
