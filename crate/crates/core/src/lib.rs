//! Saddle-point computation on Hadamard (complete CAT(0)) spaces.
//!
//! The toolkit provides:
//!
//! - three concrete geodesic-space backends (Euclidean subsets, the Poincaré
//!   ball, finite weighted metric trees) behind a common [`geometry::Space`]
//!   interface, together with ℓ²-products, comparison triangles, metric
//!   projections and asymptotic-center estimation;
//! - concave–convex saddle problems with certificate flags and a benchmark
//!   library ([`problems`]);
//! - resolvents of saddle functions (closed forms where available, a damped
//!   alternating best-response scheme otherwise) plus the associated
//!   inequality checks ([`resolvent`]);
//! - the proximal point algorithm with Fejér and residual diagnostics
//!   ([`ppa`]);
//! - a brute-force grid minimax oracle ([`oracle`]);
//! - a batch CLI front end ([`cli`]).

pub mod cli;
pub mod geometry;
pub mod oracle;
pub mod ppa;
pub mod problems;
pub mod resolvent;
pub mod search;
pub mod spaces;

pub use geometry::{Point, ProductMetric, ProductPoint, ProductSpace, Space};
pub use problems::{Certificates, SaddleProblem};
