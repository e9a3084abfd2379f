//! Geodesic-space interface: points, backends, products, and the CAT(0)
//! inequality checks.
//!
//! A [`Space`] is one of the three Hadamard-space backends. All operations
//! validate their points against the backend's domain and return
//! [`GeometryError`] on mismatch; distances and geodesics are exact up to
//! floating-point error (Euclidean, trees) or accumulated transcendental
//! error (Poincaré ball).

mod center;
mod checks;
mod product;
mod projection;
mod triangle;

pub use center::{asymptotic_center_estimate, delta_convergence_probe, AsymptoticCenter, DeltaProbeReport, DeltaWitnessTail};
pub use checks::{check_cn_inequality, check_quadrilateral_cs};
pub use product::{ProductMetric, ProductPoint, ProductSpace};
pub use projection::project_to_segment;
pub use triangle::{comparison_triangle, ComparisonTriangle};

use crate::search::LineSearch;
use crate::spaces::euclidean::EuclideanSpace;
use crate::spaces::poincare::PoincareBall;
use crate::spaces::tree::{MetricTree, TreePoint};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by geometry operations.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("parameter out of range: {name} = {value}, expected [{lo}, {hi}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("triangle inequality violated by side lengths ({a}, {b}, {c})")]
    TriangleInequalityViolated { a: f64, b: f64, c: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point on or outside the Poincaré ball boundary margin (norm {norm})")]
    PointOnBoundary { norm: f64 },
    #[error("invalid edge id {id} (tree has {count} edges)")]
    InvalidEdgeId { id: usize, count: usize },
    #[error("offset {offset} outside edge of length {len}")]
    OffsetOutOfRange { offset: f64, len: f64 },
    #[error("empty tail: tail_start {tail_start} >= sequence length {len}")]
    EmptyTail { tail_start: usize, len: usize },
}

/// A point of some backend space.
///
/// `Vector` serves the Euclidean and Poincaré backends; `Tree` encodes a
/// point on a metric tree as (edge id, offset from the edge's first vertex).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Vector(Vec<f64>),
    Tree(TreePoint),
}

impl Point {
    pub fn vector(coords: impl Into<Vec<f64>>) -> Self {
        Point::Vector(coords.into())
    }

    pub fn tree(edge: usize, offset: f64) -> Self {
        Point::Tree(TreePoint { edge, offset })
    }

    pub fn as_vector(&self) -> Result<&[f64], GeometryError> {
        match self {
            Point::Vector(v) => Ok(v),
            Point::Tree(_) => Err(GeometryError::InvalidPoint(
                "expected a coordinate-vector point, got a tree point".into(),
            )),
        }
    }

    pub fn as_tree(&self) -> Result<TreePoint, GeometryError> {
        match self {
            Point::Tree(t) => Ok(*t),
            Point::Vector(_) => Err(GeometryError::InvalidPoint(
                "expected a tree point, got a coordinate-vector point".into(),
            )),
        }
    }

    /// Flat coordinate encoding used by trace CSV export.
    pub fn flatten(&self) -> Vec<f64> {
        match self {
            Point::Vector(v) => v.clone(),
            Point::Tree(t) => vec![t.edge as f64, t.offset],
        }
    }
}

/// A geodesic-space backend: point validity, distance, and geodesics.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Euclidean(EuclideanSpace),
    Poincare(PoincareBall),
    Tree(MetricTree),
}

impl Space {
    /// Checks that `p` belongs to the backend's domain.
    pub fn validate(&self, p: &Point) -> Result<(), GeometryError> {
        match self {
            Space::Euclidean(s) => s.validate(p.as_vector()?),
            Space::Poincare(s) => s.validate(p.as_vector()?),
            Space::Tree(s) => s.validate(p.as_tree()?),
        }
    }

    /// Geodesic distance `d(p, q)`.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64, GeometryError> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    /// Distance without domain validation; callers must hold valid points.
    pub(crate) fn distance_unchecked(&self, p: &Point, q: &Point) -> f64 {
        match self {
            Space::Euclidean(s) => s.distance(p.as_vector().unwrap(), q.as_vector().unwrap()),
            Space::Poincare(s) => s.distance(p.as_vector().unwrap(), q.as_vector().unwrap()),
            Space::Tree(s) => s.distance(p.as_tree().unwrap(), q.as_tree().unwrap()),
        }
    }

    /// The point `(1−t)p ⊕ tq` on the unique geodesic from `p` to `q`.
    pub fn geodesic_point(&self, p: &Point, q: &Point, t: f64) -> Result<Point, GeometryError> {
        self.validate(p)?;
        self.validate(q)?;
        if !(0.0..=1.0).contains(&t) || t.is_nan() {
            return Err(GeometryError::ParameterOutOfRange {
                name: "t",
                value: t,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(self.geodesic_unchecked(p, q, t))
    }

    pub(crate) fn geodesic_unchecked(&self, p: &Point, q: &Point, t: f64) -> Point {
        match self {
            Space::Euclidean(s) => {
                Point::Vector(s.geodesic(p.as_vector().unwrap(), q.as_vector().unwrap(), t))
            }
            Space::Poincare(s) => {
                Point::Vector(s.geodesic(p.as_vector().unwrap(), q.as_vector().unwrap(), t))
            }
            Space::Tree(s) => {
                Point::Tree(s.geodesic(p.as_tree().unwrap(), q.as_tree().unwrap(), t))
            }
        }
    }

    /// Draws a point from the backend's sampling region.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Point {
        match self {
            Space::Euclidean(s) => Point::Vector(s.sample(rng)),
            Space::Poincare(s) => Point::Vector(s.sample(rng)),
            Space::Tree(s) => Point::Tree(s.sample(rng)),
        }
    }

    /// The `index`-th point of a deterministic low-discrepancy sequence over
    /// the sampling region.
    pub fn probe_point(&self, index: usize) -> Point {
        match self {
            Space::Euclidean(s) => Point::Vector(s.probe_point(index)),
            Space::Poincare(s) => Point::Vector(s.probe_point(index)),
            Space::Tree(s) => Point::Tree(s.probe_point(index)),
        }
    }

    /// Minimizes a geodesically convex function over the space by cyclic
    /// golden-section line searches (per-edge enumeration on trees).
    ///
    /// `start` seeds the search. Returns the best point found and its value.
    pub fn minimize<F: FnMut(&Point) -> f64>(
        &self,
        h: F,
        start: &Point,
        opts: &MinimizeOpts,
    ) -> (Point, f64) {
        match self {
            Space::Euclidean(s) => s.minimize(h, start, opts),
            Space::Poincare(s) => s.minimize(h, start, opts),
            Space::Tree(s) => s.minimize(h, start, opts),
        }
    }

    /// A distance scale for the sampling region (used to seed line-search
    /// brackets and escape-radius caps).
    pub fn sample_scale(&self) -> f64 {
        match self {
            Space::Euclidean(s) => s.sample_scale(),
            Space::Poincare(s) => s.sample_scale(),
            Space::Tree(s) => s.sample_scale(),
        }
    }

    /// Moves distance `s` from `p` along the backend's `k`-th escape
    /// direction, capping at the domain boundary. Returns the reached point
    /// and the actual distance travelled.
    pub fn walk(&self, p: &Point, direction: usize, s: f64) -> Result<(Point, f64), GeometryError> {
        self.validate(p)?;
        Ok(match self {
            Space::Euclidean(sp) => {
                let (v, travelled) = sp.walk(p.as_vector()?, direction, s);
                (Point::Vector(v), travelled)
            }
            Space::Poincare(sp) => {
                let (v, travelled) = sp.walk(p.as_vector()?, direction, s);
                (Point::Vector(v), travelled)
            }
            Space::Tree(sp) => {
                let (t, travelled) = sp.walk(p.as_tree()?, direction, s);
                (Point::Tree(t), travelled)
            }
        })
    }

    /// Number of distinct escape directions [`Space::walk`] understands.
    pub fn walk_directions(&self) -> usize {
        match self {
            Space::Euclidean(s) => s.walk_directions(),
            Space::Poincare(s) => s.walk_directions(),
            Space::Tree(s) => s.walk_directions(),
        }
    }
}

/// Controls for [`Space::minimize`].
#[derive(Clone, Copy, Debug)]
pub struct MinimizeOpts {
    /// Stop when a full sweep of line searches moves the iterate less than
    /// this distance.
    pub point_tol: f64,
    /// Cap on outer sweeps.
    pub max_sweeps: usize,
    /// Width tolerance of each 1-D golden-section search.
    pub line: LineSearch,
}

impl Default for MinimizeOpts {
    fn default() -> Self {
        MinimizeOpts {
            point_tol: 1e-11,
            max_sweeps: 200,
            line: LineSearch::default(),
        }
    }
}

/// Low-discrepancy scalar sequences (van der Corput / Halton) shared by the
/// backends' probe-point generators.
pub(crate) fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index + 1;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Convenience wrapper: `distance` as a free function matching the
/// operation vocabulary used across the crate.
pub fn distance(space: &Space, p: &Point, q: &Point) -> Result<f64, GeometryError> {
    space.distance(p, q)
}

/// Convenience wrapper for [`Space::geodesic_point`].
pub fn geodesic_point(space: &Space, p: &Point, q: &Point, t: f64) -> Result<Point, GeometryError> {
    space.geodesic_point(p, q, t)
}
