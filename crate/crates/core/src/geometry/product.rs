//! ℓ²-products of two geodesic spaces.

use super::{GeometryError, Point, Space};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Metric selector for a product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductMetric {
    /// sqrt(d_X² + d_Y²); the product of CAT(0) spaces is CAT(0) under it.
    Ell2,
    /// max(d_X, d_Y); topologically equivalent, sandwiched by
    /// d_∞ ≤ d_ℓ² ≤ √2·d_∞.
    EllInf,
}

/// A pair of component points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub x: Point,
    pub y: Point,
}

impl ProductPoint {
    pub fn new(x: Point, y: Point) -> Self {
        ProductPoint { x, y }
    }
}

/// The domain X×Y of a saddle problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductSpace {
    pub left: Space,
    pub right: Space,
    #[serde(default = "default_metric")]
    pub metric: ProductMetric,
}

fn default_metric() -> ProductMetric {
    ProductMetric::Ell2
}

impl ProductSpace {
    pub fn new(left: Space, right: Space) -> Self {
        ProductSpace {
            left,
            right,
            metric: ProductMetric::Ell2,
        }
    }

    pub fn with_metric(mut self, metric: ProductMetric) -> Self {
        self.metric = metric;
        self
    }

    pub fn validate(&self, p: &ProductPoint) -> Result<(), GeometryError> {
        self.left.validate(&p.x)?;
        self.right.validate(&p.y)
    }

    /// Distance under the selected metric.
    pub fn distance(&self, p: &ProductPoint, q: &ProductPoint) -> Result<f64, GeometryError> {
        let dx = self.left.distance(&p.x, &q.x)?;
        let dy = self.right.distance(&p.y, &q.y)?;
        Ok(match self.metric {
            ProductMetric::Ell2 => dx.hypot(dy),
            ProductMetric::EllInf => dx.max(dy),
        })
    }

    /// ℓ²-distance regardless of the selector.
    pub fn distance_ell2(&self, p: &ProductPoint, q: &ProductPoint) -> Result<f64, GeometryError> {
        let dx = self.left.distance(&p.x, &q.x)?;
        let dy = self.right.distance(&p.y, &q.y)?;
        Ok(dx.hypot(dy))
    }

    /// ℓ∞-distance regardless of the selector.
    pub fn distance_ellinf(
        &self,
        p: &ProductPoint,
        q: &ProductPoint,
    ) -> Result<f64, GeometryError> {
        let dx = self.left.distance(&p.x, &q.x)?;
        let dy = self.right.distance(&p.y, &q.y)?;
        Ok(dx.max(dy))
    }

    pub(crate) fn distance_unchecked(&self, p: &ProductPoint, q: &ProductPoint) -> f64 {
        let dx = self.left.distance_unchecked(&p.x, &q.x);
        let dy = self.right.distance_unchecked(&p.y, &q.y);
        match self.metric {
            ProductMetric::Ell2 => dx.hypot(dy),
            ProductMetric::EllInf => dx.max(dy),
        }
    }

    /// Componentwise geodesic; under the ℓ² metric this is the normalized
    /// geodesic of the product.
    pub fn geodesic_point(
        &self,
        p: &ProductPoint,
        q: &ProductPoint,
        t: f64,
    ) -> Result<ProductPoint, GeometryError> {
        Ok(ProductPoint {
            x: self.left.geodesic_point(&p.x, &q.x, t)?,
            y: self.right.geodesic_point(&p.y, &q.y, t)?,
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> ProductPoint {
        ProductPoint {
            x: self.left.sample(rng),
            y: self.right.sample(rng),
        }
    }

    pub fn probe_point(&self, index: usize) -> ProductPoint {
        ProductPoint {
            x: self.left.probe_point(index),
            // Offset the right component so the pair sequence does not live
            // on a diagonal.
            y: self.right.probe_point(index.wrapping_add(7919)),
        }
    }
}
