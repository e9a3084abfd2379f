//! Poincaré ball model of hyperbolic space.
//!
//! Points are coordinate vectors of Euclidean norm < 1 − 1e−9; the margin is
//! a hard validity boundary, and operations that would exit it fail rather
//! than clamp. Distance uses the arcosh closed form; geodesics are computed
//! by Möbius translation to the origin, radial interpolation by hyperbolic
//! arc length, and translation back.

use crate::geometry::{halton, GeometryError, MinimizeOpts, Point};
use crate::spaces::euclidean::norm;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Points must satisfy ‖p‖ < 1 − `BOUNDARY_MARGIN`.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoincareBall {
    dim: usize,
    /// Euclidean-norm cap of the sampling region (strictly inside the ball).
    #[serde(default = "default_sample_radius")]
    sample_radius: f64,
}

fn default_sample_radius() -> f64 {
    0.85
}

impl PoincareBall {
    pub fn new(dim: usize) -> Self {
        PoincareBall {
            dim,
            sample_radius: default_sample_radius(),
        }
    }

    pub fn with_sample_radius(mut self, r: f64) -> Self {
        assert!(r > 0.0 && r < 1.0 - BOUNDARY_MARGIN);
        self.sample_radius = r;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn validate(&self, p: &[f64]) -> Result<(), GeometryError> {
        if p.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        let n = norm(p);
        if n >= 1.0 - BOUNDARY_MARGIN {
            return Err(GeometryError::PointOnBoundary { norm: n });
        }
        Ok(())
    }

    /// d(p,q) = arcosh(1 + 2‖p−q‖² / ((1−‖p‖²)(1−‖q‖²))).
    pub fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        let diff_sq: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
        let denom = (1.0 - sq_norm(p)) * (1.0 - sq_norm(q));
        (1.0 + 2.0 * diff_sq / denom).acosh()
    }

    /// Hyperbolic distance from the origin, 2 artanh ‖p‖.
    pub fn distance_from_origin(&self, p: &[f64]) -> f64 {
        2.0 * norm(p).atanh()
    }

    /// Möbius addition a ⊕ b.
    pub fn mobius_add(a: &[f64], b: &[f64]) -> Vec<f64> {
        let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let aa = sq_norm(a);
        let bb = sq_norm(b);
        let ca = 1.0 + 2.0 * ab + bb;
        let cb = 1.0 - aa;
        let denom = 1.0 + 2.0 * ab + aa * bb;
        a.iter()
            .zip(b)
            .map(|(x, y)| (ca * x + cb * y) / denom)
            .collect()
    }

    /// Geodesic point (1−t)p ⊕ tq: translate p to the origin, move along the
    /// radial ray to hyperbolic fraction t of d(p,q), translate back.
    pub fn geodesic(&self, p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
        let neg_p: Vec<f64> = p.iter().map(|x| -x).collect();
        let w = Self::mobius_add(&neg_p, q);
        let wn = norm(&w);
        if wn < 1e-300 {
            return p.to_vec();
        }
        let dist = 2.0 * wn.atanh();
        let radius = (t * dist / 2.0).tanh();
        let r: Vec<f64> = w.iter().map(|x| x * radius / wn).collect();
        Self::mobius_add(p, &r)
    }

    /// Point at hyperbolic arc length `s` from `p` along the unit-speed
    /// geodesic whose direction at `p` is the gyrotranslate of `dir`.
    fn gyro_line(&self, p: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
        let radius = (s / 2.0).tanh();
        let r: Vec<f64> = dir.iter().map(|x| x * radius).collect();
        Self::mobius_add(p, &r)
    }

    /// Largest arclength parameter reachable from `p` while keeping every
    /// probe strictly inside the validity margin.
    fn arclength_cap(&self, p: &[f64]) -> f64 {
        let total = 2.0 * (1.0 - 2.0 * BOUNDARY_MARGIN).atanh();
        (total - self.distance_from_origin(p)).max(0.1)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..self.dim)
                .map(|_| rng.gen_range(-self.sample_radius..=self.sample_radius))
                .collect();
            if norm(&v) <= self.sample_radius {
                return v;
            }
        }
    }

    pub fn probe_point(&self, index: usize) -> Vec<f64> {
        const BASES: [usize; 6] = [2, 3, 5, 7, 11, 13];
        let v: Vec<f64> = (0..self.dim)
            .map(|k| (2.0 * halton(index, BASES[k % BASES.len()]) - 1.0) * self.sample_radius)
            .collect();
        let n = norm(&v);
        if n <= self.sample_radius {
            v
        } else {
            v.iter()
                .map(|x| x * self.sample_radius / n * 0.999)
                .collect()
        }
    }

    pub(crate) fn sample_scale(&self) -> f64 {
        // Hyperbolic diameter of the sampling ball.
        4.0 * self.sample_radius.atanh()
    }

    pub(crate) fn minimize<F: FnMut(&Point) -> f64>(
        &self,
        mut h: F,
        start: &Point,
        opts: &MinimizeOpts,
    ) -> (Point, f64) {
        let mut cur = start.as_vector().expect("poincare start point").to_vec();
        let mut val = h(&Point::Vector(cur.clone()));
        for _ in 0..opts.max_sweeps {
            let anchor = cur.clone();
            for k in 0..self.dim {
                let mut dir = vec![0.0; self.dim];
                dir[k] = 1.0;
                let cap = self.arclength_cap(&cur);
                let base = cur.clone();
                let eval = |s: f64| h(&Point::Vector(self.gyro_line(&base, &dir, s)));
                let (s, v) = opts.line.golden_min(eval, -cap, cap);
                if v < val {
                    cur = self.gyro_line(&cur, &dir, s);
                    val = v;
                }
            }
            if self.distance(&anchor, &cur) <= opts.point_tol {
                break;
            }
        }
        (Point::Vector(cur), val)
    }

    pub(crate) fn walk_directions(&self) -> usize {
        if self.dim == 1 {
            2
        } else {
            2 * self.dim.max(2)
        }
    }

    pub(crate) fn walk(&self, p: &[f64], k: usize, s: f64) -> (Vec<f64>, f64) {
        let dir: Vec<f64> = if self.dim == 1 {
            vec![if k.is_multiple_of(2) { 1.0 } else { -1.0 }]
        } else {
            let n = self.walk_directions();
            let theta = 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64;
            let mut d = vec![0.0; self.dim];
            d[0] = theta.cos();
            d[1 % self.dim] = theta.sin();
            d
        };
        let travelled = s.min(self.arclength_cap(p));
        (self.gyro_line(p, &dir, travelled), travelled)
    }
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_distance_closed_forms_agree() {
        let ball = PoincareBall::new(2);
        let p = [0.5, 0.0];
        let d = ball.distance(&[0.0, 0.0], &p);
        assert!((d - 3.0_f64.ln()).abs() < 1e-12);
        assert!((d - ball.distance_from_origin(&p)).abs() < 1e-12);
    }

    #[test]
    fn geodesic_endpoints() {
        let ball = PoincareBall::new(2);
        let p = [0.2, -0.4];
        let q = [-0.5, 0.1];
        let g0 = ball.geodesic(&p, &q, 0.0);
        let g1 = ball.geodesic(&p, &q, 1.0);
        assert!(ball.distance(&g0, &p) < 1e-12);
        assert!(ball.distance(&g1, &q) < 1e-12);
    }

    #[test]
    fn radial_midpoint_value() {
        // Midpoint of the radial geodesic to (0.5, 0) sits at tanh(ln 3 / 4).
        let ball = PoincareBall::new(2);
        let mid = ball.geodesic(&[0.0, 0.0], &[0.5, 0.0], 0.5);
        assert!((mid[0] - 0.267_949_192_431_122_7).abs() < 1e-12, "{mid:?}");
        assert!(mid[1].abs() < 1e-15);
    }

    #[test]
    fn antipodal_midpoint_is_origin() {
        let ball = PoincareBall::new(2);
        let mid = ball.geodesic(&[-0.3, 0.0], &[0.3, 0.0], 0.5);
        assert!(norm(&mid) < 1e-12);
    }

    #[test]
    fn boundary_points_rejected() {
        let ball = PoincareBall::new(2);
        assert!(matches!(
            ball.validate(&[1.0 - 1e-10, 0.0]),
            Err(GeometryError::PointOnBoundary { .. })
        ));
        assert!(ball.validate(&[0.9, 0.0]).is_ok());
    }

    #[test]
    fn geodesic_reparameterization() {
        let ball = PoincareBall::new(2);
        let p = [0.3, 0.2];
        let q = [-0.6, -0.1];
        let d = ball.distance(&p, &q);
        for (s, t) in [(0.0, 1.0), (0.25, 0.75), (0.4, 0.9)] {
            let gs = ball.geodesic(&p, &q, s);
            let gt = ball.geodesic(&p, &q, t);
            assert!((ball.distance(&gs, &gt) - (t - s) * d).abs() < 1e-10);
        }
    }

    #[test]
    fn minimize_prox_objective_lands_on_geodesic() {
        // min λ/2 d(u,a)² + 1/2 d(u,x)² is the geodesic point at λ/(1+λ).
        let ball = PoincareBall::new(2);
        let a = [0.4, 0.1];
        let x = [-0.2, -0.3];
        let lambda = 0.7;
        let (u, _) = ball.minimize(
            |u| {
                let u = u.as_vector().unwrap();
                0.5 * lambda * ball.distance(u, &a).powi(2) + 0.5 * ball.distance(u, &x).powi(2)
            },
            &Point::vector(x.to_vec()),
            &crate::geometry::MinimizeOpts::default(),
        );
        let expected = ball.geodesic(&x, &a, lambda / (1.0 + lambda));
        assert!(ball.distance(u.as_vector().unwrap(), &expected) < 1e-7);
    }
}
