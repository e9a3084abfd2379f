//! Euclidean ℝⁿ and its closed convex sub-regions (balls, boxes, the
//! probability simplex).
//!
//! Geodesics are affine segments; constrained variants reject points outside
//! the region (membership tolerance 1e−12) and inherit the flat geometry, so
//! segments between feasible points stay feasible.

use crate::geometry::{halton, GeometryError, MinimizeOpts, Point};
use rand::Rng;
use serde::{Deserialize, Serialize};

const MEMBERSHIP_TOL: f64 = 1e-12;

/// Closed convex constraint on ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// The whole space.
    None,
    /// Closed ball of the given radius centered at the origin.
    Ball { radius: f64 },
    /// Axis-aligned box, one `(lo, hi)` pair per coordinate.
    Box { bounds: Vec<(f64, f64)> },
    /// Probability simplex: nonnegative coordinates summing to one.
    Simplex,
}

/// Flat backend: ℝⁿ or a closed convex subset of it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EuclideanSpace {
    dim: usize,
    #[serde(default = "default_constraint")]
    constraint: Constraint,
    /// Sampling box for fuzzing and probe generation. Required for the
    /// unconstrained space (which is unbounded); derived from the constraint
    /// otherwise.
    #[serde(default)]
    sample_box: Option<Vec<(f64, f64)>>,
}

fn default_constraint() -> Constraint {
    Constraint::None
}

impl EuclideanSpace {
    /// Unconstrained ℝⁿ with sampling box `[−2, 2]ⁿ`.
    pub fn unconstrained(dim: usize) -> Self {
        EuclideanSpace {
            dim,
            constraint: Constraint::None,
            sample_box: Some(vec![(-2.0, 2.0); dim]),
        }
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        assert!(radius > 0.0);
        EuclideanSpace {
            dim,
            constraint: Constraint::Ball { radius },
            sample_box: None,
        }
    }

    pub fn boxed(bounds: Vec<(f64, f64)>) -> Self {
        assert!(bounds.iter().all(|(lo, hi)| lo <= hi));
        EuclideanSpace {
            dim: bounds.len(),
            constraint: Constraint::Box { bounds },
            sample_box: None,
        }
    }

    /// The probability simplex in ℝⁿ (n coordinates, sum one).
    pub fn simplex(dim: usize) -> Self {
        assert!(dim >= 2);
        EuclideanSpace {
            dim,
            constraint: Constraint::Simplex,
            sample_box: None,
        }
    }

    /// Overrides the sampling box (useful for unbounded problem domains).
    pub fn with_sample_box(mut self, bounds: Vec<(f64, f64)>) -> Self {
        assert_eq!(bounds.len(), self.dim);
        self.sample_box = Some(bounds);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    /// Membership test at tolerance 1e−12.
    pub fn contains(&self, p: &[f64]) -> Result<bool, GeometryError> {
        if p.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        Ok(match &self.constraint {
            Constraint::None => true,
            Constraint::Ball { radius } => norm(p) <= radius + MEMBERSHIP_TOL,
            Constraint::Box { bounds } => p
                .iter()
                .zip(bounds)
                .all(|(x, (lo, hi))| *x >= lo - MEMBERSHIP_TOL && *x <= hi + MEMBERSHIP_TOL),
            Constraint::Simplex => {
                p.iter().all(|x| *x >= -MEMBERSHIP_TOL)
                    && (p.iter().sum::<f64>() - 1.0).abs() <= MEMBERSHIP_TOL
            }
        })
    }

    pub fn validate(&self, p: &[f64]) -> Result<(), GeometryError> {
        if self.contains(p)? {
            Ok(())
        } else {
            Err(GeometryError::InvalidPoint(format!(
                "{p:?} violates the {:?} constraint",
                self.constraint
            )))
        }
    }

    pub fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        p.iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn geodesic(&self, p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
        let mut g: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + t * (b - a)).collect();
        self.snap(&mut g);
        g
    }

    /// Projects rounding dust back into the constraint set. Affine
    /// combinations of feasible points are feasible up to rounding, and a
    /// coordinate at −1e−17 poisons later feasibility intervals, so every
    /// generated candidate passes through here.
    pub(crate) fn snap(&self, p: &mut [f64]) {
        match &self.constraint {
            Constraint::None => {}
            Constraint::Ball { radius } => {
                let n = norm(p);
                if n > *radius {
                    let scale = *radius / n;
                    for x in p.iter_mut() {
                        *x *= scale;
                    }
                }
            }
            Constraint::Box { bounds } => {
                for (x, (lo, hi)) in p.iter_mut().zip(bounds) {
                    *x = x.clamp(*lo, *hi);
                }
            }
            Constraint::Simplex => {
                let mut sum = 0.0;
                for x in p.iter_mut() {
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                    sum += *x;
                }
                if sum > 0.0 && sum != 1.0 {
                    for x in p.iter_mut() {
                        *x /= sum;
                    }
                }
            }
        }
    }

    pub(crate) fn sample_bounds(&self) -> Vec<(f64, f64)> {
        if let Some(b) = &self.sample_box {
            return b.clone();
        }
        match &self.constraint {
            Constraint::None => vec![(-2.0, 2.0); self.dim],
            Constraint::Ball { radius } => vec![(-radius, *radius); self.dim],
            Constraint::Box { bounds } => bounds.clone(),
            Constraint::Simplex => vec![(0.0, 1.0); self.dim],
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match &self.constraint {
            Constraint::Simplex => {
                // Exponential spacings give the uniform distribution on the
                // simplex and are feasible by construction.
                let mut e: Vec<f64> = (0..self.dim)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                    .collect();
                let s: f64 = e.iter().sum();
                for x in &mut e {
                    *x /= s;
                }
                e
            }
            Constraint::Ball { radius } => loop {
                let v: Vec<f64> = (0..self.dim)
                    .map(|_| rng.gen_range(-*radius..=*radius))
                    .collect();
                if norm(&v) <= *radius {
                    return v;
                }
            },
            _ => self
                .sample_bounds()
                .iter()
                .map(|(lo, hi)| rng.gen_range(*lo..=*hi))
                .collect(),
        }
    }

    pub fn probe_point(&self, index: usize) -> Vec<f64> {
        const BASES: [usize; 6] = [2, 3, 5, 7, 11, 13];
        let u: Vec<f64> = (0..self.dim)
            .map(|k| halton(index, BASES[k % BASES.len()]))
            .collect();
        match &self.constraint {
            Constraint::Simplex => {
                let mut e: Vec<f64> = u.iter().map(|x| -(1.0 - x).max(1e-12).ln()).collect();
                let s: f64 = e.iter().sum();
                for x in &mut e {
                    *x /= s;
                }
                e
            }
            Constraint::Ball { radius } => {
                let v: Vec<f64> = u.iter().map(|x| (2.0 * x - 1.0) * radius).collect();
                let n = norm(&v);
                if n <= *radius {
                    v
                } else {
                    v.iter().map(|x| x * *radius / n * 0.999).collect()
                }
            }
            _ => self
                .sample_bounds()
                .iter()
                .zip(&u)
                .map(|((lo, hi), x)| lo + x * (hi - lo))
                .collect(),
        }
    }

    pub(crate) fn sample_scale(&self) -> f64 {
        self.sample_bounds()
            .iter()
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
            .max(1.0)
    }

    /// Feasible parameter interval of the line `p + t·dir` (`dir` need not
    /// be normalized). Unbounded sides come back as ±∞.
    fn feasible_interval(&self, p: &[f64], dir: &[f64]) -> (f64, f64) {
        match &self.constraint {
            Constraint::None => (f64::NEG_INFINITY, f64::INFINITY),
            Constraint::Ball { radius } => {
                // ‖p + t d‖² = r²  ⇒  ‖d‖² t² + 2⟨p,d⟩ t + ‖p‖² − r² = 0
                let dd: f64 = dir.iter().map(|x| x * x).sum();
                if dd == 0.0 {
                    return (0.0, 0.0);
                }
                let pd: f64 = p.iter().zip(dir).map(|(a, b)| a * b).sum();
                let pp: f64 = p.iter().map(|x| x * x).sum();
                let disc = pd * pd - dd * (pp - radius * radius);
                if disc <= 0.0 {
                    return (0.0, 0.0);
                }
                let sq = disc.sqrt();
                ((-pd - sq) / dd, (-pd + sq) / dd)
            }
            Constraint::Box { bounds } => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for ((x, d), (blo, bhi)) in p.iter().zip(dir).zip(bounds) {
                    if *d == 0.0 {
                        continue;
                    }
                    let (a, b) = ((blo - x) / d, (bhi - x) / d);
                    lo = lo.max(a.min(b));
                    hi = hi.min(a.max(b));
                }
                (lo, hi.max(lo))
            }
            Constraint::Simplex => {
                // dir sums to zero for the directions we use, so only the
                // nonnegativity constraints bind.
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for (x, d) in p.iter().zip(dir) {
                    if *d == 0.0 {
                        continue;
                    }
                    let bound = -x / d;
                    if *d > 0.0 {
                        lo = lo.max(bound);
                    } else {
                        hi = hi.min(bound);
                    }
                }
                (lo, hi.max(lo))
            }
        }
    }

    /// Search directions for cyclic coordinate descent at `p`.
    fn directions(&self, p: &[f64]) -> Vec<Vec<f64>> {
        match &self.constraint {
            Constraint::Simplex => {
                // Chords toward each vertex stay inside the simplex and span
                // its affine hull.
                (0..self.dim)
                    .map(|k| {
                        let mut d: Vec<f64> = p.iter().map(|x| -x).collect();
                        d[k] += 1.0;
                        d
                    })
                    .collect()
            }
            _ => (0..self.dim)
                .map(|k| {
                    let mut d = vec![0.0; self.dim];
                    d[k] = 1.0;
                    d
                })
                .collect(),
        }
    }

    pub(crate) fn minimize<F: FnMut(&Point) -> f64>(
        &self,
        mut h: F,
        start: &Point,
        opts: &MinimizeOpts,
    ) -> (Point, f64) {
        let mut cur = start.as_vector().expect("euclidean start point").to_vec();
        let step0 = 0.25 * self.sample_scale();
        let mut val = h(&Point::Vector(cur.clone()));
        for _ in 0..opts.max_sweeps {
            let anchor = cur.clone();
            for dir in self.directions(&cur) {
                let dn = norm(&dir);
                if dn < 1e-15 {
                    continue;
                }
                let (lo, hi) = self.feasible_interval(&cur, &dir);
                // The current point is always a feasible parameter.
                let (lo, hi) = (lo.min(0.0), hi.max(0.0));
                if hi - lo < 1e-15 {
                    continue;
                }
                let base = cur.clone();
                let eval = |t: f64| {
                    let mut cand: Vec<f64> =
                        base.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
                    self.snap(&mut cand);
                    h(&Point::Vector(cand))
                };
                let (t, v) = opts.line.golden_min_within(eval, lo, hi, step0 / dn);
                if v < val {
                    for (x, d) in cur.iter_mut().zip(&dir) {
                        *x += t * d;
                    }
                    self.snap(&mut cur);
                    val = v;
                }
            }
            let moved = self.distance(&anchor, &cur);
            if moved <= opts.point_tol {
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

    /// Point at distance `s` from `p` along the `k`-th escape direction,
    /// capped at the constraint boundary.
    pub(crate) fn walk(&self, p: &[f64], k: usize, s: f64) -> (Vec<f64>, f64) {
        let dir: Vec<f64> = if self.dim == 1 {
            vec![if k.is_multiple_of(2) { 1.0 } else { -1.0 }]
        } else {
            // Evenly spread directions in the first coordinate plane, with
            // sign flips covering the remaining axes pairs.
            let n = self.walk_directions();
            let theta = 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64;
            let mut d = vec![0.0; self.dim];
            d[0] = theta.cos();
            d[1 % self.dim] = theta.sin();
            d
        };
        let (_, hi) = self.feasible_interval(p, &dir);
        let t = s.min(hi.max(0.0));
        let mut q: Vec<f64> = p.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
        self.snap(&mut q);
        (q, t)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MinimizeOpts;

    #[test]
    fn distance_is_pythagorean() {
        let s = EuclideanSpace::unconstrained(2);
        assert_eq!(s.distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(s.distance(&[0.3, -1.0], &[0.3, -1.0]), 0.0);
    }

    #[test]
    fn geodesic_is_affine() {
        let s = EuclideanSpace::unconstrained(2);
        assert_eq!(s.geodesic(&[0.0, 0.0], &[2.0, 0.0], 0.25), vec![0.5, 0.0]);
    }

    #[test]
    fn membership_examples() {
        let free = EuclideanSpace::unconstrained(2);
        assert!(free.contains(&[100.0, -3.0]).unwrap());

        let ball = EuclideanSpace::ball(2, 1.0);
        // Boundary point: norm exactly one.
        assert!(ball.contains(&[0.6, 0.8]).unwrap());
        assert!(!ball.contains(&[0.8, 0.8]).unwrap());

        let simplex = EuclideanSpace::simplex(3);
        assert!(!simplex.contains(&[0.5, 0.5, 0.1]).unwrap());
        assert!(simplex.contains(&[0.2, 0.3, 0.5]).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = EuclideanSpace::unconstrained(2);
        assert!(matches!(
            s.contains(&[1.0]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constrained_geodesics_stay_feasible() {
        let simplex = EuclideanSpace::simplex(3);
        let p = [0.7, 0.2, 0.1];
        let q = [0.1, 0.3, 0.6];
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!(simplex.contains(&simplex.geodesic(&p, &q, t)).unwrap());
        }
    }

    #[test]
    fn minimize_quadratic_on_box() {
        let s = EuclideanSpace::boxed(vec![(-1.0, 1.0), (-1.0, 1.0)]);
        let target = [0.4, -0.7];
        let (p, v) = s.minimize(
            |p| {
                let x = p.as_vector().unwrap();
                (x[0] - target[0]).powi(2) + (x[1] - target[1]).powi(2)
            },
            &Point::vector([0.0, 0.0]),
            &MinimizeOpts::default(),
        );
        let x = p.as_vector().unwrap();
        assert!((x[0] - 0.4).abs() < 1e-9);
        assert!((x[1] + 0.7).abs() < 1e-9);
        assert!(v < 1e-16);
    }

    #[test]
    fn minimize_clamps_to_box() {
        let s = EuclideanSpace::boxed(vec![(-1.0, 1.0)]);
        let (p, _) = s.minimize(
            |p| (p.as_vector().unwrap()[0] - 5.0).powi(2),
            &Point::vector([0.0]),
            &MinimizeOpts::default(),
        );
        assert!((p.as_vector().unwrap()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn minimize_on_simplex() {
        // min ‖p − e1‖² over the 2-simplex is attained at the vertex e1.
        let s = EuclideanSpace::simplex(2);
        let (p, _) = s.minimize(
            |p| {
                let x = p.as_vector().unwrap();
                (x[0] - 1.0).powi(2) + x[1].powi(2)
            },
            &Point::vector([0.5, 0.5]),
            &MinimizeOpts::default(),
        );
        let x = p.as_vector().unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9, "{x:?}");
    }
}
