//! Saddle functions f: X×Y → ℝ, their bifunction, residuals, and the
//! coercivity probe.
//!
//! Convexity and semicontinuity cannot be verified mechanically, so a
//! problem carries declared certificate flags which the fuzzing helpers can
//! falsify but never prove. Everything downstream (resolvents, PPA) trusts
//! the flags and filters on them.

pub mod library;

pub use library::{library, library_entry, ProblemLibraryEntry};

use crate::geometry::{GeometryError, Point, ProductPoint, ProductSpace};
use rand::Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("empty probe set")]
    EmptyProbeSet,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Declared analytic properties of a saddle function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificates {
    pub concave_in_x: bool,
    pub convex_in_y: bool,
    pub quasi_concave_in_x: bool,
    pub quasi_convex_in_y: bool,
    pub usc_in_x: bool,
    pub lsc_in_y: bool,
}

impl Certificates {
    /// Concave–convex with both semicontinuities (the resolvent hypotheses).
    pub fn concave_convex() -> Self {
        Certificates {
            concave_in_x: true,
            convex_in_y: true,
            quasi_concave_in_x: true,
            quasi_convex_in_y: true,
            usc_in_x: true,
            lsc_in_y: true,
        }
    }

    /// Quasi-concave–quasi-convex only (the minimax-theorem hypotheses).
    pub fn quasi_only() -> Self {
        Certificates {
            concave_in_x: false,
            convex_in_y: false,
            quasi_concave_in_x: true,
            quasi_convex_in_y: true,
            usc_in_x: true,
            lsc_in_y: true,
        }
    }

    /// Continuous but with no convexity structure claimed.
    pub fn continuous_only() -> Self {
        Certificates {
            concave_in_x: false,
            convex_in_y: false,
            quasi_concave_in_x: false,
            quasi_convex_in_y: false,
            usc_in_x: true,
            lsc_in_y: true,
        }
    }

    pub fn is_concave_convex(&self) -> bool {
        self.concave_in_x && self.convex_in_y && self.usc_in_x && self.lsc_in_y
    }

    pub fn is_quasi(&self) -> bool {
        self.quasi_concave_in_x && self.quasi_convex_in_y && self.usc_in_x && self.lsc_in_y
    }
}

type Evaluator = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;
type ClosedFormResolvent = Arc<dyn Fn(f64, &ProductPoint) -> ProductPoint + Send + Sync>;

/// A saddle problem: two spaces, an evaluator, certificates, and optional
/// analytic extras (known saddle point, closed-form resolvent).
#[derive(Clone)]
pub struct SaddleProblem {
    name: String,
    domain: ProductSpace,
    evaluator: Evaluator,
    certificates: Certificates,
    known_saddle: Option<ProductPoint>,
    closed_form_resolvent: Option<ClosedFormResolvent>,
}

impl std::fmt::Debug for SaddleProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SaddleProblem")
            .field("name", &self.name)
            .field("certificates", &self.certificates)
            .field("known_saddle", &self.known_saddle)
            .field("closed_form", &self.closed_form_resolvent.is_some())
            .finish()
    }
}

impl SaddleProblem {
    pub fn new(
        name: impl Into<String>,
        domain: ProductSpace,
        evaluator: impl Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
        certificates: Certificates,
    ) -> Self {
        SaddleProblem {
            name: name.into(),
            domain,
            evaluator: Arc::new(evaluator),
            certificates,
            known_saddle: None,
            closed_form_resolvent: None,
        }
    }

    pub fn with_known_saddle(mut self, saddle: ProductPoint) -> Self {
        self.known_saddle = Some(saddle);
        self
    }

    pub fn with_closed_form_resolvent(
        mut self,
        resolvent: impl Fn(f64, &ProductPoint) -> ProductPoint + Send + Sync + 'static,
    ) -> Self {
        self.closed_form_resolvent = Some(Arc::new(resolvent));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &ProductSpace {
        &self.domain
    }

    pub fn certificates(&self) -> &Certificates {
        &self.certificates
    }

    pub fn known_saddle(&self) -> Option<&ProductPoint> {
        self.known_saddle.as_ref()
    }

    pub fn closed_form_resolvent(&self, lambda: f64, base: &ProductPoint) -> Option<ProductPoint> {
        self.closed_form_resolvent.as_ref().map(|r| r(lambda, base))
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form_resolvent.is_some()
    }

    /// Evaluates f(x, y) without domain validation.
    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        (self.evaluator)(x, y)
    }

    pub fn eval_product(&self, z: &ProductPoint) -> f64 {
        self.eval(&z.x, &z.y)
    }

    /// The bifunction F(z, w) = f(x, y′) − f(x′, y) for z = (x,y),
    /// w = (x′,y′). F(z, z) = 0 for every z.
    pub fn bifunction(&self, z: &ProductPoint, w: &ProductPoint) -> Result<f64, ProblemError> {
        self.domain.validate(z)?;
        self.domain.validate(w)?;
        Ok(self.bifunction_unchecked(z, w))
    }

    pub(crate) fn bifunction_unchecked(&self, z: &ProductPoint, w: &ProductPoint) -> f64 {
        self.eval(&z.x, &w.y) - self.eval(&w.x, &z.y)
    }

    /// max(0, max over probes w of −F(candidate, w)); zero certifies that
    /// no probe violates the saddle inequality at the candidate.
    pub fn saddle_residual(
        &self,
        candidate: &ProductPoint,
        probes: &[ProductPoint],
    ) -> Result<f64, ProblemError> {
        if probes.is_empty() {
            return Err(ProblemError::EmptyProbeSet);
        }
        self.domain.validate(candidate)?;
        let mut worst: f64 = 0.0;
        for w in probes {
            self.domain.validate(w)?;
            worst = worst.max(-self.bifunction_unchecked(candidate, w));
        }
        Ok(worst)
    }

    /// Deterministic low-discrepancy probe set over the product domain.
    pub fn default_probes(&self, count: usize) -> Vec<ProductPoint> {
        (0..count).map(|i| self.domain.probe_point(i)).collect()
    }

    /// Escape-direction probe for the coercivity condition: along each
    /// sampled escape direction from (a, b) the values f(x, b) − f(a, y)
    /// must eventually turn negative and keep decreasing.
    pub fn coercivity_probe(
        &self,
        a: &Point,
        b: &Point,
        escape_radii: &[f64],
    ) -> Result<CoercivityReport, ProblemError> {
        self.domain.left.validate(a)?;
        self.domain.right.validate(b)?;
        let splits = [0.0, 0.25, 0.5, 0.75, 1.0];
        let kx_count = self.domain.left.walk_directions().clamp(1, 4);
        let ky_count = self.domain.right.walk_directions().clamp(1, 4);
        let mut directions = Vec::new();
        for kx in 0..kx_count {
            for ky in 0..ky_count {
                for &omega in &splits {
                    directions.push(self.probe_direction(a, b, kx, ky, omega, escape_radii)?);
                }
            }
        }
        let coercive_consistent = {
            let judged: Vec<&DirectionSeries> =
                directions.iter().filter(|d| !d.capped).collect();
            !judged.is_empty()
                && judged.iter().all(|d| {
                    let last = *d.running_min.last().unwrap();
                    last < 0.0 && last < d.running_min[0]
                })
        };
        Ok(CoercivityReport {
            directions,
            coercive_consistent,
        })
    }

    fn probe_direction(
        &self,
        a: &Point,
        b: &Point,
        kx: usize,
        ky: usize,
        omega: f64,
        escape_radii: &[f64],
    ) -> Result<DirectionSeries, ProblemError> {
        let angle = omega * std::f64::consts::FRAC_PI_2;
        let (cx, cy) = (angle.cos(), angle.sin());
        let mut radii = Vec::new();
        let mut values = Vec::new();
        let mut running_min = Vec::new();
        let mut capped = false;
        let mut best = f64::INFINITY;
        for &r in escape_radii {
            let (x, dx) = self.domain.left.walk(a, kx, r * cx)?;
            let (y, dy) = self.domain.right.walk(b, ky, r * cy)?;
            let achieved = dx.hypot(dy);
            if achieved + 1e-9 < r {
                capped = true;
            }
            let value = self.eval(&x, b) - self.eval(a, &y);
            best = best.min(value);
            radii.push(achieved);
            values.push(value);
            running_min.push(best);
        }
        Ok(DirectionSeries {
            kx,
            ky,
            omega,
            radii,
            values,
            running_min,
            capped,
        })
    }
}

/// One escape direction of the coercivity probe.
#[derive(Clone, Debug)]
pub struct DirectionSeries {
    pub kx: usize,
    pub ky: usize,
    /// Fraction of the radius spent in the Y component.
    pub omega: f64,
    /// Distances actually achieved (bounded spaces cap the walk).
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub running_min: Vec<f64>,
    pub capped: bool,
}

/// Diagnostic output of [`SaddleProblem::coercivity_probe`]. Sampling can
/// only ever report "consistent", never "verified".
#[derive(Clone, Debug)]
pub struct CoercivityReport {
    pub directions: Vec<DirectionSeries>,
    pub coercive_consistent: bool,
}

/// Worst violations found when fuzzing the declared certificates along
/// random geodesics. All values are clamped at zero from below, so a fully
/// consistent problem reports zeros.
#[derive(Clone, Debug, Default)]
pub struct CertificateFuzz {
    pub concavity_in_x: f64,
    pub convexity_in_y: f64,
    pub quasi_concavity_in_x: f64,
    pub quasi_convexity_in_y: f64,
}

impl CertificateFuzz {
    pub fn worst(&self) -> f64 {
        self.concavity_in_x
            .max(self.convexity_in_y)
            .max(self.quasi_concavity_in_x)
            .max(self.quasi_convexity_in_y)
    }
}

/// Spot-checks the certificate flags on `samples` random geodesics per
/// declared property.
pub fn fuzz_certificates<R: Rng>(
    problem: &SaddleProblem,
    rng: &mut R,
    samples: usize,
) -> CertificateFuzz {
    let certs = *problem.certificates();
    let dom = problem.domain();
    let mut out = CertificateFuzz::default();
    for _ in 0..samples {
        let t = rng.gen_range(0.05..0.95);
        // Slice in X at a random y.
        let x0 = dom.left.sample(rng);
        let x1 = dom.left.sample(rng);
        let y = dom.right.sample(rng);
        let mix = dom.left.geodesic_unchecked(&x0, &x1, t);
        let f0 = problem.eval(&x0, &y);
        let f1 = problem.eval(&x1, &y);
        let fm = problem.eval(&mix, &y);
        if certs.concave_in_x {
            out.concavity_in_x = out.concavity_in_x.max((1.0 - t) * f0 + t * f1 - fm);
        }
        if certs.quasi_concave_in_x {
            out.quasi_concavity_in_x = out.quasi_concavity_in_x.max(f0.min(f1) - fm);
        }
        // Slice in Y at a random x.
        let y0 = dom.right.sample(rng);
        let y1 = dom.right.sample(rng);
        let x = dom.left.sample(rng);
        let mix = dom.right.geodesic_unchecked(&y0, &y1, t);
        let g0 = problem.eval(&x, &y0);
        let g1 = problem.eval(&x, &y1);
        let gm = problem.eval(&x, &mix);
        if certs.convex_in_y {
            out.convexity_in_y = out.convexity_in_y.max(gm - (1.0 - t) * g0 - t * g1);
        }
        if certs.quasi_convex_in_y {
            out.quasi_convexity_in_y = out.quasi_convexity_in_y.max(gm - g0.max(g1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, ProductPoint, ProductSpace, Space};
    use crate::spaces::EuclideanSpace;
    use rand::SeedableRng;

    fn line_product() -> ProductSpace {
        ProductSpace::new(
            Space::Euclidean(EuclideanSpace::unconstrained(1)),
            Space::Euclidean(EuclideanSpace::unconstrained(1)),
        )
    }

    fn bilinear() -> SaddleProblem {
        SaddleProblem::new(
            "bilinear-test",
            line_product(),
            |x, y| x.as_vector().unwrap()[0] * y.as_vector().unwrap()[0],
            Certificates::concave_convex(),
        )
    }

    fn pp(x: f64, y: f64) -> ProductPoint {
        ProductPoint::new(Point::vector([x]), Point::vector([y]))
    }

    #[test]
    fn bifunction_values() {
        let p = bilinear();
        // F(z, z) = 0 always.
        assert_eq!(p.bifunction(&pp(1.0, 2.0), &pp(1.0, 2.0)).unwrap(), 0.0);
        // f(1,4) − f(3,2) = 4 − 6 = −2.
        assert_eq!(p.bifunction(&pp(1.0, 2.0), &pp(3.0, 4.0)).unwrap(), -2.0);
    }

    #[test]
    fn bifunction_antisymmetry() {
        let p = bilinear();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let z = p.domain().sample(&mut rng);
            let w = p.domain().sample(&mut rng);
            let fw = p.bifunction(&z, &w).unwrap();
            let bw = p.bifunction(&w, &z).unwrap();
            assert!((fw + bw).abs() <= 1e-12);
        }
    }

    #[test]
    fn saddle_residual_detects_violations() {
        let p = bilinear();
        // A probe below the candidate's y exposes the non-saddle (0.5, 0).
        let r = p
            .saddle_residual(&pp(0.5, 0.0), &[pp(0.5, -1.0)])
            .unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        // The origin is the saddle; a grid of probes cannot beat it.
        let mut probes = Vec::new();
        for i in 0..=20 {
            for j in 0..=20 {
                probes.push(pp(-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64));
            }
        }
        assert_eq!(p.saddle_residual(&pp(0.0, 0.0), &probes).unwrap(), 0.0);
    }

    #[test]
    fn empty_probe_set_is_an_error() {
        let p = bilinear();
        assert!(matches!(
            p.saddle_residual(&pp(0.0, 0.0), &[]),
            Err(ProblemError::EmptyProbeSet)
        ));
    }

    #[test]
    fn coercivity_probe_examples() {
        let radii: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let origin = Point::vector([0.0]);

        // f = −x² + y² is coercive: every escape direction decreases.
        let coercive = SaddleProblem::new(
            "neg-sq",
            line_product(),
            |x, y| -x.as_vector().unwrap()[0].powi(2) + y.as_vector().unwrap()[0].powi(2),
            Certificates::concave_convex(),
        );
        let report = coercive.coercivity_probe(&origin, &origin, &radii).unwrap();
        assert!(report.coercive_consistent, "{report:?}");

        // f = x − y stays positive along the (+x, +y) escape directions.
        let escape = SaddleProblem::new(
            "linear",
            line_product(),
            |x, y| x.as_vector().unwrap()[0] - y.as_vector().unwrap()[0],
            Certificates::concave_convex(),
        );
        let report = escape.coercivity_probe(&origin, &origin, &radii).unwrap();
        assert!(!report.coercive_consistent);

        // The zero function never goes negative.
        let zero = SaddleProblem::new(
            "zero",
            line_product(),
            |_, _| 0.0,
            Certificates::concave_convex(),
        );
        let report = zero.coercivity_probe(&origin, &origin, &radii).unwrap();
        assert!(!report.coercive_consistent);
    }

    #[test]
    fn certificate_fuzz_is_clean_on_bilinear() {
        let p = bilinear();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let fuzz = fuzz_certificates(&p, &mut rng, 500);
        assert!(fuzz.worst() <= 1e-7, "{fuzz:?}");
    }

    #[test]
    fn certificate_fuzz_flags_a_lying_certificate() {
        // sin is not concave along the whole line; the fuzz must notice.
        let p = SaddleProblem::new(
            "liar",
            line_product(),
            |x, _| (3.0 * x.as_vector().unwrap()[0]).sin(),
            Certificates::concave_convex(),
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let fuzz = fuzz_certificates(&p, &mut rng, 500);
        assert!(fuzz.concavity_in_x > 1e-3);
    }
}
