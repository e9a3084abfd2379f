//! Resolvents of saddle functions.
//!
//! `R_λ(x, y)` is the unique saddle point of
//! `(u, v) ↦ λf(u, v) − ½d_X(u, x)² + ½d_Y(v, y)²`. Problems that know a
//! closed form use it; otherwise the solver alternates best responses,
//! each reduced to geodesic golden-section searches (the regularized slices
//! are strongly concave/convex along geodesics). Sweeps that stop making
//! progress switch to damped updates — the midpoint of the old iterate and
//! the best response along the connecting geodesic — and runs that still
//! fail to converge within the sweep budget are flagged, never silently
//! accepted.

mod checks;

pub use checks::{
    check_firm_nonspreading_and_nonexpansive, check_fixed_points, check_resolvent_comparison,
    check_resolvent_inequality, check_step_estimate, FixedPointCandidate, FixedPointReport,
    NonspreadingPair, NonspreadingReport,
};

use crate::geometry::{GeometryError, MinimizeOpts, ProductPoint};
use crate::problems::{ProblemError, SaddleProblem};
use crate::search::LineSearch;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResolventError {
    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("inner tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// How a resolvent value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolventMethod {
    ClosedForm,
    Alternating,
}

/// A resolvent evaluation request.
#[derive(Clone, Debug)]
pub struct ResolventQuery<'a> {
    pub problem: &'a SaddleProblem,
    pub base: ProductPoint,
    pub lambda: f64,
    pub inner_tol: f64,
    pub max_sweeps: usize,
    /// Skip the problem's closed form even when present (used to cross-check
    /// the generic scheme against it).
    pub force_generic: bool,
    /// Starting iterate of the alternating scheme; defaults to the base.
    pub init: Option<ProductPoint>,
}

impl<'a> ResolventQuery<'a> {
    pub fn new(problem: &'a SaddleProblem, base: ProductPoint, lambda: f64) -> Self {
        ResolventQuery {
            problem,
            base,
            lambda,
            inner_tol: 1e-8,
            max_sweeps: 10_000,
            force_generic: false,
            init: None,
        }
    }

    pub fn with_inner_tol(mut self, tol: f64) -> Self {
        self.inner_tol = tol;
        self
    }

    pub fn force_generic(mut self) -> Self {
        self.force_generic = true;
        self
    }

    pub fn with_init(mut self, init: ProductPoint) -> Self {
        self.init = Some(init);
        self
    }

    pub fn solve(&self) -> Result<ResolventResult, ResolventError> {
        resolvent(self)
    }
}

/// Resolvent value plus solve diagnostics.
#[derive(Clone, Debug)]
pub struct ResolventResult {
    pub point: ProductPoint,
    /// Product distance moved in the final sweep (0 for closed forms).
    pub fixed_point_gap: f64,
    /// Saddle residual of the regularized problem at the returned point,
    /// measured on the problem's default probe set.
    pub regularized_residual: f64,
    pub sweeps_used: usize,
    pub method: ResolventMethod,
    /// False when the sweep budget ran out before the stopping rule fired.
    pub converged: bool,
}

/// Evaluates `R_λ(base)`.
pub fn resolvent(query: &ResolventQuery) -> Result<ResolventResult, ResolventError> {
    if query.lambda <= 0.0 || !query.lambda.is_finite() || query.lambda.is_nan() {
        return Err(ResolventError::InvalidLambda(query.lambda));
    }
    if query.inner_tol <= 0.0 || query.inner_tol.is_nan() {
        return Err(ResolventError::InvalidTolerance(query.inner_tol));
    }
    let problem = query.problem;
    problem.domain().validate(&query.base)?;

    if !query.force_generic {
        if let Some(point) = problem.closed_form_resolvent(query.lambda, &query.base) {
            let regularized_residual =
                regularized_residual(problem, query.lambda, &query.base, &point);
            return Ok(ResolventResult {
                point,
                fixed_point_gap: 0.0,
                regularized_residual,
                sweeps_used: 0,
                method: ResolventMethod::ClosedForm,
                converged: true,
            });
        }
    }
    alternating(query)
}

fn alternating(query: &ResolventQuery) -> Result<ResolventResult, ResolventError> {
    let problem = query.problem;
    let domain = problem.domain();
    let lambda = query.lambda;
    let base = &query.base;
    let mut cur = query.init.clone().unwrap_or_else(|| base.clone());
    domain.validate(&cur)?;

    let inner_opts = MinimizeOpts {
        point_tol: (query.inner_tol * 1e-3).max(1e-13),
        max_sweeps: 60,
        line: LineSearch::with_tol(1e-12),
    };

    let mut damped = false;
    let mut gaps: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut sweeps_used = query.max_sweeps;
    for sweep in 1..=query.max_sweeps {
        // Best response in X: maximize λf(·, v) − ½d_X(·, x)².
        let (u_br, _) = domain.left.minimize(
            |u| {
                let d = domain.left.distance_unchecked(u, &base.x);
                0.5 * d * d - lambda * problem.eval(u, &cur.y)
            },
            &cur.x,
            &inner_opts,
        );
        let u_new = if damped {
            domain.left.geodesic_unchecked(&cur.x, &u_br, 0.5)
        } else {
            u_br
        };
        // Best response in Y at the fresh u: minimize λf(u, ·) + ½d_Y(·, y)².
        let (v_br, _) = domain.right.minimize(
            |v| {
                let d = domain.right.distance_unchecked(v, &base.y);
                0.5 * d * d + lambda * problem.eval(&u_new, v)
            },
            &cur.y,
            &inner_opts,
        );
        let v_new = if damped {
            domain.right.geodesic_unchecked(&cur.y, &v_br, 0.5)
        } else {
            v_br
        };
        let next = ProductPoint::new(u_new, v_new);
        let gap = domain.distance_ell2(&cur, &next)?;
        cur = next;
        gaps.push(gap);

        // Geometric-mean contraction ratio over a short window; it both
        // drives the damping switch and extrapolates the remaining error of
        // a linearly converging sweep sequence.
        let ratio = window_ratio(&gaps);
        let est_error = match ratio {
            Some(r) if r < 0.999 => gap * r / (1.0 - r),
            _ => f64::INFINITY,
        };
        if gap <= query.inner_tol && (est_error <= query.inner_tol || gap == 0.0) {
            converged = true;
            sweeps_used = sweep;
            break;
        }
        if !damped {
            if let Some(r) = ratio {
                if r >= 0.95 && gaps.len() >= 4 {
                    damped = true;
                    gaps.clear();
                }
            }
        }
    }

    let fixed_point_gap = gaps.last().copied().unwrap_or(0.0);
    let regularized_residual = regularized_residual(problem, lambda, base, &cur);
    Ok(ResolventResult {
        point: cur,
        fixed_point_gap,
        regularized_residual,
        sweeps_used,
        method: ResolventMethod::Alternating,
        converged,
    })
}

fn window_ratio(gaps: &[f64]) -> Option<f64> {
    const WINDOW: usize = 4;
    if gaps.len() < WINDOW + 1 {
        return None;
    }
    let newest = gaps[gaps.len() - 1];
    let oldest = gaps[gaps.len() - 1 - WINDOW];
    if oldest <= 0.0 {
        return Some(0.0);
    }
    Some((newest / oldest).powf(1.0 / WINDOW as f64))
}

/// Bifunction of the regularized problem
/// g(u, v) = λf(u, v) − ½d_X(u, x)² + ½d_Y(v, y)², base (x, y) fixed.
fn regularized_bifunction(
    problem: &SaddleProblem,
    lambda: f64,
    base: &ProductPoint,
    z: &ProductPoint,
    w: &ProductPoint,
) -> f64 {
    let domain = problem.domain();
    let g = |u: &crate::geometry::Point, v: &crate::geometry::Point| {
        let dx = domain.left.distance_unchecked(u, &base.x);
        let dy = domain.right.distance_unchecked(v, &base.y);
        lambda * problem.eval(u, v) - 0.5 * dx * dx + 0.5 * dy * dy
    };
    g(&z.x, &w.y) - g(&w.x, &z.y)
}

/// Probe-based saddle residual of the regularized problem at `point`.
fn regularized_residual(
    problem: &SaddleProblem,
    lambda: f64,
    base: &ProductPoint,
    point: &ProductPoint,
) -> f64 {
    let mut worst: f64 = 0.0;
    for probe in problem
        .default_probes(64)
        .iter()
        .chain(std::iter::once(base))
    {
        worst = worst.max(-regularized_bifunction(problem, lambda, base, point, probe));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::problems::library_entry;

    fn pp(x: f64, y: f64) -> ProductPoint {
        ProductPoint::new(Point::vector([x]), Point::vector([y]))
    }

    #[test]
    fn zero_problem_resolvent_is_identity() {
        let entry = library_entry("zero").unwrap();
        let base = pp(0.7, -1.3);
        for lambda in [0.2, 1.0, 5.0] {
            let r = ResolventQuery::new(&entry.problem, base.clone(), lambda)
                .solve()
                .unwrap();
            assert_eq!(
                entry.problem.domain().distance(&r.point, &base).unwrap(),
                0.0
            );
            // The generic path must agree.
            let g = ResolventQuery::new(&entry.problem, base.clone(), lambda)
                .force_generic()
                .solve()
                .unwrap();
            assert!(g.converged);
            assert!(entry.problem.domain().distance(&g.point, &base).unwrap() < 1e-8);
        }
    }

    #[test]
    fn bilinear_closed_form_values() {
        let entry = library_entry("bilinear").unwrap();
        let r = ResolventQuery::new(&entry.problem, pp(1.0, 0.0), 1.0)
            .solve()
            .unwrap();
        assert_eq!(r.method, ResolventMethod::ClosedForm);
        let v = &r.point;
        assert!((v.x.as_vector().unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((v.y.as_vector().unwrap()[0] + 0.5).abs() < 1e-15);
        assert!(r.regularized_residual <= 1e-10);
    }

    #[test]
    fn generic_matches_closed_form_on_bilinear() {
        let entry = library_entry("bilinear").unwrap();
        for (x, y, lambda) in [
            (1.0, 0.0, 1.0),
            (0.3, -0.8, 0.5),
            (-1.2, 0.4, 0.99),
            (0.9, 1.1, 0.05),
        ] {
            let base = pp(x, y);
            let exact = entry
                .problem
                .closed_form_resolvent(lambda, &base)
                .unwrap();
            let generic = ResolventQuery::new(&entry.problem, base, lambda)
                .force_generic()
                .solve()
                .unwrap();
            assert!(generic.converged, "lambda {lambda} did not converge");
            let err = entry
                .problem
                .domain()
                .distance(&generic.point, &exact)
                .unwrap();
            assert!(err <= 1e-7, "lambda {lambda}: error {err}");
        }
    }

    #[test]
    fn generic_solver_handles_box_constraints() {
        // Regularized saddle of xy over [-1,1]² from an interior base equals
        // the unconstrained closed form when that stays inside the box.
        let boxed = library_entry("bilinear_box").unwrap();
        let free = library_entry("bilinear").unwrap();
        let base = pp(0.4, 0.2);
        let lambda = 0.6;
        let r = ResolventQuery::new(&boxed.problem, base.clone(), lambda)
            .solve()
            .unwrap();
        assert_eq!(r.method, ResolventMethod::Alternating);
        assert!(r.converged);
        let exact = free.problem.closed_form_resolvent(lambda, &base).unwrap();
        let err = boxed.problem.domain().distance(&r.point, &exact).unwrap();
        assert!(err <= 1e-7, "error {err}");
    }

    #[test]
    fn invalid_lambda_is_rejected() {
        let entry = library_entry("bilinear").unwrap();
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                ResolventQuery::new(&entry.problem, pp(0.0, 0.0), bad).solve(),
                Err(ResolventError::InvalidLambda(_))
            ));
        }
    }

    #[test]
    fn uniqueness_from_different_initializations() {
        let entry = library_entry("matrix_game").unwrap();
        let base = ProductPoint::new(Point::vector([0.8, 0.2]), Point::vector([0.3, 0.7]));
        let lambda = 0.7;
        let from_base = ResolventQuery::new(&entry.problem, base.clone(), lambda)
            .solve()
            .unwrap();
        let from_corner = ResolventQuery::new(&entry.problem, base, lambda)
            .with_init(ProductPoint::new(
                Point::vector([0.01, 0.99]),
                Point::vector([0.99, 0.01]),
            ))
            .solve()
            .unwrap();
        assert!(from_base.converged && from_corner.converged);
        let gap = entry
            .problem
            .domain()
            .distance(&from_base.point, &from_corner.point)
            .unwrap();
        assert!(gap <= 1e-7, "initializations disagree by {gap}");
    }
}
