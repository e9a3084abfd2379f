//! Inequality checks for resolvents of saddle functions.
//!
//! Each check returns the signed residual LHS − RHS of the corresponding
//! inequality, computed with resolvents solved at the query tolerance, so a
//! correct implementation keeps all residuals below a small positive slack.

use super::{ResolventError, ResolventQuery, ResolventResult};
use crate::geometry::ProductPoint;
use crate::problems::SaddleProblem;

fn solve(
    problem: &SaddleProblem,
    lambda: f64,
    base: &ProductPoint,
    inner_tol: f64,
) -> Result<ResolventResult, ResolventError> {
    ResolventQuery::new(problem, base.clone(), lambda)
        .with_inner_tol(inner_tol)
        .solve()
}

/// One candidate of [`check_fixed_points`].
#[derive(Clone, Debug)]
pub struct FixedPointCandidate {
    /// d(R_λ z, z).
    pub resolvent_gap: f64,
    /// Probe-based saddle residual of the unregularized problem at z.
    pub saddle_residual: f64,
}

/// Fix(R_λ) = Saddle(f) probe: resolvent gaps and saddle residuals must
/// vanish together.
#[derive(Clone, Debug)]
pub struct FixedPointReport {
    pub lambda: f64,
    pub candidates: Vec<FixedPointCandidate>,
}

pub fn check_fixed_points(
    problem: &SaddleProblem,
    lambda: f64,
    candidates: &[ProductPoint],
    inner_tol: f64,
) -> Result<FixedPointReport, ResolventError> {
    let probes = problem.default_probes(256);
    let mut out = Vec::with_capacity(candidates.len());
    for z in candidates {
        let image = solve(problem, lambda, z, inner_tol)?;
        let resolvent_gap = problem.domain().distance_ell2(&image.point, z)?;
        let saddle_residual = problem.saddle_residual(z, &probes)?;
        out.push(FixedPointCandidate {
            resolvent_gap,
            saddle_residual,
        });
    }
    Ok(FixedPointReport {
        lambda,
        candidates: out,
    })
}

/// Residual of the base inequality: for R = R_λ(z) and any w = (x′, y′),
/// d(Rz, w)² + d(Rz, z)² + 2λ·(f(x′, R₂z) − f(R₁z, y′)) ≤ d(z, w)².
pub fn check_resolvent_inequality(
    problem: &SaddleProblem,
    lambda: f64,
    z: &ProductPoint,
    w: &ProductPoint,
    inner_tol: f64,
) -> Result<f64, ResolventError> {
    let domain = problem.domain();
    domain.validate(w)?;
    let rz = solve(problem, lambda, z, inner_tol)?.point;
    let d_rz_w = domain.distance_ell2(&rz, w)?;
    let d_rz_z = domain.distance_ell2(&rz, z)?;
    let d_z_w = domain.distance_ell2(z, w)?;
    let coupling = problem.eval(&w.x, &rz.y) - problem.eval(&rz.x, &w.y);
    Ok(d_rz_w * d_rz_w + d_rz_z * d_rz_z + 2.0 * lambda * coupling - d_z_w * d_z_w)
}

/// Residual of the two-parameter comparison:
/// (λ+μ)d(R_λz, R_μw)² + μd(R_λz, z)² + λd(R_μw, w)²
///   ≤ λd(R_λz, w)² + μd(R_μw, z)².
pub fn check_resolvent_comparison(
    problem: &SaddleProblem,
    lambda: f64,
    mu: f64,
    z: &ProductPoint,
    w: &ProductPoint,
    inner_tol: f64,
) -> Result<f64, ResolventError> {
    let domain = problem.domain();
    let rz = solve(problem, lambda, z, inner_tol)?.point;
    let rw = solve(problem, mu, w, inner_tol)?.point;
    let d_rz_rw = domain.distance_ell2(&rz, &rw)?;
    let d_rz_z = domain.distance_ell2(&rz, z)?;
    let d_rw_w = domain.distance_ell2(&rw, w)?;
    let d_rz_w = domain.distance_ell2(&rz, w)?;
    let d_rw_z = domain.distance_ell2(&rw, z)?;
    Ok((lambda + mu) * d_rz_rw * d_rz_rw + mu * d_rz_z * d_rz_z + lambda * d_rw_w * d_rw_w
        - lambda * d_rz_w * d_rz_w
        - mu * d_rw_z * d_rw_z)
}

/// One pair of [`check_firm_nonspreading_and_nonexpansive`].
#[derive(Clone, Debug)]
pub struct NonspreadingPair {
    /// 2d(Rz,Rw)² + d(Rz,z)² + d(Rw,w)² − d(Rz,w)² − d(Rw,z)².
    pub firm_residual: f64,
    /// d(Rz, Rw) − d(z, w).
    pub nonexpansive_residual: f64,
}

#[derive(Clone, Debug)]
pub struct NonspreadingReport {
    pub lambda: f64,
    pub pairs: Vec<NonspreadingPair>,
    pub worst_firm: f64,
    pub worst_nonexpansive: f64,
}

pub fn check_firm_nonspreading_and_nonexpansive(
    problem: &SaddleProblem,
    lambda: f64,
    pairs: &[(ProductPoint, ProductPoint)],
    inner_tol: f64,
) -> Result<NonspreadingReport, ResolventError> {
    let domain = problem.domain();
    let mut out = Vec::with_capacity(pairs.len());
    let mut worst_firm = f64::NEG_INFINITY;
    let mut worst_nonexpansive = f64::NEG_INFINITY;
    for (z, w) in pairs {
        let rz = solve(problem, lambda, z, inner_tol)?.point;
        let rw = solve(problem, lambda, w, inner_tol)?.point;
        let d_rz_rw = domain.distance_ell2(&rz, &rw)?;
        let d_rz_z = domain.distance_ell2(&rz, z)?;
        let d_rw_w = domain.distance_ell2(&rw, w)?;
        let d_rz_w = domain.distance_ell2(&rz, w)?;
        let d_rw_z = domain.distance_ell2(&rw, z)?;
        let firm_residual = 2.0 * d_rz_rw * d_rz_rw + d_rz_z * d_rz_z + d_rw_w * d_rw_w
            - d_rz_w * d_rz_w
            - d_rw_z * d_rw_z;
        let nonexpansive_residual = d_rz_rw - domain.distance_ell2(z, w)?;
        worst_firm = worst_firm.max(firm_residual);
        worst_nonexpansive = worst_nonexpansive.max(nonexpansive_residual);
        out.push(NonspreadingPair {
            firm_residual,
            nonexpansive_residual,
        });
    }
    Ok(NonspreadingReport {
        lambda,
        pairs: out,
        worst_firm,
        worst_nonexpansive,
    })
}

/// Residual of the step estimate
/// (1/μ)d(R_μR_λz, R_λz) ≤ (1/λ)d(R_λz, z).
pub fn check_step_estimate(
    problem: &SaddleProblem,
    lambda: f64,
    mu: f64,
    z: &ProductPoint,
    inner_tol: f64,
) -> Result<f64, ResolventError> {
    let domain = problem.domain();
    let rz = solve(problem, lambda, z, inner_tol)?.point;
    let rrz = solve(problem, mu, &rz, inner_tol)?.point;
    let lhs = domain.distance_ell2(&rrz, &rz)? / mu;
    let rhs = domain.distance_ell2(&rz, z)? / lambda;
    Ok(lhs - rhs)
}
