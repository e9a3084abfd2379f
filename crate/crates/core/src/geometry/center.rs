//! Asymptotic-center estimation and the Δ-convergence probe.
//!
//! Both work on finite tails: `max_{n ≥ tail_start} d(y, xₙ)` stands in for
//! the limsup of the paper-level definitions, which is an approximation and
//! is documented as such. An unbounded tail cannot be represented by a
//! finite estimate, so the estimator reports it instead of guessing.

use super::{GeometryError, MinimizeOpts, Point, Space};
use crate::search::LineSearch;

/// Tail diameter above which [`asymptotic_center_estimate`] refuses to
/// produce a center.
pub const DEFAULT_DIAMETER_CAP: f64 = 1e6;

/// Outcome of [`asymptotic_center_estimate`].
#[derive(Clone, Debug)]
pub enum AsymptoticCenter {
    Estimate { center: Point, radius: f64 },
    /// The tail diameter exceeded the cap; the asymptotic center of an
    /// unbounded sequence is the whole space and has no finite surrogate.
    UnboundedTail { diameter: f64 },
}

/// Approximate minimizer of φ(y) = max_{n ≥ tail_start} d(y, xₙ), found by
/// coordinate-cycled golden-section search along geodesics (φ is convex
/// along geodesics as a max of convex functions). The search starts at the
/// tail's first point and stops after 200 sweeps or a sweep gap < 1e−8.
pub fn asymptotic_center_estimate(
    space: &Space,
    points: &[Point],
    tail_start: usize,
    diameter_cap: f64,
) -> Result<AsymptoticCenter, GeometryError> {
    if tail_start >= points.len() {
        return Err(GeometryError::EmptyTail {
            tail_start,
            len: points.len(),
        });
    }
    let tail = &points[tail_start..];
    for p in tail {
        space.validate(p)?;
    }
    let diameter = tail_diameter(space, tail);
    if diameter > diameter_cap {
        return Ok(AsymptoticCenter::UnboundedTail { diameter });
    }
    let phi = |y: &Point| {
        tail.iter()
            .map(|p| space.distance_unchecked(y, p))
            .fold(0.0, f64::max)
    };
    let opts = MinimizeOpts {
        point_tol: 1e-8,
        max_sweeps: 200,
        line: LineSearch::default(),
    };
    let (center, radius) = space.minimize(phi, &tail[0], &opts);
    Ok(AsymptoticCenter::Estimate { center, radius })
}

fn tail_diameter(space: &Space, tail: &[Point]) -> f64 {
    let mut diam: f64 = 0.0;
    for (i, p) in tail.iter().enumerate() {
        for q in &tail[i + 1..] {
            diam = diam.max(space.distance_unchecked(p, q));
        }
    }
    diam
}

/// Per-witness tail behavior of the segment projections.
#[derive(Clone, Debug)]
pub struct DeltaWitnessTail {
    pub witness_index: usize,
    /// Projection gaps d(P_{[candidate, y]} xₙ, candidate) for
    /// n ≥ tail_start.
    pub gaps: Vec<f64>,
    /// Maximum gap over the settled part (the final quarter of the
    /// sequence); this is what the consistency verdict judges.
    pub tail_max: f64,
    pub tail_last: f64,
}

/// Report of [`delta_convergence_probe`].
#[derive(Clone, Debug)]
pub struct DeltaProbeReport {
    pub bounded: bool,
    pub diameter: f64,
    pub tail_start: usize,
    pub tolerance: f64,
    pub witness_tails: Vec<DeltaWitnessTail>,
    /// True iff the sequence is bounded and every witness tail stays below
    /// the tolerance.
    pub consistent: bool,
}

/// Probes whether a finite sequence behaves like a Δ-convergent one with
/// limit `candidate`: for each witness y the projections of the tail onto
/// [candidate, y] must collapse onto the candidate. The reported gaps start
/// at the midpoint of the sequence; the verdict judges the final quarter,
/// where a convergent tail has settled.
///
/// Purely diagnostic; witnesses coinciding with the candidate are skipped.
pub fn delta_convergence_probe(
    space: &Space,
    points: &[Point],
    candidate: &Point,
    witnesses: &[Point],
    tolerance: f64,
) -> Result<DeltaProbeReport, GeometryError> {
    space.validate(candidate)?;
    for p in points.iter().chain(witnesses) {
        space.validate(p)?;
    }
    let diameter = tail_diameter(space, points);
    let bounded = diameter.is_finite() && diameter <= DEFAULT_DIAMETER_CAP;
    let tail_start = points.len().div_ceil(2).min(points.len().saturating_sub(1));
    let ls = LineSearch::with_tol(1e-13);
    let mut witness_tails = Vec::new();
    for (wi, y) in witnesses.iter().enumerate() {
        if space.distance_unchecked(y, candidate) < 1e-12 {
            continue;
        }
        let gaps: Vec<f64> = points[tail_start..]
            .iter()
            .map(|p| {
                let (t, _) = ls.golden_min(
                    |t| {
                        let g = space.geodesic_unchecked(candidate, y, t.clamp(0.0, 1.0));
                        space.distance_unchecked(&g, p)
                    },
                    0.0,
                    1.0,
                );
                let proj = space.geodesic_unchecked(candidate, y, t.clamp(0.0, 1.0));
                space.distance_unchecked(&proj, candidate)
            })
            .collect();
        let settled = gaps.len() - gaps.len().div_ceil(2);
        let tail_max = gaps[settled..].iter().copied().fold(0.0f64, f64::max);
        witness_tails.push(DeltaWitnessTail {
            witness_index: wi,
            tail_max,
            tail_last: gaps.last().copied().unwrap_or(0.0),
            gaps,
        });
    }
    let consistent = bounded && witness_tails.iter().all(|w| w.tail_max <= tolerance);
    Ok(DeltaProbeReport {
        bounded,
        diameter,
        tail_start,
        tolerance,
        witness_tails,
        consistent,
    })
}
