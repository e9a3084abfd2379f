//! Fejér, residual, and boundedness diagnostics for PPA traces.

use super::IterateTrace;
use crate::geometry::{GeometryError, ProductPoint, ProductSpace};
use serde::{Deserialize, Serialize};

/// Fejér monotonicity probe: distances from a reference point along the
/// trace must be nonincreasing (up to slack) when the reference is a saddle
/// point.
#[derive(Clone, Debug)]
pub struct FejerReport {
    pub distances: Vec<f64>,
    /// Largest per-step increase, clamped at zero from below.
    pub max_violation: f64,
    pub slack: f64,
    pub monotone: bool,
}

pub fn fejer_check(
    domain: &ProductSpace,
    trace: &IterateTrace,
    reference: &ProductPoint,
    slack: f64,
) -> Result<FejerReport, GeometryError> {
    domain.validate(reference)?;
    let distances: Vec<f64> = trace
        .iterates
        .iter()
        .map(|z| domain.distance_ell2(z, reference))
        .collect::<Result<_, _>>()?;
    let max_violation = distances
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    Ok(FejerReport {
        monotone: max_violation <= slack,
        max_violation,
        slack,
        distances,
    })
}

/// Residual-series diagnostics: the residual (1/λₙ)·d(zₙ₊₁, zₙ) must be
/// nonincreasing up to slack, and on a bounded run with Σλₙ² = ∞ its tail
/// must fall below the threshold.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub residuals: Vec<f64>,
    pub max_violation: f64,
    pub tail_value: f64,
    pub monotone: bool,
    /// Tail below the vanishing threshold.
    pub vanishing: bool,
}

pub fn residual_series(trace: &IterateTrace, slack: f64, tail_threshold: f64) -> ResidualReport {
    let residuals = trace.residuals.clone();
    let max_violation = residuals
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let tail_value = residuals.last().copied().unwrap_or(0.0);
    ResidualReport {
        monotone: max_violation <= slack,
        vanishing: tail_value <= tail_threshold,
        max_violation,
        tail_value,
        residuals,
    }
}

/// Trichotomy verdict on a finite trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundednessVerdict {
    Bounded,
    Escaped,
    Inconclusive,
}

/// Classifies a trace: `Escaped` when some iterate moved farther than `cap`
/// from the start, `Bounded` when the last-quarter diameter stabilized below
/// `step_tol × length`, `Inconclusive` otherwise (including short traces).
pub fn boundedness_verdict(
    domain: &ProductSpace,
    trace: &IterateTrace,
    cap: f64,
    step_tol: f64,
) -> Result<BoundednessVerdict, GeometryError> {
    let start = &trace.iterates[0];
    for z in &trace.iterates {
        if domain.distance_ell2(start, z)? > cap {
            return Ok(BoundednessVerdict::Escaped);
        }
    }
    let n = trace.iterates.len();
    let diameter_of = |pts: &[ProductPoint]| -> Result<f64, GeometryError> {
        let mut diam: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                diam = diam.max(domain.distance_ell2(p, q)?);
            }
        }
        Ok(diam)
    };
    if n < 8 {
        // Too little data to judge stabilization, except for a trace that
        // pinned itself to a fixed point outright.
        return Ok(if diameter_of(&trace.iterates)? < step_tol {
            BoundednessVerdict::Bounded
        } else {
            BoundednessVerdict::Inconclusive
        });
    }
    let diameter = diameter_of(&trace.iterates[n - n / 4..])?;
    if diameter < step_tol * n as f64 {
        Ok(BoundednessVerdict::Bounded)
    } else {
        Ok(BoundednessVerdict::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::ppa::{picard_iterate, run_ppa, Schedule, StopRule};
    use crate::problems::library_entry;

    fn pp(x: f64, y: f64) -> ProductPoint {
        ProductPoint::new(Point::vector([x]), Point::vector([y]))
    }

    #[test]
    fn fejer_strictly_decreases_on_bilinear() {
        let entry = library_entry("bilinear").unwrap();
        let trace = run_ppa(
            &entry.problem,
            &pp(1.0, 0.0),
            &Schedule::constant(1.0).unwrap(),
            &StopRule::default(),
            None,
        )
        .unwrap();
        let report = fejer_check(entry.problem.domain(), &trace, &pp(0.0, 0.0), 1e-7).unwrap();
        assert!(report.monotone);
        assert_eq!(report.max_violation, 0.0);
        // Exact contraction factor 1/√2 per step.
        for w in report.distances.windows(2) {
            if w[0] > 1e-12 {
                assert!((w[1] / w[0] - 0.5f64.sqrt()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fejer_on_constant_trace_is_all_zero() {
        let entry = library_entry("quadratic").unwrap();
        let saddle = entry.problem.known_saddle().unwrap().clone();
        let trace = picard_iterate(&entry.problem, &saddle, 1.0, 5, 1e-8).unwrap();
        let report = fejer_check(entry.problem.domain(), &trace, &saddle, 1e-7).unwrap();
        assert!(report.monotone);
        assert!(report.distances.iter().all(|d| *d < 1e-12));
    }

    #[test]
    fn residuals_contract_and_vanish_on_bilinear() {
        let entry = library_entry("bilinear").unwrap();
        let trace = picard_iterate(&entry.problem, &pp(1.0, 0.0), 1.0, 50, 1e-8).unwrap();
        let report = residual_series(&trace, 1e-9, 1e-6);
        assert!(report.monotone, "violation {}", report.max_violation);
        assert!(report.vanishing, "tail {}", report.tail_value);
    }

    #[test]
    fn saddle_free_residuals_are_constant_but_not_vanishing() {
        let entry = library_entry("linear_escape").unwrap();
        let trace = picard_iterate(&entry.problem, &pp(0.0, 0.0), 1.0, 40, 1e-8).unwrap();
        let report = residual_series(&trace, 1e-9, 1e-6);
        assert!(report.monotone);
        assert!(!report.vanishing);
        assert!((report.tail_value - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn verdicts() {
        let bilinear = library_entry("bilinear").unwrap();
        let trace = picard_iterate(&bilinear.problem, &pp(1.0, 0.0), 1.0, 100, 1e-8).unwrap();
        assert_eq!(
            boundedness_verdict(bilinear.problem.domain(), &trace, 100.0, 1e-7).unwrap(),
            BoundednessVerdict::Bounded
        );

        let escapee = library_entry("linear_escape").unwrap();
        let trace = picard_iterate(&escapee.problem, &pp(0.0, 0.0), 1.0, 120, 1e-8).unwrap();
        assert_eq!(
            boundedness_verdict(escapee.problem.domain(), &trace, 100.0, 1e-7).unwrap(),
            BoundednessVerdict::Escaped
        );

        let short = picard_iterate(&escapee.problem, &pp(0.0, 0.0), 1.0, 3, 1e-8).unwrap();
        assert_eq!(
            boundedness_verdict(escapee.problem.domain(), &short, 100.0, 1e-7).unwrap(),
            BoundednessVerdict::Inconclusive
        );
    }
}
