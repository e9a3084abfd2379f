//! Proximal point algorithm for saddle functions:
//! (xₙ₊₁, yₙ₊₁) = R_{λₙ}(xₙ, yₙ).

mod diagnostics;

pub use diagnostics::{
    boundedness_verdict, fejer_check, residual_series, BoundednessVerdict, FejerReport,
    ResidualReport,
};

use crate::geometry::{GeometryError, Point, ProductPoint};
use crate::problems::SaddleProblem;
use crate::resolvent::{ResolventError, ResolventQuery};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpaError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("trace parse error: {0}")]
    TraceParse(String),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Step-size schedule {λₙ}.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant { lambda: f64 },
    /// λₙ = c·n^(−p).
    Power { c: f64, p: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(flatten)]
    kind: ScheduleKind,
    /// Σλₙ = ∞ for the infinite schedule this represents.
    pub sum_diverges: bool,
    /// Σλₙ² = ∞.
    pub sumsq_diverges: bool,
}

impl Schedule {
    pub fn constant(lambda: f64) -> Result<Self, PpaError> {
        if lambda <= 0.0 || !lambda.is_finite() || lambda.is_nan() {
            return Err(PpaError::InvalidSchedule(format!(
                "constant lambda must be positive, got {lambda}"
            )));
        }
        Ok(Schedule {
            kind: ScheduleKind::Constant { lambda },
            sum_diverges: true,
            sumsq_diverges: true,
        })
    }

    /// λₙ = c·n^(−p); the divergence flags follow from p:
    /// p ≤ ½ diverges in both senses, p ∈ (½, 1] only in the plain sum.
    pub fn power(c: f64, p: f64) -> Result<Self, PpaError> {
        if c <= 0.0 || !c.is_finite() || !p.is_finite() || p < 0.0 || c.is_nan() {
            return Err(PpaError::InvalidSchedule(format!(
                "power schedule needs c > 0 and p >= 0, got c = {c}, p = {p}"
            )));
        }
        Ok(Schedule {
            kind: ScheduleKind::Power { c, p },
            sum_diverges: p <= 1.0,
            sumsq_diverges: p <= 0.5,
        })
    }

    /// Finite explicit prefix of a schedule; the divergence flags describe
    /// the infinite schedule it truncates and are the caller's claim.
    pub fn explicit(
        values: Vec<f64>,
        sum_diverges: bool,
        sumsq_diverges: bool,
    ) -> Result<Self, PpaError> {
        if values.is_empty() || values.iter().any(|v| *v <= 0.0 || !v.is_finite() || v.is_nan()) {
            return Err(PpaError::InvalidSchedule(
                "explicit schedule needs a nonempty list of positive values".into(),
            ));
        }
        Ok(Schedule {
            kind: ScheduleKind::Explicit { values },
            sum_diverges,
            sumsq_diverges,
        })
    }

    pub fn from_kind(kind: ScheduleKind) -> Result<Self, PpaError> {
        match kind {
            ScheduleKind::Constant { lambda } => Schedule::constant(lambda),
            ScheduleKind::Power { c, p } => Schedule::power(c, p),
            ScheduleKind::Explicit { values } => Schedule::explicit(values, true, true),
        }
    }

    /// λₙ for 1-based step index n. Explicit schedules repeat their final
    /// value past the end of the list.
    pub fn lambda(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match &self.kind {
            ScheduleKind::Constant { lambda } => *lambda,
            ScheduleKind::Power { c, p } => c * (n as f64).powf(-p),
            ScheduleKind::Explicit { values } => *values
                .get(n - 1)
                .unwrap_or_else(|| values.last().expect("nonempty")),
        }
    }
}

/// Stopping rule for [`run_ppa`]: both the step distance and the residual
/// must fall below their thresholds (the underlying convergence theory is
/// asymptotic without a rate, so stopping is an engineering choice).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StopRule {
    pub max_iter: usize,
    pub step_tol: f64,
    pub residual_tol: f64,
    /// Tolerance handed to the inner resolvent solver.
    pub inner_tol: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            max_iter: 10_000,
            step_tol: 1e-7,
            residual_tol: 1e-6,
            inner_tol: 1e-8,
        }
    }
}

/// Recorded PPA run: iterates z₁..z_{N+1} plus per-step data.
#[derive(Clone, Debug)]
pub struct IterateTrace {
    pub iterates: Vec<ProductPoint>,
    /// λₙ of the step producing iterate n+1.
    pub lambdas: Vec<f64>,
    /// d(zₙ₊₁, zₙ) in the ℓ²-product metric.
    pub step_distances: Vec<f64>,
    /// (1/λₙ)·d(zₙ₊₁, zₙ).
    pub residuals: Vec<f64>,
    /// d(zₙ, reference) for every iterate, when a reference was supplied.
    pub dist_to_reference: Option<Vec<f64>>,
    /// True when an inner solve failed to converge and the trace stops
    /// at the last reliable iterate.
    pub truncated_no_convergence: bool,
}

impl IterateTrace {
    pub fn steps(&self) -> usize {
        self.step_distances.len()
    }

    pub fn final_iterate(&self) -> &ProductPoint {
        self.iterates.last().expect("trace holds z1")
    }

    pub fn final_step_distance(&self) -> Option<f64> {
        self.step_distances.last().copied()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }
}

/// Runs the PPA from `z1` under `schedule` until the stop rule fires.
pub fn run_ppa(
    problem: &SaddleProblem,
    z1: &ProductPoint,
    schedule: &Schedule,
    stop: &StopRule,
    reference: Option<&ProductPoint>,
) -> Result<IterateTrace, PpaError> {
    drive(problem, z1, |n| schedule.lambda(n), stop, reference, true)
}

/// Picard iteration of the single resolvent R_λ for exactly `n_steps`
/// steps (no early stopping).
pub fn picard_iterate(
    problem: &SaddleProblem,
    z1: &ProductPoint,
    lambda: f64,
    n_steps: usize,
    inner_tol: f64,
) -> Result<IterateTrace, PpaError> {
    let stop = StopRule {
        max_iter: n_steps,
        step_tol: 0.0,
        residual_tol: 0.0,
        inner_tol,
    };
    drive(problem, z1, |_| lambda, &stop, None, false)
}

fn drive(
    problem: &SaddleProblem,
    z1: &ProductPoint,
    lambda_at: impl Fn(usize) -> f64,
    stop: &StopRule,
    reference: Option<&ProductPoint>,
    early_stop: bool,
) -> Result<IterateTrace, PpaError> {
    let domain = problem.domain();
    domain.validate(z1)?;
    if let Some(r) = reference {
        domain.validate(r)?;
    }
    let mut trace = IterateTrace {
        iterates: vec![z1.clone()],
        lambdas: Vec::new(),
        step_distances: Vec::new(),
        residuals: Vec::new(),
        dist_to_reference: reference.map(|_| Vec::new()),
        truncated_no_convergence: false,
    };
    if let (Some(r), Some(d)) = (reference, trace.dist_to_reference.as_mut()) {
        d.push(domain.distance_ell2(z1, r)?);
    }
    let mut current = z1.clone();
    for n in 1..=stop.max_iter {
        let lambda = lambda_at(n);
        let result = ResolventQuery::new(problem, current.clone(), lambda)
            .with_inner_tol(stop.inner_tol)
            .solve()?;
        if !result.converged {
            trace.truncated_no_convergence = true;
            break;
        }
        let next = result.point;
        let step = domain.distance_ell2(&next, &current)?;
        trace.lambdas.push(lambda);
        trace.step_distances.push(step);
        trace.residuals.push(step / lambda);
        if let (Some(r), Some(d)) = (reference, trace.dist_to_reference.as_mut()) {
            d.push(domain.distance_ell2(&next, r)?);
        }
        trace.iterates.push(next.clone());
        current = next;
        if early_stop && step <= stop.step_tol && step / lambda <= stop.residual_tol {
            break;
        }
    }
    Ok(trace)
}

impl IterateTrace {
    /// CSV export: one row per iterate. Row 0 carries z₁ with empty step
    /// fields; row n carries λₙ, the step into zₙ₊₁, its residual, the
    /// optional reference distance, and the flattened coordinates (vector
    /// backends list their coordinates; tree backends list edge id and
    /// offset). Floats use the shortest round-trip decimal form.
    pub fn to_csv(&self) -> String {
        let mut header = vec![
            "n".to_string(),
            "lambda_n".to_string(),
            "step_distance".to_string(),
            "residual".to_string(),
        ];
        if self.dist_to_reference.is_some() {
            header.push("dist_to_reference".to_string());
        }
        let first = &self.iterates[0];
        header.extend(component_headers("x", &first.x));
        header.extend(component_headers("y", &first.y));
        let mut out = header.join(",");
        out.push('\n');
        for (i, z) in self.iterates.iter().enumerate() {
            let mut row: Vec<String> = vec![i.to_string()];
            if i == 0 {
                row.push(String::new());
                row.push(String::new());
                row.push(String::new());
            } else {
                row.push(format_float(self.lambdas[i - 1]));
                row.push(format_float(self.step_distances[i - 1]));
                row.push(format_float(self.residuals[i - 1]));
            }
            if let Some(d) = &self.dist_to_reference {
                row.push(format_float(d[i]));
            }
            for v in z.x.flatten() {
                row.push(format_float(v));
            }
            for v in z.y.flatten() {
                row.push(format_float(v));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses a trace produced by [`IterateTrace::to_csv`]; values round-trip
    /// bit-exactly.
    pub fn from_csv(text: &str) -> Result<IterateTrace, PpaError> {
        let mut lines = text.lines();
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| PpaError::TraceParse("empty csv".into()))?
            .split(',')
            .collect();
        let has_reference = header.contains(&"dist_to_reference");
        let fixed = if has_reference { 5 } else { 4 };
        let x_cols: Vec<&&str> = header.iter().filter(|h| h.starts_with("x_")).collect();
        let y_cols: Vec<&&str> = header.iter().filter(|h| h.starts_with("y_")).collect();
        let x_tree = x_cols.iter().any(|h| **h == "x_edge");
        let y_tree = y_cols.iter().any(|h| **h == "y_edge");
        let (x_len, y_len) = (x_cols.len(), y_cols.len());

        let mut trace = IterateTrace {
            iterates: Vec::new(),
            lambdas: Vec::new(),
            step_distances: Vec::new(),
            residuals: Vec::new(),
            dist_to_reference: has_reference.then(Vec::new),
            truncated_no_convergence: false,
        };
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != fixed + x_len + y_len {
                return Err(PpaError::TraceParse(format!(
                    "row has {} fields, expected {}",
                    fields.len(),
                    fixed + x_len + y_len
                )));
            }
            let parse = |s: &str| -> Result<f64, PpaError> {
                s.parse::<f64>()
                    .map_err(|e| PpaError::TraceParse(format!("bad float {s:?}: {e}")))
            };
            if !fields[1].is_empty() {
                trace.lambdas.push(parse(fields[1])?);
                trace.step_distances.push(parse(fields[2])?);
                trace.residuals.push(parse(fields[3])?);
            }
            if let Some(d) = trace.dist_to_reference.as_mut() {
                d.push(parse(fields[4])?);
            }
            let xs: Vec<f64> = fields[fixed..fixed + x_len]
                .iter()
                .map(|s| parse(s))
                .collect::<Result<_, _>>()?;
            let ys: Vec<f64> = fields[fixed + x_len..]
                .iter()
                .map(|s| parse(s))
                .collect::<Result<_, _>>()?;
            trace.iterates.push(ProductPoint::new(
                assemble_point(xs, x_tree)?,
                assemble_point(ys, y_tree)?,
            ));
        }
        Ok(trace)
    }
}

fn component_headers(prefix: &str, p: &Point) -> Vec<String> {
    match p {
        Point::Vector(v) => (0..v.len()).map(|i| format!("{prefix}_{i}")).collect(),
        Point::Tree(_) => vec![format!("{prefix}_edge"), format!("{prefix}_offset")],
    }
}

fn assemble_point(vals: Vec<f64>, is_tree: bool) -> Result<Point, PpaError> {
    if is_tree {
        if vals.len() != 2 {
            return Err(PpaError::TraceParse("tree point needs 2 columns".into()));
        }
        Ok(Point::tree(vals[0] as usize, vals[1]))
    } else {
        Ok(Point::Vector(vals))
    }
}

/// Shortest round-trip decimal representation.
fn format_float(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::library_entry;

    fn pp(x: f64, y: f64) -> ProductPoint {
        ProductPoint::new(Point::vector([x]), Point::vector([y]))
    }

    #[test]
    fn schedule_flags() {
        let c = Schedule::constant(1.0).unwrap();
        assert!(c.sum_diverges && c.sumsq_diverges);
        let boundary = Schedule::power(1.0, 0.5).unwrap();
        assert!(boundary.sum_diverges && boundary.sumsq_diverges);
        let slow = Schedule::power(1.0, 0.8).unwrap();
        assert!(slow.sum_diverges && !slow.sumsq_diverges);
        let summable = Schedule::power(1.0, 1.5).unwrap();
        assert!(!summable.sum_diverges && !summable.sumsq_diverges);
        assert!(Schedule::constant(0.0).is_err());
        assert!(Schedule::explicit(vec![], true, true).is_err());
        assert!((Schedule::power(2.0, 0.5).unwrap().lambda(4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_problem_trace_is_constant() {
        let entry = library_entry("zero").unwrap();
        let trace = run_ppa(
            &entry.problem,
            &pp(0.4, -0.9),
            &Schedule::constant(1.0).unwrap(),
            &StopRule::default(),
            None,
        )
        .unwrap();
        assert_eq!(trace.steps(), 1);
        assert_eq!(trace.step_distances[0], 0.0);
    }

    #[test]
    fn bilinear_norm_contracts_by_sqrt_half() {
        let entry = library_entry("bilinear").unwrap();
        let trace = run_ppa(
            &entry.problem,
            &pp(1.0, 0.0),
            &Schedule::constant(1.0).unwrap(),
            &StopRule::default(),
            Some(&pp(0.0, 0.0)),
        )
        .unwrap();
        let dist = trace.dist_to_reference.as_ref().unwrap();
        for (n, d) in dist.iter().enumerate() {
            let expected = 2f64.powf(-(n as f64) / 2.0);
            assert!((d - expected).abs() < 1e-9, "n = {n}: {d} vs {expected}");
        }
        assert!(trace.steps() <= 60);
        assert!(trace.final_step_distance().unwrap() < 1e-7);
    }

    #[test]
    fn saddle_free_problem_escapes_linearly() {
        let entry = library_entry("linear_escape").unwrap();
        let trace = picard_iterate(&entry.problem, &pp(0.0, 0.0), 1.0, 30, 1e-8).unwrap();
        for (k, z) in trace.iterates.iter().enumerate() {
            assert!((z.x.as_vector().unwrap()[0] - k as f64).abs() < 1e-12);
            assert!((z.y.as_vector().unwrap()[0] - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn picard_matches_run_ppa_on_constant_schedules() {
        let entry = library_entry("bilinear").unwrap();
        let a = picard_iterate(&entry.problem, &pp(1.0, 0.0), 1.0, 10, 1e-8).unwrap();
        let b = run_ppa(
            &entry.problem,
            &pp(1.0, 0.0),
            &Schedule::constant(1.0).unwrap(),
            &StopRule {
                max_iter: 10,
                step_tol: 0.0,
                residual_tol: 0.0,
                inner_tol: 1e-8,
            },
            None,
        )
        .unwrap();
        for (za, zb) in a.iterates.iter().zip(&b.iterates) {
            assert!(entry.problem.domain().distance(za, zb).unwrap() < 1e-12);
        }
    }

    #[test]
    fn picard_fixes_saddle_points() {
        let entry = library_entry("quadratic").unwrap();
        let saddle = entry.problem.known_saddle().unwrap().clone();
        let trace = picard_iterate(&entry.problem, &saddle, 2.0, 5, 1e-8).unwrap();
        for step in &trace.step_distances {
            assert!(*step < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let entry = library_entry("bilinear").unwrap();
        let trace = run_ppa(
            &entry.problem,
            &pp(1.0, 0.0),
            &Schedule::power(1.0, 0.5).unwrap(),
            &StopRule {
                max_iter: 12,
                ..StopRule::default()
            },
            Some(&pp(0.0, 0.0)),
        )
        .unwrap();
        let csv = trace.to_csv();
        let parsed = IterateTrace::from_csv(&csv).unwrap();
        assert_eq!(parsed.iterates.len(), trace.iterates.len());
        for (a, b) in trace.iterates.iter().zip(&parsed.iterates) {
            assert_eq!(a, b);
        }
        assert_eq!(trace.lambdas, parsed.lambdas);
        assert_eq!(trace.step_distances, parsed.step_distances);
        assert_eq!(trace.residuals, parsed.residuals);
        assert_eq!(trace.dist_to_reference, parsed.dist_to_reference);
    }

    #[test]
    fn csv_round_trip_tree_points() {
        let entry = library_entry("tree_dsq").unwrap();
        let start = ProductPoint::new(Point::tree(1, 0.3), Point::tree(2, 0.1));
        let trace = picard_iterate(&entry.problem, &start, 1.0, 5, 1e-8).unwrap();
        let parsed = IterateTrace::from_csv(&trace.to_csv()).unwrap();
        for (a, b) in trace.iterates.iter().zip(&parsed.iterates) {
            assert!(entry.problem.domain().distance(a, b).unwrap() < 1e-15);
        }
    }
}
