//! Brute-force grid minimax oracle.
//!
//! Evaluates sup–min and min–sup of a saddle function over finite grids,
//! reports the duality gap, and extracts grid saddle candidates. The oracle
//! is deliberately exhaustive and deterministic: identical inputs give
//! bit-identical reports, and arguments tie-break by enumeration order.

use crate::geometry::{GeometryError, Point, ProductPoint, Space};
use crate::ppa::IterateTrace;
use crate::problems::SaddleProblem;
use crate::spaces::Constraint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on |grid_x|·|grid_y| evaluations.
pub const DEFAULT_EVAL_CAP: usize = 100_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid too large: {requested} evaluations exceed the cap {cap}")]
    GridTooLarge { requested: usize, cap: usize },
    #[error("grid spec {spec} does not fit the space: {reason}")]
    UnsupportedGrid { spec: String, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Sampling descriptor for one factor space.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Axis-aligned lattice over the Euclidean sampling box (points outside
    /// a ball constraint are dropped).
    Lattice { points_per_axis: usize },
    /// Lattice points of the probability simplex with a fixed denominator:
    /// all compositions k/denominator. Exactly feasible.
    Simplex { denominator: usize },
    /// Radial-angular lattice on a 2-D Poincaré ball within a radius cap
    /// (Euclidean norm of the cap circle).
    Polar {
        radial: usize,
        angular: usize,
        radius_cap: f64,
    },
    /// Uniform subdivision of every tree edge.
    EdgeSubdivision { per_edge: usize },
}

impl GridSpec {
    /// Materializes the grid on `space`, validating every sample.
    pub fn generate(&self, space: &Space) -> Result<Vec<Point>, OracleError> {
        let points = match (self, space) {
            (GridSpec::Lattice { points_per_axis }, Space::Euclidean(e)) => {
                if *points_per_axis < 2 {
                    return Err(self.unsupported("needs at least 2 points per axis"));
                }
                if matches!(e.constraint(), Constraint::Simplex) {
                    return Err(self.unsupported("use a simplex grid on simplex spaces"));
                }
                let bounds = e.sample_bounds();
                let mut pts = vec![Vec::new()];
                for (lo, hi) in &bounds {
                    let mut next = Vec::new();
                    for base in &pts {
                        for i in 0..*points_per_axis {
                            let t = i as f64 / (*points_per_axis - 1) as f64;
                            let mut p = base.clone();
                            p.push(lo + t * (hi - lo));
                            next.push(p);
                        }
                    }
                    pts = next;
                }
                pts.into_iter()
                    .filter(|p| e.contains(p).unwrap_or(false))
                    .map(Point::Vector)
                    .collect()
            }
            (GridSpec::Simplex { denominator }, Space::Euclidean(e)) => {
                if !matches!(e.constraint(), Constraint::Simplex) {
                    return Err(self.unsupported("simplex grid on a non-simplex space"));
                }
                if *denominator < 1 {
                    return Err(self.unsupported("denominator must be at least 1"));
                }
                let mut pts = Vec::new();
                compositions(*denominator, e.dim(), &mut Vec::new(), &mut pts);
                pts.into_iter()
                    .map(|ks| {
                        Point::Vector(
                            ks.iter().map(|k| *k as f64 / *denominator as f64).collect(),
                        )
                    })
                    .collect()
            }
            (
                GridSpec::Polar {
                    radial,
                    angular,
                    radius_cap,
                },
                Space::Poincare(ball),
            ) => {
                if ball.dim() != 2 {
                    return Err(self.unsupported("polar grids are two-dimensional"));
                }
                if *radial < 1 || *angular < 2 || !(*radius_cap > 0.0 && *radius_cap < 1.0) {
                    return Err(self.unsupported("needs radial >= 1, angular >= 2, cap in (0,1)"));
                }
                let mut pts = vec![Point::vector([0.0, 0.0])];
                for j in 1..=*radial {
                    let r = radius_cap * j as f64 / *radial as f64;
                    for k in 0..*angular {
                        let theta = 2.0 * std::f64::consts::PI * k as f64 / *angular as f64;
                        pts.push(Point::vector([r * theta.cos(), r * theta.sin()]));
                    }
                }
                pts
            }
            (GridSpec::EdgeSubdivision { per_edge }, Space::Tree(tree)) => {
                if *per_edge < 1 {
                    return Err(self.unsupported("needs at least 1 subdivision per edge"));
                }
                let mut pts: Vec<crate::spaces::TreePoint> = Vec::new();
                for e in 0..tree.edge_count() {
                    let len = tree.edge_length(e);
                    for i in 0..=*per_edge {
                        let tp = tree.canonicalize(crate::spaces::TreePoint {
                            edge: e,
                            offset: len * i as f64 / *per_edge as f64,
                        });
                        if !pts.contains(&tp) {
                            pts.push(tp);
                        }
                    }
                }
                pts.into_iter().map(Point::Tree).collect()
            }
            _ => {
                return Err(self.unsupported("grid kind does not match the backend"));
            }
        };
        for p in &points {
            space.validate(p)?;
        }
        if points.len() < 2 {
            return Err(self.unsupported("grid produced fewer than 2 valid points"));
        }
        Ok(points)
    }

    /// Largest gap between adjacent grid samples, in the space's metric.
    pub fn max_step(&self, space: &Space) -> Result<f64, OracleError> {
        Ok(match (self, space) {
            (GridSpec::Lattice { points_per_axis }, Space::Euclidean(e)) => e
                .sample_bounds()
                .iter()
                .map(|(lo, hi)| (hi - lo) / (*points_per_axis - 1) as f64)
                .fold(0.0, f64::max),
            (GridSpec::Simplex { denominator }, Space::Euclidean(_)) => {
                2f64.sqrt() / *denominator as f64
            }
            (
                GridSpec::Polar {
                    radial,
                    angular,
                    radius_cap,
                },
                Space::Poincare(_),
            ) => {
                // Hyperbolic radial spacing is largest at the outer ring;
                // the angular arc there is 2π·sinh(R)/angular.
                let outer = 2.0 * radius_cap.atanh();
                let inner = 2.0 * (radius_cap * (*radial as f64 - 1.0) / *radial as f64).atanh();
                let radial_step = outer - inner;
                let arc = 2.0 * std::f64::consts::PI * outer.sinh() / *angular as f64;
                radial_step.max(arc)
            }
            (GridSpec::EdgeSubdivision { per_edge }, Space::Tree(tree)) => (0..tree.edge_count())
                .map(|e| tree.edge_length(e) / *per_edge as f64)
                .fold(0.0, f64::max),
            _ => {
                return Err(self.unsupported("grid kind does not match the backend"));
            }
        })
    }

    fn unsupported(&self, reason: &str) -> OracleError {
        OracleError::UnsupportedGrid {
            spec: format!("{self:?}"),
            reason: reason.into(),
        }
    }
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        let mut full = prefix.clone();
        full.push(total);
        out.push(full);
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Output of [`grid_minimax`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimaxReport {
    /// max over grid_x of min over grid_y.
    pub maxmin: f64,
    /// min over grid_y of max over grid_x.
    pub minmax: f64,
    /// minmax − maxmin; ≥ −1e−12 on every grid (weak duality).
    pub gap: f64,
    /// (argmax x, its minimizing y), ties broken by enumeration order.
    pub maxmin_arg: ProductPoint,
    /// (the maximizing x of the argmin y, argmin y).
    pub minmax_arg: ProductPoint,
    pub grid_x_size: usize,
    pub grid_y_size: usize,
    /// True when a factor space is metrically unbounded and the grid only
    /// covers a finite region of it.
    pub boxed_approximation: bool,
}

impl MinimaxReport {
    /// Grid saddle candidate: maxmin argument in X, minmax argument in Y.
    pub fn saddle_candidate(&self) -> ProductPoint {
        ProductPoint::new(self.maxmin_arg.x.clone(), self.minmax_arg.y.clone())
    }

    /// Midpoint of the two grid values.
    pub fn value(&self) -> f64 {
        0.5 * (self.maxmin + self.minmax)
    }
}

fn is_bounded(space: &Space) -> bool {
    match space {
        Space::Euclidean(e) => !matches!(e.constraint(), Constraint::None),
        // The hyperbolic ball has infinite metric diameter; grids truncate.
        Space::Poincare(_) => false,
        Space::Tree(_) => true,
    }
}

/// Exact max–min and min–max over the grids, with the full value matrix
/// evaluated once. Fails when |grid_x|·|grid_y| exceeds `cap`.
pub fn grid_minimax(
    problem: &SaddleProblem,
    grid_x: &GridSpec,
    grid_y: &GridSpec,
    cap: usize,
) -> Result<MinimaxReport, OracleError> {
    let xs = grid_x.generate(&problem.domain().left)?;
    let ys = grid_y.generate(&problem.domain().right)?;
    let requested = xs.len().saturating_mul(ys.len());
    if requested > cap {
        return Err(OracleError::GridTooLarge { requested, cap });
    }
    let values: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| ys.iter().map(|y| problem.eval(x, y)).collect())
        .collect();

    let mut maxmin = f64::NEG_INFINITY;
    let mut maxmin_ij = (0usize, 0usize);
    for (i, row) in values.iter().enumerate() {
        let (j, row_min) = argmin(row);
        if row_min > maxmin {
            maxmin = row_min;
            maxmin_ij = (i, j);
        }
    }
    let mut minmax = f64::INFINITY;
    let mut minmax_ij = (0usize, 0usize);
    for j in 0..ys.len() {
        let col = values.iter().map(|row| row[j]);
        let (i, col_max) = argmax(col);
        if col_max < minmax {
            minmax = col_max;
            minmax_ij = (i, j);
        }
    }
    Ok(MinimaxReport {
        maxmin,
        minmax,
        gap: minmax - maxmin,
        maxmin_arg: ProductPoint::new(xs[maxmin_ij.0].clone(), ys[maxmin_ij.1].clone()),
        minmax_arg: ProductPoint::new(xs[minmax_ij.0].clone(), ys[minmax_ij.1].clone()),
        grid_x_size: xs.len(),
        grid_y_size: ys.len(),
        boxed_approximation: !is_bounded(&problem.domain().left)
            || !is_bounded(&problem.domain().right),
    })
}

fn argmin(row: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, v) in row.iter().enumerate() {
        if *v < best.1 {
            best = (j, *v);
        }
    }
    best
}

fn argmax(col: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in col.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// One resolution step of [`sion_gap_study`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SionGapPoint {
    pub grid_x_size: usize,
    pub grid_y_size: usize,
    pub max_step: f64,
    pub gap: f64,
}

/// Gap sequence across increasing grid resolutions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SionGapStudy {
    pub points: Vec<SionGapPoint>,
    /// Last gap does not exceed the first (within noise): the coarse trend
    /// expected when the minimax equality holds.
    pub shrinking: bool,
}

/// Runs the oracle at each resolution pair and reports the gap sequence.
/// Requires quasi-convexity certificates; the trend assertion is only
/// meaningful under them.
pub fn sion_gap_study(
    problem: &SaddleProblem,
    resolutions: &[(GridSpec, GridSpec)],
    cap: usize,
) -> Result<SionGapStudy, OracleError> {
    let mut points = Vec::with_capacity(resolutions.len());
    for (gx, gy) in resolutions {
        let report = grid_minimax(problem, gx, gy, cap)?;
        let step = gx
            .max_step(&problem.domain().left)?
            .max(gy.max_step(&problem.domain().right)?);
        points.push(SionGapPoint {
            grid_x_size: report.grid_x_size,
            grid_y_size: report.grid_y_size,
            max_step: step,
            gap: report.gap,
        });
    }
    let shrinking = match (points.first(), points.last()) {
        (Some(first), Some(last)) => last.gap <= first.gap + 1e-9,
        _ => false,
    };
    Ok(SionGapStudy { points, shrinking })
}

/// Grid kinds matching each factor space of a problem, at a common
/// resolution (points per axis, simplex denominator, or subdivisions).
pub fn default_grids(problem: &SaddleProblem, resolution: usize) -> (GridSpec, GridSpec) {
    let pick = |space: &Space| match space {
        Space::Euclidean(e) => {
            if matches!(e.constraint(), Constraint::Simplex) {
                GridSpec::Simplex {
                    denominator: resolution,
                }
            } else {
                GridSpec::Lattice {
                    points_per_axis: resolution,
                }
            }
        }
        Space::Poincare(_) => GridSpec::Polar {
            radial: resolution / 2 + 1,
            angular: resolution,
            radius_cap: 0.8,
        },
        Space::Tree(_) => GridSpec::EdgeSubdivision {
            per_edge: resolution,
        },
    };
    (pick(&problem.domain().left), pick(&problem.domain().right))
}

/// Empirical Lipschitz bound along geodesics: the largest sampled quotient
/// |f(z) − f(w)| / d(z, w) over deterministic probe pairs.
pub fn estimate_lipschitz(problem: &SaddleProblem, pairs: usize) -> f64 {
    let domain = problem.domain();
    let mut worst: f64 = 0.0;
    for i in 0..pairs {
        let z = domain.probe_point(2 * i);
        let w = domain.probe_point(2 * i + 1);
        let d = domain.distance_unchecked(&z, &w);
        if d > 1e-9 {
            let df = (problem.eval_product(&z) - problem.eval_product(&w)).abs();
            worst = worst.max(df / d);
        }
    }
    worst
}

/// Comparison between a converged PPA trace and the grid oracle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleComparison {
    /// Product distance from the trace's final iterate to the grid saddle
    /// candidate.
    pub distance_to_candidate: f64,
    /// |f(final iterate) − oracle value| with the oracle value the midpoint
    /// of maxmin and minmax.
    pub value_difference: f64,
}

pub fn oracle_vs_solver(
    problem: &SaddleProblem,
    report: &MinimaxReport,
    trace: &IterateTrace,
) -> Result<OracleComparison, OracleError> {
    let candidate = report.saddle_candidate();
    let last = trace.final_iterate();
    let distance_to_candidate = problem.domain().distance_ell2(last, &candidate)?;
    let value_difference = (problem.eval_product(last) - report.value()).abs();
    Ok(OracleComparison {
        distance_to_candidate,
        value_difference,
    })
}
