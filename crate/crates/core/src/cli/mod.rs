//! Batch command-line front end: declarative configs in, traces and JSON
//! reports out. All outputs are written atomically (temp file + rename) and
//! every run is reproducible from its seed.

pub mod suites;

use crate::geometry::{Point, ProductPoint, ProductSpace, Space};
use crate::oracle::{
    default_grids, grid_minimax, oracle_vs_solver, GridSpec, MinimaxReport, OracleError,
    DEFAULT_EVAL_CAP,
};
use crate::ppa::{
    boundedness_verdict, residual_series, run_ppa, BoundednessVerdict, PpaError, Schedule,
    ScheduleKind, StopRule,
};
use crate::problems::{library_entry, Certificates, SaddleProblem};
use crate::spaces::EuclideanSpace;
use serde::{Deserialize, Serialize};
use std::path::Path;
use suites::{SuiteParams, SuiteReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed: {0} checks did not pass")]
    ChecksFailed(usize),
    #[error("inner solver did not converge; trace written")]
    NoConvergence,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for the failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::NoConvergence => 3,
            CliError::Oracle(OracleError::GridTooLarge { .. }) => 4,
            CliError::Oracle(_) => 2,
        }
    }
}

impl From<PpaError> for CliError {
    fn from(e: PpaError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

/// Writes bytes atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serialization");
    bytes.push(b'\n');
    bytes
}

/// Problem reference: a library entry name or an inline definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemConfig {
    Named(String),
    Inline(InlineProblem),
}

/// Inline problem families buildable from a config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InlineProblem {
    /// f(x, y) = x·y on one-dimensional Euclidean factors.
    Bilinear { space_x: Space, space_y: Space },
    /// f(x, y) = d_Y(y, b)²/2 − d_X(x, a)²/2 on arbitrary factors.
    HalfSquaredDistance {
        space_x: Space,
        space_y: Space,
        anchor_x: Point,
        anchor_y: Point,
    },
    /// f(p, q) = pᵀAq on probability simplices sized by the matrix.
    MatrixGame { matrix: Vec<Vec<f64>> },
}

impl ProblemConfig {
    pub fn build(&self) -> Result<SaddleProblem, CliError> {
        match self {
            ProblemConfig::Named(name) => library_entry(name)
                .map(|e| e.problem)
                .ok_or_else(|| CliError::Config(format!("unknown library entry {name:?}"))),
            ProblemConfig::Inline(inline) => inline.build(),
        }
    }
}

impl InlineProblem {
    fn build(&self) -> Result<SaddleProblem, CliError> {
        match self {
            InlineProblem::Bilinear { space_x, space_y } => {
                for s in [space_x, space_y] {
                    let Space::Euclidean(e) = s else {
                        return Err(CliError::Config(
                            "bilinear factors must be one-dimensional Euclidean".into(),
                        ));
                    };
                    if e.dim() != 1 {
                        return Err(CliError::Config(
                            "bilinear factors must be one-dimensional Euclidean".into(),
                        ));
                    }
                }
                Ok(SaddleProblem::new(
                    "bilinear(inline)",
                    ProductSpace::new(space_x.clone(), space_y.clone()),
                    |x, y| x.as_vector().unwrap()[0] * y.as_vector().unwrap()[0],
                    Certificates::concave_convex(),
                ))
            }
            InlineProblem::HalfSquaredDistance {
                space_x,
                space_y,
                anchor_x,
                anchor_y,
            } => {
                space_x.validate(anchor_x).map_err(config_err)?;
                space_y.validate(anchor_y).map_err(config_err)?;
                let (sx, sy) = (space_x.clone(), space_y.clone());
                let (a, b) = (anchor_x.clone(), anchor_y.clone());
                let (ra, rb) = (a.clone(), b.clone());
                let (gx, gy) = (sx.clone(), sy.clone());
                Ok(SaddleProblem::new(
                    "half_squared_distance(inline)",
                    ProductSpace::new(space_x.clone(), space_y.clone()),
                    move |x, y| {
                        let dx = sx.distance_unchecked(x, &a);
                        let dy = sy.distance_unchecked(y, &b);
                        0.5 * dy * dy - 0.5 * dx * dx
                    },
                    Certificates::concave_convex(),
                )
                .with_known_saddle(ProductPoint::new(anchor_x.clone(), anchor_y.clone()))
                .with_closed_form_resolvent(move |lambda, base| {
                    let t = lambda / (1.0 + lambda);
                    ProductPoint::new(
                        gx.geodesic_unchecked(&base.x, &ra, t),
                        gy.geodesic_unchecked(&base.y, &rb, t),
                    )
                }))
            }
            InlineProblem::MatrixGame { matrix } => {
                let rows = matrix.len();
                if rows < 2 || matrix.iter().any(|r| r.len() != matrix[0].len()) {
                    return Err(CliError::Config(
                        "matrix_game needs a rectangular matrix with at least 2 rows".into(),
                    ));
                }
                let cols = matrix[0].len();
                if cols < 2 {
                    return Err(CliError::Config("matrix_game needs at least 2 columns".into()));
                }
                let payoff = matrix.clone();
                Ok(SaddleProblem::new(
                    "matrix_game(inline)",
                    ProductSpace::new(
                        Space::Euclidean(EuclideanSpace::simplex(rows)),
                        Space::Euclidean(EuclideanSpace::simplex(cols)),
                    ),
                    move |p, q| {
                        let p = p.as_vector().unwrap();
                        let q = q.as_vector().unwrap();
                        let mut total = 0.0;
                        for (i, row) in payoff.iter().enumerate() {
                            for (j, a) in row.iter().enumerate() {
                                total += p[i] * a * q[j];
                            }
                        }
                        total
                    },
                    Certificates::concave_convex(),
                ))
            }
        }
    }
}

/// Schedule config: the kind plus optional divergence claims for explicit
/// lists (power and constant schedules derive their flags).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleConfig {
    #[serde(flatten)]
    pub kind: ScheduleKind,
    #[serde(default)]
    pub sum_diverges: Option<bool>,
    #[serde(default)]
    pub sumsq_diverges: Option<bool>,
}

impl ScheduleConfig {
    pub fn build(&self) -> Result<Schedule, CliError> {
        match &self.kind {
            ScheduleKind::Explicit { values } => Schedule::explicit(
                values.clone(),
                self.sum_diverges.unwrap_or(false),
                self.sumsq_diverges.unwrap_or(false),
            )
            .map_err(config_err),
            kind => Schedule::from_kind(kind.clone()).map_err(config_err),
        }
    }
}

/// Declarative experiment description consumed by `solve` and `oracle`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    /// Initial product point; required by `solve`.
    #[serde(default)]
    pub initial: Option<InitialPoint>,
    #[serde(default)]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default)]
    pub stop: Option<StopRule>,
    #[serde(default)]
    pub grid_x: Option<GridSpec>,
    #[serde(default)]
    pub grid_y: Option<GridSpec>,
    /// Resolution handed to [`default_grids`] when explicit grids are
    /// absent but an oracle comparison is requested.
    #[serde(default)]
    pub oracle_resolution: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Escape cap for the boundedness verdict.
    #[serde(default)]
    pub escape_cap: Option<f64>,
    /// Output directory; a `--out` flag on the command line wins over this.
    #[serde(default)]
    pub out_dir: Option<std::path::PathBuf>,
}

impl ExperimentConfig {
    /// Resolves the output directory: explicit CLI choice, then the
    /// config's own, then `out`.
    pub fn resolve_out_dir(&self, cli_choice: Option<&Path>) -> std::path::PathBuf {
        cli_choice
            .map(Path::to_path_buf)
            .or_else(|| self.out_dir.clone())
            .unwrap_or_else(|| std::path::PathBuf::from("out"))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InitialPoint {
    pub x: Point,
    pub y: Point,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

/// Full verification report written by [`cmd_verify`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
    pub all_pass: bool,
}

/// Runs the selected invariant suites and writes `verify_report.json`.
///
/// Selector ∈ {geometry, resolvent, ppa, minimax, all}. Returns the report
/// whether or not its checks passed; callers map `all_pass` to the exit
/// status.
pub fn cmd_verify(
    selector: &str,
    params: &SuiteParams,
    out_dir: &Path,
) -> Result<VerifyReport, CliError> {
    let suites: Vec<SuiteReport> = match selector {
        "geometry" => vec![suites::geometry_suite(params)],
        "resolvent" => vec![suites::resolvent_suite(params)],
        "ppa" => vec![suites::ppa_suite(params)],
        "minimax" => vec![suites::minimax_suite(params)],
        "all" => vec![
            suites::geometry_suite(params),
            suites::resolvent_suite(params),
            suites::ppa_suite(params),
            suites::minimax_suite(params),
        ],
        other => {
            return Err(CliError::Config(format!(
                "unknown suite {other:?}; expected geometry, resolvent, ppa, minimax, or all"
            )))
        }
    };
    let report = VerifyReport {
        seed: params.seed,
        all_pass: suites.iter().all(|s| s.all_pass),
        suites,
    };
    write_atomic(
        &out_dir.join("verify_report.json"),
        &to_pretty_json(&report),
    )?;
    Ok(report)
}

/// Summary JSON written next to the trace CSV by [`cmd_solve`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveSummary {
    pub problem: String,
    pub iterations: usize,
    pub final_step_distance: Option<f64>,
    pub final_residual: Option<f64>,
    pub residual_tail_vanishing: bool,
    pub verdict: BoundednessVerdict,
    /// Δ-convergence probe of both component traces against the final
    /// iterate, with low-discrepancy witness points; only computed for
    /// bounded runs. Strong and Δ-convergence coincide on the implemented
    /// locally compact backends, so this is a consistency cross-check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_probe_consistent: Option<bool>,
    pub truncated_no_convergence: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_distance_to_candidate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value_difference: Option<f64>,
}

/// Runs the PPA experiment described by `config`; writes `trace.csv` and
/// `solve_summary.json` into `out_dir`.
pub fn cmd_solve(config: &ExperimentConfig, out_dir: &Path) -> Result<SolveSummary, CliError> {
    let problem = config.problem.build()?;
    let initial = config
        .initial
        .as_ref()
        .ok_or_else(|| CliError::Config("solve needs an initial point".into()))?;
    let z1 = ProductPoint::new(initial.x.clone(), initial.y.clone());
    problem.domain().validate(&z1).map_err(config_err)?;
    let schedule = match &config.schedule {
        Some(s) => s.build()?,
        None => Schedule::constant(1.0).expect("default schedule"),
    };
    let stop = config.stop.unwrap_or_default();
    let reference = problem.known_saddle().cloned();
    let trace = run_ppa(&problem, &z1, &schedule, &stop, reference.as_ref())?;
    write_atomic(&out_dir.join("trace.csv"), trace.to_csv().as_bytes())?;

    // The stabilization scale is independent of the run's stopping
    // tolerance (a step_tol of 0 forces a full-length run but must not make
    // every converged trace look unstabilized).
    let verdict = boundedness_verdict(
        problem.domain(),
        &trace,
        config.escape_cap.unwrap_or(100.0),
        stop.step_tol.max(1e-7),
    )
    .map_err(config_err)?;
    let residuals = residual_series(&trace, 1e-6, 1e-6);

    let delta_probe_consistent = if verdict == BoundednessVerdict::Bounded {
        let final_z = trace.final_iterate().clone();
        let mut consistent = true;
        for (space, component, candidate) in [
            (
                &problem.domain().left,
                trace.iterates.iter().map(|z| z.x.clone()).collect::<Vec<_>>(),
                &final_z.x,
            ),
            (
                &problem.domain().right,
                trace.iterates.iter().map(|z| z.y.clone()).collect::<Vec<_>>(),
                &final_z.y,
            ),
        ] {
            let witnesses: Vec<Point> = (0..4).map(|i| space.probe_point(i)).collect();
            let report =
                crate::geometry::delta_convergence_probe(space, &component, candidate, &witnesses, 1e-4)
                    .map_err(config_err)?;
            consistent &= report.consistent;
        }
        Some(consistent)
    } else {
        None
    };

    let mut summary = SolveSummary {
        problem: problem.name().to_string(),
        iterations: trace.steps(),
        final_step_distance: trace.final_step_distance(),
        final_residual: trace.final_residual(),
        residual_tail_vanishing: residuals.vanishing,
        verdict,
        delta_probe_consistent,
        truncated_no_convergence: trace.truncated_no_convergence,
        oracle_distance_to_candidate: None,
        oracle_value_difference: None,
    };

    let grids = match (&config.grid_x, &config.grid_y, config.oracle_resolution) {
        (Some(gx), Some(gy), _) => Some((gx.clone(), gy.clone())),
        (None, None, Some(res)) => Some(default_grids(&problem, res)),
        _ => None,
    };
    if let Some((gx, gy)) = grids {
        if verdict == BoundednessVerdict::Bounded {
            let report = grid_minimax(&problem, &gx, &gy, eval_cap())?;
            let comparison = oracle_vs_solver(&problem, &report, &trace)?;
            summary.oracle_distance_to_candidate = Some(comparison.distance_to_candidate);
            summary.oracle_value_difference = Some(comparison.value_difference);
        }
    }
    write_atomic(
        &out_dir.join("solve_summary.json"),
        &to_pretty_json(&summary),
    )?;
    if summary.truncated_no_convergence {
        return Err(CliError::NoConvergence);
    }
    Ok(summary)
}

/// Evaluation cap, overridable through `GM_MAX_EVALS`.
pub fn eval_cap() -> usize {
    std::env::var("GM_MAX_EVALS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_EVAL_CAP)
}

/// Runs the grid oracle described by `config`; writes
/// `minimax_report.json` into `out_dir`.
pub fn cmd_oracle(config: &ExperimentConfig, out_dir: &Path) -> Result<MinimaxReport, CliError> {
    let problem = config.problem.build()?;
    let (gx, gy) = match (&config.grid_x, &config.grid_y) {
        (Some(gx), Some(gy)) => (gx.clone(), gy.clone()),
        (None, None) => default_grids(&problem, config.oracle_resolution.unwrap_or(51)),
        _ => {
            return Err(CliError::Config(
                "oracle needs both grid_x and grid_y (or neither)".into(),
            ))
        }
    };
    let report = grid_minimax(&problem, &gx, &gy, eval_cap())?;
    write_atomic(
        &out_dir.join("minimax_report.json"),
        &to_pretty_json(&report),
    )?;
    Ok(report)
}
