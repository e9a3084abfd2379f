use clap::{Parser, Subcommand};
use geodesic_minimax::cli::{self, suites::SuiteParams, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Saddle-point experiments on Hadamard spaces: verification suites, the
/// proximal point algorithm, and a brute-force minimax oracle.
#[derive(Parser)]
#[command(name = "geodesic-minimax", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded invariant suites and write a JSON report.
    Verify {
        /// Suite selector: geometry, resolvent, ppa, minimax, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random instances per geometry check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Seeded instances per library entry for resolvent checks.
        #[arg(long, default_value_t = 25)]
        instances: usize,
        /// Output directory for verify_report.json.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a PPA experiment from a JSON config; writes trace.csv and
    /// solve_summary.json.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (wins over the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the grid minimax oracle from a JSON config; writes
    /// minimax_report.json.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (wins over the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Verify {
            suite,
            seed,
            samples,
            instances,
            out,
        } => {
            let params = SuiteParams {
                seed,
                geometry_samples: samples,
                instances_per_entry: instances,
                ..SuiteParams::default()
            };
            let report = cli::cmd_verify(&suite, &params, &out)?;
            for s in &report.suites {
                for c in &s.checks {
                    println!(
                        "[{}] {}/{}: worst {:.3e} (tol {:.1e})",
                        if c.pass { "PASS" } else { "FAIL" },
                        s.suite,
                        c.name,
                        c.worst,
                        c.tolerance
                    );
                }
            }
            let total = report.suites.iter().map(|s| s.checks.len()).sum::<usize>();
            if report.all_pass {
                println!(
                    "verify: all {total} checks passed (report in {})",
                    out.join("verify_report.json").display()
                );
                Ok(())
            } else {
                let failed = report
                    .suites
                    .iter()
                    .flat_map(|s| &s.checks)
                    .filter(|c| !c.pass)
                    .count();
                Err(CliError::ChecksFailed(failed))
            }
        }
        Command::Solve { config, out } => {
            let config = cli::load_config(&config)?;
            let out = config.resolve_out_dir(out.as_deref());
            let summary = cli::cmd_solve(&config, &out)?;
            println!(
                "solve: {} iterations, final step {:?}, verdict {:?}",
                summary.iterations, summary.final_step_distance, summary.verdict
            );
            Ok(())
        }
        Command::Oracle { config, out } => {
            let config = cli::load_config(&config)?;
            let out = config.resolve_out_dir(out.as_deref());
            let report = cli::cmd_oracle(&config, &out)?;
            println!(
                "oracle: maxmin {:.6}, minmax {:.6}, gap {:.3e} on {}x{} grid",
                report.maxmin, report.minmax, report.gap, report.grid_x_size, report.grid_y_size
            );
            println!(
                "  maxmin arg: {:?} / minmax arg: {:?}",
                report.maxmin_arg, report.minmax_arg
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
