use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entcopy_cli::report::{channel_report, params_report, run_channel, ChannelCheck};
use entcopy_cli::sweep::{cmd_sweep, SweepConfig};
use entcopy_cli::verify::{run_verify, DEFAULT_TOLERANCE};
use entcopy_cli::{parse_class, CliError};

/// Optimal covariant copying of entangled two-qubit states.
#[derive(Parser)]
#[command(name = "entcopy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the optimal copier over a grid of alpha as CSV.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        alpha_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Slack for the per-row sanity checks.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every invariant check and report margins.
    Verify {
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the optimal parameters for one alpha.
    Params {
        #[arg(long)]
        alpha: f64,
    },
    /// Check one realization of the optimal channel.
    Channel {
        #[arg(long)]
        alpha: f64,
        /// kraus, dilation, covariance or twirl.
        #[arg(long)]
        check: ChannelCheck,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// `Ok(true)` when every check passed.
fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Sweep {
            alpha_min,
            alpha_max,
            steps,
            tolerance,
            seed,
            out,
        } => {
            let config = SweepConfig {
                alpha_min,
                alpha_max,
                steps,
                tolerance,
                out,
                seed,
            };
            let records = cmd_sweep(&config)?;
            let mut ok = true;
            for r in &records {
                let bad = r.violations(tolerance);
                if !bad.is_empty() {
                    ok = false;
                    eprintln!("alpha {}: out of bounds: {}", r.alpha, bad.join(", "));
                }
            }
            if let Some(path) = &config.out {
                eprintln!("wrote {} rows to {}", records.len(), path.display());
            }
            Ok(ok)
        }
        Command::Verify { tolerance, seed } => {
            let checks = run_verify(tolerance, seed)?;
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.passed()).count();
            eprintln!("{} checks, {failed} failed", checks.len());
            Ok(failed == 0)
        }
        Command::Params { alpha } => {
            print!("{}", params_report(parse_class(alpha)?));
            Ok(true)
        }
        Command::Channel { alpha, check, seed } => {
            let residuals = run_channel(parse_class(alpha)?, check, seed)?;
            print!("{}", channel_report(&residuals));
            Ok(residuals.iter().all(|r| r.passed()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
