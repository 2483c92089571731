//! `riccati` — solve, detect and verify quadrature-integrable Riccati
//! equations from JSON problem files.

mod commands;
mod format;
mod problem;

use clap::{Parser, Subcommand};
use commands::VerifyThresholds;
use problem::ToleranceOverrides;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "riccati",
    version,
    about = "Closed-form Riccati solver with an independent numerical oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write the trajectory as CSV
    Solve {
        /// Problem file (JSON)
        #[arg(long)]
        input: PathBuf,
        /// Output CSV path; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
        /// Quadrature tolerance override
        #[arg(long)]
        tol: Option<f64>,
        /// Integrator relative tolerance override
        #[arg(long = "rel-tol")]
        rel_tol: Option<f64>,
        /// Integrator absolute tolerance override
        #[arg(long = "abs-tol")]
        abs_tol: Option<f64>,
        /// Family-detection tolerance for explicit problems
        #[arg(long = "detect-tol", default_value_t = 1e-6)]
        detect_tol: f64,
        /// Radius of the excluded neighborhood around each pole
        #[arg(long = "pole-radius", default_value_t = riccati_core::POLE_EXCLUSION_RADIUS)]
        pole_radius: f64,
    },
    /// Detect whether explicit coefficients form an integrable family
    Detect {
        #[arg(long)]
        input: PathBuf,
        /// Quadrature tolerance override
        #[arg(long)]
        tol: Option<f64>,
        /// Family-detection tolerance
        #[arg(long = "detect-tol", default_value_t = 1e-6)]
        detect_tol: f64,
    },
    /// Verify a closed-form solution against the numerical oracle
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Quadrature tolerance override
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long = "rel-tol")]
        rel_tol: Option<f64>,
        #[arg(long = "abs-tol")]
        abs_tol: Option<f64>,
        #[arg(long = "detect-tol", default_value_t = 1e-6)]
        detect_tol: f64,
        #[arg(long = "pole-radius", default_value_t = riccati_core::POLE_EXCLUSION_RADIUS)]
        pole_radius: f64,
        /// Largest acceptable normalized residual
        #[arg(long = "residual-threshold", default_value_t = 1e-6)]
        residual_threshold: f64,
        /// Largest acceptable deviation from the numerical oracle
        #[arg(long = "compare-threshold", default_value_t = 1e-6)]
        compare_threshold: f64,
        /// Largest acceptable deviation from the printed formula
        #[arg(long = "crosscheck-threshold", default_value_t = 1e-8)]
        crosscheck_threshold: f64,
    },
    /// Check functional commutativity of a 2x2 matrix function
    #[command(name = "commute-check")]
    CommuteCheck {
        /// Matrix file (JSON): {"a11", "a12", "c1", "c2"} or {"entries": [4 exprs]}
        #[arg(long)]
        input: PathBuf,
        /// Number of sample points, spread uniformly over [0, 1]
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            input,
            output,
            tol,
            rel_tol,
            abs_tol,
            detect_tol,
            pole_radius,
        } => commands::cmd_solve(
            &input,
            output.as_ref(),
            ToleranceOverrides {
                quad: tol,
                rel_tol,
                abs_tol,
            },
            detect_tol,
            pole_radius,
        ),
        Command::Detect {
            input,
            tol,
            detect_tol,
        } => commands::cmd_detect(
            &input,
            ToleranceOverrides {
                quad: tol,
                ..Default::default()
            },
            detect_tol,
        ),
        Command::Verify {
            input,
            tol,
            rel_tol,
            abs_tol,
            detect_tol,
            pole_radius,
            residual_threshold,
            compare_threshold,
            crosscheck_threshold,
        } => commands::cmd_verify(
            &input,
            ToleranceOverrides {
                quad: tol,
                rel_tol,
                abs_tol,
            },
            detect_tol,
            pole_radius,
            &VerifyThresholds {
                residual: residual_threshold,
                compare: compare_threshold,
                crosscheck: crosscheck_threshold,
            },
        ),
        Command::CommuteCheck { input, samples } => commands::cmd_commute_check(&input, samples),
    };
    ExitCode::from(code)
}
