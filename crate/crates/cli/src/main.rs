//! `distrode` command-line front end.

mod beam;
mod check_reg;
mod fail;
mod report;
mod solve;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use distrode::exec::{configure_threads, ExecMode};
use distrode::ode::Tolerances;
use distrode::solver::SolveOptions;

use crate::fail::CliError;
use crate::report::{write_json, RunReport};

#[derive(Parser, Debug)]
#[command(name = "distrode", version, about = "Linear ODEs with distributional coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Relative tolerance of the ODE integrator
    #[arg(long, default_value_t = Tolerances::default().rtol)]
    rtol: f64,
    /// Absolute tolerance of the ODE integrator
    #[arg(long, default_value_t = Tolerances::default().atol)]
    atol: f64,
}

impl Common {
    fn opts(&self) -> Result<SolveOptions, CliError> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(CliError::validation("--rtol and --atol must be positive"));
        }
        Ok(SolveOptions {
            tol: Tolerances {
                rtol: self.rtol,
                atol: self.atol,
            },
            ..SolveOptions::default()
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem file; writes solution.csv, delta.json, report.json
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Number of uniform sample points (singular points are added)
        #[arg(long, default_value_t = 201)]
        mesh: usize,
        /// Largest accepted relative residual
        #[arg(long, default_value_t = 1e-7)]
        residual_tol: f64,
    },
    /// Solve a cracked clamped beam; writes curves.csv, constants.json, report.json
    Beam {
        beam: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Number of curve points over [-L, L]
        #[arg(long, default_value_t = 1001)]
        mesh: usize,
        #[arg(long, default_value_t = 1e-7)]
        residual_tol: f64,
    },
    /// Weak residuals of regularized products; writes convergence.csv, report.json
    CheckReg {
        /// Pair file, or a problem file whose coefficients are checked
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// `lo..hi` for widths 2^-lo..2^-hi, or a comma-separated list
        #[arg(long, default_value = "3..10")]
        schedule: String,
        /// Largest accepted final residual
        #[arg(long, default_value_t = 1e-3)]
        final_tol: f64,
    },
}

fn threads_from_env() {
    if let Ok(v) = std::env::var("DISTRODE_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                configure_threads(n);
            }
            _ => eprintln!("warning: ignoring DISTRODE_THREADS={v:?}"),
        }
    }
}

/// Minimal report for runs that stop before producing results.
fn failure_report(command: &'static str, out: &Path, input: &Path, err: &CliError) {
    let digest = std::fs::read(input).ok().map(|b| report::InputDigest::of(input, &b));
    let report = RunReport {
        command,
        input: digest,
        body: serde_json::Map::new(),
        outputs: vec!["report.json".into()],
        exit_code: err.code,
        message: Some(err.message.clone()),
    };
    if report::prepare_out(out).is_ok() {
        let _ = write_json(out, "report.json", &report);
    }
}

fn run(cli: Cli) -> (i32, Option<String>) {
    let (name, out, input, result) = match cli.command {
        Command::Solve {
            problem,
            common,
            mesh,
            residual_tol,
        } => {
            let r = common.opts().and_then(|opts| {
                solve::cmd_solve(
                    &problem,
                    &common.out,
                    solve::SolveArgs {
                        mesh,
                        opts,
                        residual_tol,
                    },
                )
            });
            ("solve", common.out, problem, r)
        }
        Command::Beam {
            beam,
            common,
            mesh,
            residual_tol,
        } => {
            let r = common.opts().and_then(|opts| {
                beam::cmd_beam(
                    &beam,
                    &common.out,
                    beam::BeamArgs {
                        npoints: mesh,
                        opts,
                        residual_tol,
                    },
                )
            });
            ("beam", common.out, beam, r)
        }
        Command::CheckReg {
            input,
            common,
            schedule,
            final_tol,
        } => {
            let r = common.opts().and_then(|opts| {
                let args = check_reg::CheckArgs {
                    schedule: check_reg::parse_schedule(&schedule)?,
                    final_tol,
                    opts: SolveOptions {
                        mode: ExecMode::Sequential,
                        ..opts
                    },
                };
                check_reg::cmd_check_regularization(&input, &common.out, &args)
            });
            ("check-reg", common.out, input, r)
        }
    };
    match result {
        Ok(code) => (code, None),
        Err(e) => {
            failure_report(name, &out, &input, &e);
            (e.code, Some(e.message))
        }
    }
}

fn main() -> ExitCode {
    threads_from_env();
    let (code, message) = run(Cli::parse());
    if let Some(m) = message {
        eprintln!("error: {m}");
    }
    ExitCode::from(code as u8)
}
