//! Command dispatch for the `hsdipm` binary.
//!
//! Exit codes: 0 optimal or all checks passed, 1 verification failure,
//! 2 primal-infeasible, 3 dual-infeasible, 4 ill-posed, 5 iteration limit,
//! 64 usage, 65 unreadable or invalid input, 70 internal numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use hsdipm::io::{outcome_json, parse_problem, write_trace};
use hsdipm::solver::SolverParams;
use hsdipm::verify::{report_text, run_suite, Suite, VerifyConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use hsdipm::{solve, Error, Preset, Status};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Debug, Parser)]
#[command(
    name = "hsdipm",
    version,
    about = "Predictor-corrector interior-point solver for conic problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file and print the result as JSON.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        preset: u8,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Largest predictor step keeping the iterate in the wide neighborhood.
        #[arg(long)]
        line_search: bool,
        /// Write a per-step CSV trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Run the numerical verification suites.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the line-delimited report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse::<Suite>().map_err(|e| e.to_string())
}

/// Exit code for a solver status.
pub fn status_code(status: Status) -> u8 {
    match status {
        Status::Optimal => 0,
        Status::PrimalInfeasible => 2,
        Status::DualInfeasible => 3,
        Status::IllPosed => 4,
        Status::IterationLimit => 5,
    }
}

/// Exit code for a library error.
pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::Configuration(_) => EXIT_DATA,
        Error::Parameter(_) => EXIT_USAGE,
        Error::InteriorViolation(_)
        | Error::Conditioning { .. }
        | Error::NoConvergence { .. }
        | Error::DegeneratePoint { .. }
        | Error::InvariantViolation(_) => EXIT_INTERNAL,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve {
            problem,
            preset,
            eps,
            line_search,
            trace,
            max_iters,
        } => cmd_solve(&problem, preset, eps, line_search, trace, max_iters, out),
        Command::Verify {
            suite,
            samples,
            seed,
            report,
        } => cmd_verify(suite, VerifyConfig { samples, seed }, report, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn cmd_solve(
    problem: &std::path::Path,
    preset: u8,
    eps: f64,
    line_search: bool,
    trace: Option<PathBuf>,
    max_iters: Option<usize>,
    out: &mut dyn Write,
) -> hsdipm::Result<u8> {
    let p = parse_problem(problem)?;
    let params = SolverParams {
        eps,
        line_search,
        max_iters,
        ..SolverParams::with_preset(Preset::from_id(preset)?)
    };
    let outcome = solve(&p, &params)?;
    if let Some(path) = trace {
        write_trace(&path, &outcome.trace)?;
    }
    let text = serde_json::to_string_pretty(&outcome_json(&outcome)).expect("finite JSON values");
    writeln!(out, "{text}").map_err(io_error)?;
    Ok(status_code(outcome.status))
}

fn cmd_verify(
    suite: Suite,
    cfg: VerifyConfig,
    report: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> hsdipm::Result<u8> {
    let reports = run_suite(suite, &cfg)?;
    let text = report_text(&reports);
    if let Some(path) = report {
        std::fs::write(&path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    write!(out, "{text}").map_err(io_error)?;
    for r in reports.iter().filter(|r| r.pass && r.id.ends_with(".violation")) {
        writeln!(
            out,
            "violation reproduced: {} lhs={:.6e} > rhs={:.6e} (margin {:.6e})",
            r.instance,
            r.lhs,
            r.rhs,
            r.margin()
        )
        .map_err(io_error)?;
    }
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}[{}]", r.id, r.instance))
        .collect();
    let passed = reports.len() - failing.len();
    writeln!(out, "{passed}/{} checks passed", reports.len()).map_err(io_error)?;
    if failing.is_empty() {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "failing checks: {}", failing.join(" ")).map_err(io_error)?;
        Ok(EXIT_CHECK_FAILED)
    }
}
