//! Command-line front end for `hopx`.
//!
//! `gen` writes seeded instances, `solve` runs the fixed-point or bisection
//! solver and writes per-iteration traces, and `check` runs property suites.
//! Exit codes: 0 success, 1 usage or parse error, 2 iteration cap reached,
//! 3 property violation.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod error;
pub mod generate;
pub mod instance;
pub mod solve;
pub mod trace;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "hopx",
    version,
    about = "High-order proximal operators from classical prox steps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Solve an instance and optionally write its trace.
    Solve(SolveArgs),
    /// Run a property suite on seeded instances.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: instance::Kind,
    #[arg(long)]
    n: usize,
    /// Log-sum-exp terms for quadratic instances [default: 2n].
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Output file [default: stdout].
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = solve::Method::Fixedpoint)]
    method: solve::Method,
    /// Relative stopping tolerance [default: 1e-10, bisect 1e-14].
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap [default: 1000, bisect 200].
    #[arg(long)]
    max_iters: Option<usize>,
    /// auto, zero or file:<path>.
    #[arg(long, default_value = "auto")]
    lambda0: solve::Lambda0Arg,
    /// Trace CSV; sweeps insert `.p<p>` before the extension.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Comma-separated values of p overriding the instance's.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Record wall-clock time in the elapsed_ms column.
    #[arg(long)]
    timing: bool,
    /// Write every dual and primal iterate as CSV.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(value_enum)]
    property: check::Property,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Number of seeded instances.
    #[arg(long, default_value_t = 5)]
    cases: usize,
    /// Random pairs per instance (lemma51 and duality).
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value = "hopx-counterexample.txt")]
    counterexample: PathBuf,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit::USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<u8, CliError> {
    let w = |out: &mut dyn Write, line: &str| -> Result<(), CliError> {
        writeln!(out, "{line}").map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
    };
    match command {
        Command::Gen(a) => {
            let inst = generate::generate(&generate::GenSpec {
                kind: a.kind,
                n: a.n,
                m: a.m.unwrap_or(2 * a.n),
                seed: a.seed,
                p: a.p,
                sigma: a.sigma,
            })?;
            match a.out {
                Some(path) => inst.write(&path)?,
                None => out
                    .write_all(inst.to_text().as_bytes())
                    .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))?,
            }
            Ok(exit::OK)
        }
        Command::Solve(a) => {
            let inst = instance::Instance::read(&a.instance)?;
            let opts = solve::SolveOptions {
                method: a.method,
                tol: a.tol,
                max_iters: a.max_iters,
                lambda0: a.lambda0,
                trace: a.trace,
                ps: a.p,
                sigma: a.sigma,
                timing: a.timing,
                dump: a.dump,
            };
            let runs = solve::solve_instance(&inst, &opts)?;
            for r in &runs {
                w(out, &r.line(a.method))?;
            }
            Ok(if runs.iter().all(|r| r.report.converged) {
                exit::OK
            } else {
                exit::ITERATION_CAP
            })
        }
        Command::Check(a) => {
            let opts = check::CheckOptions {
                seed: a.seed,
                n: a.n,
                cases: a.cases,
                pairs: a.pairs,
                counterexample: a.counterexample,
            };
            let outcome = check::run_check(a.property, &opts)?;
            for line in &outcome.assertions {
                w(out, &line.line)?;
            }
            if let Some(text) = outcome.counterexample_text() {
                std::fs::write(&opts.counterexample, text).map_err(|e| CliError::io(&opts.counterexample, e))?;
                w(out, &format!("counterexample={}", opts.counterexample.display()))?;
            }
            Ok(if outcome.passed() { exit::OK } else { exit::VIOLATION })
        }
    }
}
