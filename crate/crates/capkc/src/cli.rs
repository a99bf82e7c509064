//! Command-line interface.
//!
//! Exit codes: 0 success, 1 invalid input, 2 infeasible instance,
//! 3 internal verification failure.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use capkc_core::oracle::{exact_opt, generate, GenKind, GenParams};
use capkc_core::rational::{format as fmt_q, parse as parse_q};
use capkc_core::{solve, Error, MetricInstance, SearchMode, Solution, SolveOptions, Variant};

use crate::bench;
use crate::format::{parse_instance, serialize_instance};
use crate::json::{oracle_to_json, solution_from_json, solution_to_json};
use crate::verify::{verify_solution, VerifyError};

pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "capkc", version, about = "Capacitated k-center LP-rounding solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance (stdin when FILE is omitted or "-").
    Solve {
        file: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        variant: Variant,
        /// JSON output (the default).
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Human-readable summary instead of JSON.
        #[arg(long)]
        text: bool,
        /// Check every candidate threshold instead of binary search.
        #[arg(long)]
        scan: bool,
        /// Experimental: binary threshold search for the budget variant.
        #[arg(long)]
        budget_binary: bool,
        /// Include per-stage opening vectors and parcel logs.
        #[arg(long)]
        trace: bool,
    },
    /// Exact optimum by enumeration (small instances only).
    Oracle {
        file: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        variant: Variant,
    },
    /// Generate a seeded instance in CAPKC format.
    Gen {
        kind: GenKind,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Center count; drawn from the seed when omitted.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inter-group distance for gap2x3.
        #[arg(long = "C", value_parser = parse_rational_arg)]
        c: Option<capkc_core::Rational>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-validate a solution against its instance; exit 0 iff valid.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Solve every *.capkc file of a directory and compare with the oracle.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Largest n on which the oracle runs.
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// JSON report instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn parse_rational_arg(s: &str) -> Result<capkc_core::Rational, String> {
    parse_q(s).ok_or_else(|| format!("{s:?} is not a rational"))
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_internal() {
            EXIT_INTERNAL
        } else if matches!(e, Error::GloballyInfeasible | Error::BudgetInfeasible | Error::Infeasible) {
            EXIT_INFEASIBLE
        } else {
            EXIT_INVALID
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_input(file: Option<&Path>) -> Result<String, Failure> {
    match file {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::invalid(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Failure::invalid(format!("stdin: {e}")))?;
    Ok(s)
}

fn load_instance(file: Option<&Path>) -> Result<MetricInstance, Failure> {
    let text = read_input(file)?;
    parse_instance(&text).map_err(|e| Failure::invalid(e.to_string()))
}

/// Human summary of a solution.
pub fn solution_text(sol: &Solution) -> String {
    let mut out = format!(
        "variant {}\ntau_star {}\nmetric_radius {} (hop {}; bound {} x tau_star)\nopens {:?}\ncomponents {}\ncertified {}\n",
        sol.variant,
        fmt_q(&sol.tau_star),
        fmt_q(&sol.metric_radius),
        sol.hop_radius,
        sol.ratio_bound,
        sol.opens,
        sol.components.len(),
        sol.certified
    );
    if let (Some(c), Some(b)) = (&sol.cost, &sol.budget) {
        out.push_str(&format!("cost {} of budget {}\n", fmt_q(c), fmt_q(b)));
    }
    out
}

/// Runs a parsed command, writing its normal output to `out`.
pub fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let emit = |out: &mut dyn Write, s: &str| {
        out.write_all(s.as_bytes())
            .and_then(|()| if s.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
            .map_err(|e| Failure::invalid(format!("write: {e}")))
    };
    match cmd {
        Command::Solve {
            file,
            variant,
            text,
            scan,
            budget_binary,
            trace,
            ..
        } => {
            let inst = load_instance(file.as_deref())?;
            let opts = SolveOptions {
                variant,
                search: if scan { SearchMode::Scan } else { SearchMode::Binary },
                budget_binary,
                trace,
                ..Default::default()
            };
            let sol = solve(&inst, &opts)?;
            emit(out, &if text { solution_text(&sol) } else { solution_to_json(&sol) })
        }
        Command::Oracle { file, variant } => {
            let inst = load_instance(file.as_deref())?;
            emit(out, &oracle_to_json(&exact_opt(&inst, variant)?))
        }
        Command::Gen {
            kind,
            n,
            k,
            seed,
            c,
            output,
        } => {
            let inst = generate(kind, &GenParams { n, k, seed, c })?;
            let text = serialize_instance(&inst);
            match output {
                Some(path) => fs::write(&path, text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display()))),
                None => emit(out, &text),
            }
        }
        Command::Verify { instance, solution } => {
            let inst = load_instance(Some(&instance))?;
            let text = read_input(Some(&solution))?;
            let sol = solution_from_json(&text).map_err(|e| Failure::invalid(e.to_string()))?;
            match verify_solution(&inst, &sol) {
                Ok(()) => emit(out, "valid"),
                Err(VerifyError::Invalid(m)) => Err(Failure::invalid(format!("invalid solution: {m}"))),
                Err(VerifyError::Core(e)) => Err(e.into()),
            }
        }
        Command::Bench { dir, max_n, jobs, json } => {
            let report = bench::run(&dir, max_n, jobs).map_err(|e| Failure::invalid(format!("{}: {e}", dir.display())))?;
            emit(out, &if json { report.to_json() } else { report.to_text() })
        }
    }
}

/// Entry point: parses `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli.command, &mut lock) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
