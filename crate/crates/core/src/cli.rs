//! The `linmetric` command line: typecheck, distances, wire listings and the
//! property suites. Exit status 1 is a user error, 2 a broken invariant.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dynamics::{beta_normalize, is_beta_normal};
use crate::int::{decompose, export_diagram};
use crate::registry::SymbolRegistry;
use crate::report::{
    admissibility_suite, decompose_suite, metric_report, ordering_suite, trace_suite, Budget, Engine, Metric, Report,
    SuiteReport,
};
use crate::syntax::{parse_env, parse_term, Env, Term};
use crate::typing::typecheck;

pub const SYMBOLS_VAR: &str = "LINMETRIC_SYMBOLS";

#[derive(Debug, Parser)]
#[command(name = "linmetric", version, about = "Distances between programs of a linear lambda calculus over the reals")]
pub struct Cli {
    /// Symbol registry (JSON); defaults to $LINMETRIC_SYMBOLS, then to the
    /// standard symbols add, sin, cos, min, max and c.
    #[arg(long, global = true)]
    pub symbols: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the type of a term.
    Typecheck {
        /// File holding one term, or `-` for stdin.
        file: PathBuf,
        /// Typing environment, e.g. "k:R -o I, x:R".
        #[arg(long, default_value = "")]
        env: String,
    },
    /// Bound the distance between two terms.
    Dist {
        m: PathBuf,
        n: PathBuf,
        #[arg(long, default_value = "")]
        env: String,
        #[arg(long, value_enum, default_value_t = MetricArg::All)]
        metric: MetricArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Contexts tried by the observational search and function probes in
        /// the denotational battery.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        json: bool,
    },
    /// List the int-terms on the output wires of a term.
    Wires {
        file: PathBuf,
        #[arg(long, default_value = "")]
        env: String,
        /// Also write the string diagram in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run a property suite over generated terms.
    Check {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Obs,
    Den,
    Int,
    Equ,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Admissibility,
    Ordering,
    Trace,
    Decompose,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("{0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::User(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

fn user(e: impl std::fmt::Display) -> CliError {
    CliError::User(e.to_string())
}

fn registry(path: Option<&Path>) -> Result<SymbolRegistry, CliError> {
    let from_var = std::env::var_os(SYMBOLS_VAR).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(from_var) {
        Some(p) => SymbolRegistry::load(&p).map_err(|e| user(format!("{}: {e}", p.display()))),
        None => Ok(SymbolRegistry::standard()),
    }
}

fn read_source(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| user(format!("{}: {e}", path.display())))
    }
}

fn read_term(path: &Path, reg: &SymbolRegistry) -> Result<Term, CliError> {
    parse_term(&read_source(path)?, reg).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn env_arg(text: &str) -> Result<Env, CliError> {
    parse_env(text).map_err(|e| user(format!("--env: {e}")))
}

fn print_report(out: &mut dyn Write, r: &Report) -> std::io::Result<()> {
    let m = &r.metrics;
    if let Some(o) = &m.obs {
        writeln!(out, "obs  >= {}  (context {}, n = {})", o.lo, o.witness.context, o.witness.n)?;
    }
    if let Some(d) = &m.den {
        writeln!(out, "den  [{}, {}]", d.lo, d.hi)?;
    }
    if let Some(i) = &m.int {
        let note = if i.normalized { "  (of the normal forms)" } else { "" };
        writeln!(out, "int  [{}, {}]{note}", i.lo, i.hi)?;
    }
    if let Some(e) = &m.equ {
        let note = if e.certificate.is_some() { "  (certified)" } else { "" };
        writeln!(out, "equ  <= {}{note}", e.hi)?;
    }
    match r.chain_ok {
        Some(true) => writeln!(out, "chain ok"),
        Some(false) => writeln!(out, "chain BROKEN: {}", r.violations.join("; ")),
        None => Ok(()),
    }
}

fn print_suite(out: &mut dyn Write, r: &SuiteReport) -> std::io::Result<()> {
    writeln!(out, "{}/{} {}", r.passed, r.total, r.name)?;
    for f in r.failures.iter().take(5) {
        writeln!(out, "  FAIL {f}")?;
    }
    Ok(())
}

/// Runs one command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let reg = registry(cli.symbols.as_deref())?;
    match cli.command {
        Command::Typecheck { file, env } => {
            let t = read_term(&file, &reg)?;
            let ty = typecheck(&env_arg(&env)?, &t, &reg).map_err(user)?;
            writeln!(out, "{ty}")?;
        }
        Command::Dist { m, n, env, metric, seed, budget, json } => {
            let env = env_arg(&env)?;
            let (tm, tn) = (read_term(&m, &reg)?, read_term(&n, &reg)?);
            let ty = typecheck(&env, &tm, &reg).map_err(user)?;
            let ty_n = typecheck(&env, &tn, &reg).map_err(user)?;
            if ty != ty_n {
                return Err(user(format!("the terms have different types: {ty} and {ty_n}")));
            }
            let which = match metric {
                MetricArg::Obs => vec![Metric::Obs],
                MetricArg::Den => vec![Metric::Den],
                MetricArg::Int => vec![Metric::Int],
                MetricArg::Equ => vec![Metric::Equ],
                MetricArg::All => vec![Metric::Obs, Metric::Den, Metric::Int, Metric::Equ],
            };
            let budget = Budget { seed, contexts: budget, probes: budget };
            let report = metric_report(&env, &ty, &tm, &tn, &which, budget, &reg).map_err(user)?;
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                print_report(out, &report)?;
            }
            if report.chain_ok == Some(false) {
                return Err(CliError::Invariant(format!("chain violated: {}", report.violations.join("; "))));
            }
        }
        Command::Wires { file, env, dot } => {
            let env = env_arg(&env)?;
            let mut t = read_term(&file, &reg)?;
            typecheck(&env, &t, &reg).map_err(user)?;
            if !is_beta_normal(&t) {
                t = beta_normalize(&t);
                writeln!(out, "note: the term is not beta-normal; showing the wires of {t}")?;
            }
            let d = decompose(&env, &t, &reg).map_err(user)?;
            writeln!(out, "{}", d.listing())?;
            if let Some(path) = dot {
                let text = export_diagram(&env, &t, &reg).map_err(user)?;
                std::fs::write(&path, text).map_err(|e| user(format!("{}: {e}", path.display())))?;
            }
        }
        Command::Check { suite, seed, count, budget } => {
            let budget = Budget { seed, contexts: budget, probes: budget };
            let reports = match suite {
                SuiteArg::Ordering => vec![ordering_suite(seed, count, budget, &reg)],
                SuiteArg::Trace => vec![trace_suite(seed, count, &reg)],
                SuiteArg::Decompose => vec![decompose_suite(seed, count, 50, &reg)],
                SuiteArg::Admissibility => [Engine::Den, Engine::Int, Engine::Equ]
                    .into_iter()
                    .flat_map(|e| admissibility_suite(e, seed, count, budget, &reg))
                    .collect(),
            };
            for r in &reports {
                print_suite(out, r)?;
            }
            let failed: Vec<&str> = reports.iter().filter(|r| !r.ok()).map(|r| r.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(CliError::Invariant(format!("failing properties: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/terms").join(name)
    }

    fn run_args(args: &[&str]) -> (Result<(), CliError>, String) {
        let cli = Cli::try_parse_from(std::iter::once("linmetric").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let r = run(cli, &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn typecheck_prints_the_type() {
        let (r, out) = run_args(&["typecheck", terms("ma.lin").to_str().unwrap()]);
        r.unwrap();
        assert_eq!(out.trim(), "R (x) R (x) ((R (x) R -o R) -o R)");
    }

    #[test]
    fn parse_errors_exit_with_one() {
        let dir = std::env::temp_dir().join("linmetric-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let empty = dir.join("empty.lin");
        std::fs::write(&empty, "").unwrap();
        let (r, _) = run_args(&["typecheck", empty.to_str().unwrap()]);
        assert_eq!(r.unwrap_err().exit_code(), 1);
        let dup = dir.join("dup.lin");
        std::fs::write(&dup, "\\x:R. add(x, x)").unwrap();
        let (r, _) = run_args(&["typecheck", dup.to_str().unwrap()]);
        assert_eq!(r.unwrap_err().exit_code(), 1);
    }

    #[test]
    fn wires_of_a_constant() {
        let (r, out) = run_args(&["wires", terms("const3.lin").to_str().unwrap()]);
        r.unwrap();
        assert_eq!(out.trim(), "H1=3");
    }
}
