//! Command-line front end: coefficient tables, quantum values, scans and
//! the verification pipeline. Machine output goes to stdout only; logs go
//! to stderr.

pub mod report;

use std::io::Write;

use clap::{ArgAction, ArgGroup, Parser, Subcommand, ValueEnum};
use log::{debug, warn};
use mnn22_core::quantum::{bell_value_closed, DEFAULT_Q0_TOL};
use mnn22_core::{
    chsh, evaluate, i_nn22, m_nn22, optimize_q0, reduced_chsh, sub_embedding, BellFunctional, Error,
    PairLabel, QuantumConstruction,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{to_json_lines, verify, ClaimGroup};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CLAIM_FAILED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_GUARD: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "MNN22_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(Error::Guard(_)) => EXIT_GUARD,
            CliError::Core(
                Error::Domain(_) | Error::Shape(_) | Error::IndexOutOfRange { .. } | Error::Parse { .. },
            ) => EXIT_USAGE,
            CliError::Core(_) => EXIT_SOFTWARE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mnn22", version, about = "Bell inequality toolkit for the M_nn22 family")]
pub struct Cli {
    /// Log verbosity on stderr (-v info, -vv debug, -vvv trace)
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Chsh,
    Innn22,
    Mnn22,
    Reduced,
    Embedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `lo:hi:steps`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl ScanRange {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

fn parse_scan(s: &str) -> Result<ScanRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err("expected lo:hi:steps".into());
    };
    let lo: f64 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    let steps: usize = steps.trim().parse().map_err(|e| format!("steps: {e}"))?;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(format!("need 0 <= lo <= hi <= 1, got {lo}:{hi}"));
    }
    if steps == 0 {
        return Err("steps must be at least 1".into());
    }
    Ok(ScanRange { lo, hi, steps })
}

fn parse_n_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let a: usize = a.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("hi: {e}"))?;
    if a < 2 || a > b {
        return Err(format!("need 2 <= lo <= hi, got {a}:{b}"));
    }
    Ok((a, b))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the coefficient table of a generated inequality
    Ineq {
        #[arg(value_enum)]
        family: Family,
        /// Settings per party
        #[arg(long)]
        n: Option<usize>,
        /// Bob pair `s,t` for the reduced family
        #[arg(long)]
        pair: Option<PairLabel>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Closed-form and Born-rule values of the quantum construction
    #[command(group(ArgGroup::new("mode").required(true).args(["q0", "optimize", "scan"])))]
    Quantum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q0: Option<f64>,
        /// Maximize the closed-form value over q0
        #[arg(long)]
        optimize: bool,
        /// Evenly spaced q0 values `lo:hi:steps`
        #[arg(long, value_parser = parse_scan)]
        scan: Option<ScanRange>,
        /// Print the behavior table for `--q0` instead of values
        #[arg(long, requires = "q0")]
        behavior: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check the bound claims for one n; exit 0 iff every claim passes
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ClaimGroup::All)]
        claims: ClaimGroup,
        /// Replace every per-claim tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Include wall-clock runtime_ms in each report
        #[arg(long)]
        timing: bool,
    },
    /// CSV of (n, q0*, violation*) over a range of n
    ScanTable {
        #[arg(long, value_parser = parse_n_range, default_value = "2:8")]
        n_range: (usize, usize),
    },
}

#[derive(Debug, Serialize)]
struct QuantumPoint {
    q0: f64,
    value_closed: f64,
    value_direct: f64,
}

#[derive(Debug, Serialize)]
struct QuantumOptimum {
    q0: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct QuantumDoc {
    n: usize,
    points: Vec<QuantumPoint>,
    optimum: Option<QuantumOptimum>,
}

#[derive(Debug, Serialize)]
struct EmbeddingDoc {
    functional: BellFunctional,
    alice_keep: Vec<usize>,
    bob_keep: Vec<usize>,
    lifted: BellFunctional,
}

/// Configures the global rayon pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    if threads == 0 {
        return Err(CliError::Usage(format!("{THREADS_ENV} must be at least 1")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    debug!("using {threads} worker threads");
    Ok(())
}

fn require_n(n: Option<usize>, family: &str) -> Result<usize, CliError> {
    n.ok_or_else(|| CliError::Usage(format!("{family} needs --n")))
}

fn emit(out: &mut dyn Write, f: &BellFunctional, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => writeln!(out, "{}", f.to_json())?,
        Format::Csv => write!(out, "{}", f.to_csv())?,
    }
    Ok(())
}

fn quantum_point(n: usize, q0: f64) -> Result<QuantumPoint, Error> {
    let f = m_nn22(n)?;
    let c = QuantumConstruction::build(n, q0)?;
    Ok(QuantumPoint {
        q0,
        value_closed: bell_value_closed(n, q0),
        value_direct: evaluate(&f, &c.behavior())?,
    })
}

/// Executes one command, writing machine output to `out`, and returns the
/// process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Ineq { family, n, pair, format } => {
            match family {
                Family::Chsh => emit(out, &chsh(), *format)?,
                Family::Mnn22 => emit(out, &m_nn22(require_n(*n, "mnn22")?)?, *format)?,
                Family::Innn22 => emit(out, &i_nn22(require_n(*n, "innn22")?)?, *format)?,
                Family::Reduced => {
                    let n = require_n(*n, "reduced")?;
                    let pair = pair.ok_or_else(|| CliError::Usage("reduced needs --pair s,t".into()))?;
                    emit(out, &reduced_chsh(n, pair)?, *format)?;
                }
                Family::Embedding => {
                    let e = sub_embedding(require_n(*n, "embedding")?)?;
                    let lifted = e.lifted()?;
                    match format {
                        Format::Csv => emit(out, &lifted, Format::Csv)?,
                        Format::Json => {
                            let doc = EmbeddingDoc {
                                alice_keep: e.alice_keep.iter().map(|i| i + 1).collect(),
                                bob_keep: e.bob_keep.iter().map(|i| i + 1).collect(),
                                functional: e.functional,
                                lifted,
                            };
                            writeln!(out, "{}", serde_json::to_string(&doc).expect("document serializes"))?;
                        }
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Quantum { n, q0, optimize, scan, behavior, format } => {
            let n = *n;
            if *behavior {
                let q0 = q0.expect("clap enforces --q0");
                let t = QuantumConstruction::build(n, q0)?.behavior();
                match format {
                    Format::Json => writeln!(out, "{}", t.to_json())?,
                    Format::Csv => write!(out, "{}", t.to_csv())?,
                }
                return Ok(EXIT_OK);
            }
            if *format == Format::Csv {
                return Err(CliError::Usage("value output is JSON only; csv applies to --behavior".into()));
            }
            let mut q0s: Vec<f64> = Vec::new();
            if let Some(q) = q0 {
                q0s.push(*q);
            }
            if let Some(range) = scan {
                q0s.extend(range.points());
            }
            let optimum = if *optimize {
                let o = optimize_q0(n, DEFAULT_Q0_TOL)?;
                q0s.push(o.q0);
                Some(QuantumOptimum { q0: o.q0, value: o.value })
            } else {
                None
            };
            let points = q0s
                .par_iter()
                .map(|&q| quantum_point(n, q))
                .collect::<Result<Vec<_>, Error>>()?;
            let doc = QuantumDoc { n, points, optimum };
            writeln!(out, "{}", serde_json::to_string(&doc).expect("document serializes"))?;
            Ok(EXIT_OK)
        }
        Command::Verify { n, claims, tol, timing } => {
            if let Some(t) = tol {
                if !(t.is_finite() && *t >= 0.0) {
                    return Err(CliError::Usage(format!("--tol must be a non-negative number, got {t}")));
                }
            }
            let reports = verify(*n, *claims, *tol, *timing)?;
            write!(out, "{}", to_json_lines(&reports))?;
            let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.claim.as_str()).collect();
            if failed.is_empty() {
                Ok(EXIT_OK)
            } else {
                warn!("{} of {} claims failed: {}", failed.len(), reports.len(), failed.join(", "));
                Ok(EXIT_CLAIM_FAILED)
            }
        }
        Command::ScanTable { n_range } => {
            let (lo, hi) = *n_range;
            let rows = (lo..=hi)
                .into_par_iter()
                .map(|n| optimize_q0(n, DEFAULT_Q0_TOL).map(|o| (n, o)))
                .collect::<Result<Vec<_>, Error>>()?;
            writeln!(out, "n,q0_star,violation_star")?;
            for (n, o) in rows {
                writeln!(out, "{n},{},{}", o.q0, o.value)?;
            }
            Ok(EXIT_OK)
        }
    }
}
