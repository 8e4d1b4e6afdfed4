//! Argument model and command dispatch for the `orientcov` binary.

mod commands;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orientcov_core::rational::parse_rational;
use orientcov_core::Rational;

pub use table::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] orientcov_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "invalid_parameter",
            CliError::Io(_) | CliError::Csv(_) => "io",
        }
    }

    /// `{"error": kind, "message": text}` for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() })
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "orientcov",
    version,
    about = "Reachability correlations in randomly oriented random graphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Backend::Symbolic)]
    pub backend: Backend,
    /// Mantissa bits for the float backend and for transcendental terms.
    #[arg(long, global = true, default_value_t = 2560)]
    pub precision_bits: u32,
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant digits of decimal columns (decimal places for `pc`).
    #[arg(long, global = true)]
    pub digits: Option<usize>,
    /// Root bracket width; must be positive.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Grid resolution: `p = k / grid`, `k = 1..=grid`.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Also emit exact `a/b` columns next to the decimals.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Lift the size guards on symbolic and numeric computations.
    #[arg(long, global = true)]
    pub allow_large: bool,
    /// Permit runs measured in minutes to hours; reports progress on stderr.
    #[arg(long, global = true)]
    pub long_run: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Symbolic,
    Numeric,
    Float,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Gnp,
    Gnm,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    Annealed,
    Quenched,
}

/// `n` or `lo..hi` (inclusive).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad vertex count {t:?}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(NRange { lo, hi })
    }
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relative covariance of G(n,p) over a p-grid, with the (2p-1)/3 asymptote.
    Curve {
        #[arg(long, default_value = "8..30")]
        n: NRange,
        /// Explicit p values (overrides --grid).
        #[arg(long, value_delimiter = ',', value_parser = rational_arg)]
        p: Vec<Rational>,
    },
    /// Zeros of p -> cov(n, p): annealed, plus quenched where enumeration reaches.
    Zeros {
        #[arg(long, default_value = "4..8")]
        n: NRange,
        /// Skip the quenched rows.
        #[arg(long)]
        annealed_only: bool,
    },
    /// Exact split of the G(n,p) covariance by conditioning on the edge count.
    Decompose {
        #[arg(long, default_value = "10")]
        n: NRange,
        #[arg(long, value_delimiter = ',', value_parser = rational_arg)]
        p: Vec<Rational>,
    },
    /// Annealed and quenched curves for G(n,p), and quenched G(n,m) points.
    Quenched {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// The critical probability of the large-n sign change.
    Pc,
    /// h_n(m), k_n(m) and the G(n,m) covariance for every m.
    GnmTable {
        #[arg(long)]
        n: usize,
    },
    /// Probability that l fixed oriented edges are all absent from oriented G(n,m).
    QExact {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Monte-Carlo estimate for one (n, model).
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModelKind::Gnp)]
        model: ModelKind,
        #[arg(long, value_parser = rational_arg, required_if_eq("model", "gnp"), conflicts_with = "m")]
        p: Option<Rational>,
        #[arg(long, required_if_eq("model", "gnm"))]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = Regime::Annealed)]
        regime: Regime,
        /// Jackknife standard errors instead of the delta method (annealed only).
        #[arg(long)]
        jackknife: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = orientcov_core::sim::DEFAULT_STREAMS)]
    pub streams: usize,
}

/// Runs one command and returns its table without writing it.
pub fn run(cli: &Cli) -> Result<Table, CliError> {
    if let Some(tol) = cli.global.tol {
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {tol}"
            )));
        }
    }
    if cli.global.grid == Some(0) {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    commands::dispatch(&cli.global, &cli.command)
}

/// Writes `table` to `--out` or stdout in the requested format.
pub fn emit(global: &Global, table: &Table) -> Result<(), CliError> {
    let mut out: Box<dyn Write> = match &global.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match global.format {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => table.write_json(&mut out)?,
    }
    out.flush()?;
    Ok(())
}
