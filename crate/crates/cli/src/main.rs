//! `gsp4`: scriptable front end to the library. JSON reports carry a `schema` field;
//! tables default to TSV.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration error,
//! 3 scale refusal.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gsp4::Error;

pub use config::FileConfig;

pub const DEFAULT_SEED: u64 = 20_240_501;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
    Scale(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Scale(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Failed(_) => "verification-failure",
            CliError::Usage(_) => "usage",
            CliError::Scale(_) => "scale-refused",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failed(m) | CliError::Scale(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ScaleRefused(_) => CliError::Scale(e.to_string()),
            Error::CounterexampleFound(_) => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Parser)]
#[command(name = "gsp4", version, about = "Exact GSp(4) combinatorics: tables, Hecke checks, Kostant weights, boundary summands and slope polygons")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format (tables default to TSV, everything else to JSON).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strata and degree tables for a parabolic Q.
    Tables {
        #[arg(long)]
        q: Option<String>,
    },
    /// Exhaustive verification reports.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[command(flatten)]
        level: LevelArgs,
        /// Weight `a1,a2,b` for the kernel check.
        #[arg(long)]
        weight: Option<String>,
        /// Torus element `a1,a2,b` for the spherical count (default: the contracting element).
        #[arg(long)]
        element: Option<String>,
        /// Point budget for exhaustive enumeration.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Hodge and Newton polygons with the filtration verdict.
    Polygon {
        /// `a,b,c`; repeat for several embeddings above the place.
        #[arg(long)]
        weight: Vec<String>,
        #[arg(long)]
        q: Option<String>,
        /// `e,f`.
        #[arg(long)]
        field: Option<String>,
        /// `v(T),v(qR)` valuations; use `_` for an unknown entry.
        #[arg(long = "hecke-vals")]
        hecke_vals: Option<String>,
    },
    /// Kostant weights for a parabolic radical or a boundary stratum.
    Kostant {
        /// `a,b`.
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        q: Option<String>,
        /// `Sigma,w` selects the stratum of the boundary of `Q` instead of the radical.
        #[arg(long)]
        stratum: Option<String>,
    },
    /// Graded summands of the ordinary boundary cohomology over Q.
    Boundary {
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        degree: Option<u32>,
        /// `gamma0` or `gamma1`.
        #[arg(long)]
        level: Option<String>,
        /// `a,b`.
        #[arg(long)]
        weight: Option<String>,
    },
    /// Hecke polynomial at p for given eigenvalues.
    Charpoly {
        #[arg(long = "T", allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long = "R", allow_hyphen_values = true)]
        r: Option<String>,
        #[arg(long = "S", allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
    },
    /// Rank of the Hida–Iwasawa algebra.
    HidaRank {
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        delta: Option<u32>,
        /// Parabolic per place, e.g. `B` or `B,P,P*`.
        #[arg(long)]
        types: Option<String>,
        /// Local degree per place (default: `d` for one place, else 1 each).
        #[arg(long)]
        degrees: Option<String>,
    },
    /// Bruhat factorization certificates.
    Bruhat {
        /// `x1,x2,x3,x4` rationals parametrizing the upper unipotent.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long)]
        w: Option<String>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        precision: Option<u32>,
        /// Run a seeded sweep of this many random inputs instead.
        #[arg(long)]
        random: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Contract,
    Hecke,
    Kernel,
    Spherical,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub q: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((err, report)) => {
            if let Some(r) = report {
                print!("{r}");
            }
            let payload = serde_json::json!({
                "schema": "gsp4.error.v1",
                "error": err.kind(),
                "message": err.message(),
            });
            eprintln!("{payload}");
            ExitCode::from(err.code())
        }
    }
}
