//! `diffmod`: command-line front end.
//!
//! Exit codes: 0 on success or a computed verdict, 1 when a verdict fails
//! (not square-zero, a theorem violated, a precondition unmet), 2 on usage
//! and parse errors.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(
    name = "diffmod",
    version,
    about = "Exact computations with differential modules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print a human-readable table to stdout.
    #[arg(long, global = true)]
    pub summary: bool,
    /// Truncation degree for graded rings (defaults to a "cutoff" key in
    /// the input).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub cutoff: Option<i64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a matrix is square-zero and homogeneous.
    Check { input: Option<PathBuf> },
    /// Homology: dimensions, invariant factors or a truncated Hilbert table.
    Homology {
        input: Option<PathBuf>,
        /// Comma-separated annihilator candidates to verify.
        #[arg(long)]
        annihilator: Option<String>,
    },
    /// Decide contractibility, with a conjugator to standard form.
    Contractible { input: Option<PathBuf> },
    /// Best flag certificate found, giving a class upper bound.
    Flag { input: Option<PathBuf> },
    /// Conjugacy to `[[0, 1], [0, 0]]`.
    StandardForm { input: Option<PathBuf> },
    /// Pages of the flag spectral sequence and its convergence.
    Spectral {
        input: Option<PathBuf>,
        /// Flag certificate; the best one found is used otherwise.
        #[arg(long)]
        flag: Option<PathBuf>,
        /// Last page computed (default: enough to stabilize).
        #[arg(long)]
        r_max: Option<usize>,
    },
    /// Compressed Koszul complex on variables or elements.
    Koszul {
        #[arg(long)]
        ring: String,
        /// Comma-separated variable names.
        #[arg(long, conflicts_with = "elements")]
        vars: Option<String>,
        /// Comma-separated ring elements.
        #[arg(long)]
        elements: Option<String>,
    },
    /// Compression of a complex.
    Compress { input: Option<PathBuf> },
    /// Cone of a morphism `phi: D -> E`.
    Cone {
        #[arg(long)]
        map: PathBuf,
        source: PathBuf,
        target: PathBuf,
    },
    /// Tensor product of a complex with a differential module.
    Tensor { complex: PathBuf, module: PathBuf },
    /// Determinantal rank with a witness minor.
    Rank {
        input: Option<PathBuf>,
        /// Also check the height bound for a rank-one monomial matrix.
        #[arg(long)]
        height: bool,
    },
    /// Factor a rank-one matrix over Z or k[x] as column times row.
    Factor { input: Option<PathBuf> },
    /// Rank formulas, fold bounds, class and rank inequalities.
    Verify {
        input: Option<PathBuf>,
        #[arg(long)]
        class: bool,
        #[arg(long)]
        rank: bool,
        #[arg(long)]
        formulas: bool,
        #[arg(long)]
        folds: bool,
        #[arg(long)]
        flag: Option<PathBuf>,
        /// Comma-separated annihilator generators (verified first).
        #[arg(long)]
        annihilator: Option<String>,
    },
    /// Least rank with finite-length homology over F_p[x_1..x_n].
    Search {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Fold ranks for the largest size, e.g. 1,2,2,1.
        #[arg(long)]
        folds: Option<String>,
        /// Random instances per size instead of exhaustive enumeration
        /// (seeded by DIFFMOD_SEED).
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 8)]
        max_witnesses: usize,
    },
}

/// A report and how the process should exit.
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub code: u8,
}

/// Errors surfaced to the user with their exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<diffmod::Error> for Failure {
    fn from(e: diffmod::Error) -> Self {
        let code = match e {
            diffmod::Error::Parse(_) | diffmod::Error::CutoffMissing => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn emit(common: &Common, outcome: &Outcome) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&diffmod::json::sorted(&outcome.report))
        .expect("report serializes");
    if let Some(path) = &common.out {
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    } else if !common.summary {
        println!("{text}");
    }
    if common.summary {
        print!("{}", outcome.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli.command, &cli.common)
        .and_then(|o| emit(&cli.common, &o).map(|_| o.code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("diffmod: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
