//! `cooc`: batch front end for the exact co-occurrence probability engine.
//!
//! Loads a JSON model file, runs queries against it, and prints exact
//! rationals (`p/q`). Decimals are opt-in display renderings. Exit codes:
//! 0 success, 2 load/reference errors, 3 query-domain errors, 4 semantic
//! findings with a witness (ambiguous mechanisms, missing densities).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cooc", version, about = "exact engine for finite co-occurrence probability")]
struct Cli {
    /// Path to the JSON model file.
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Additionally render scalar results as decimals with this many digits.
    #[arg(long, global = true)]
    decimal: Option<u32>,

    /// Machine-readable JSON output where supported.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability of co-occurrence of the query's targets, optionally
    /// conditioned.
    Prob {
        /// Named query from the model file, or inline query JSON.
        #[arg(long)]
        query: String,
    },
    /// Conditional kernel of a subject given a conditioning object.
    Kernel {
        #[arg(long)]
        query: String,
    },
    /// Density of a joint law with respect to a product base.
    Density {
        #[arg(long)]
        query: String,
    },
    /// E-integral of a variable, unconditional, event-conditioned, or as a
    /// function of a conditioning object.
    Eint {
        #[arg(long)]
        query: String,
    },
    /// Conditional independence: a single pattern, or an exhaustive
    /// object-versus-object sweep.
    Ci {
        #[arg(long)]
        query: String,
    },
    /// Structural model operations: solve or compute the observational
    /// distribution, optionally after interventions.
    Scm {
        /// Model name within the file.
        #[arg(long)]
        name: String,
        /// Interventions `index=value`, applied in order before the action.
        #[arg(long = "do", value_name = "INDEX=VALUE")]
        interventions: Vec<String>,
        /// `solve` or `dist`.
        action: String,
    },
    /// Run the law suite against the model plus randomized models.
    Check {
        /// Comma-separated law ids to run (default: all).
        #[arg(long)]
        theorems: Option<String>,
        /// Number of randomized models.
        #[arg(long, default_value_t = 25)]
        cases: usize,
        /// Seed for the randomized models.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit)
        }
    }
}

pub(crate) struct Failure {
    pub exit: u8,
    pub message: String,
}

impl Failure {
    fn load(message: impl Into<String>) -> Failure {
        Failure {
            exit: 2,
            message: message.into(),
        }
    }
}

/// Classifies engine errors into the exit-code taxonomy: semantic findings
/// with witnesses are 4, everything else raised while answering a query
/// is 3.
fn query_failure(err: cooc_core::Error) -> Failure {
    use cooc_core::Error::*;
    let exit = match &err {
        NotAbsolutelyContinuous { .. }
        | NoSolution { .. }
        | NonUniqueSolution { .. }
        | NotFactorizable { .. } => 4,
        UnresolvedReference { .. } | BadModel(_) | BadRational(_) => 2,
        _ => 3,
    };
    Failure {
        exit,
        message: err.to_string(),
    }
}
