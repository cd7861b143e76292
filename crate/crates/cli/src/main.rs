//! `csgreedy` command-line front end.

mod commands;
mod render;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use csgreedy::model::Settings;
use csgreedy::verify::Candidate;
use csgreedy::PolicyKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] csgreedy::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// Cheap low-value item against one expensive valuable item.
    Thm2,
    /// One expensive item against many unit items.
    Thm3,
}

/// Reference budget for the optimal policy in `verify-bounds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Full,
    Half,
    Budget(f64),
}

impl FromStr for Reference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Self::Full),
            "half" => Ok(Self::Half),
            other => match other.parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => Ok(Self::Budget(v)),
                _ => Err(format!("expected 'full', 'half' or a positive number, got '{other}'")),
            },
        }
    }
}

impl Reference {
    pub fn budget(self, k: f64) -> f64 {
        match self {
            Self::Full => k,
            Self::Half => k / 2.0,
            Self::Budget(v) => v,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "csgreedy", version, about = "Budgeted worst-case adaptive greedy policies, checkers and bound verification")]
pub struct Cli {
    /// Seed for every randomized path.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format; defaults to text on a terminal and json (csv for `al`) otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Absolute tolerance for value comparisons.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Largest ground set the property checkers enumerate exhaustively.
    #[arg(long, global = true)]
    pub max_items: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check cost axioms and pointwise utility properties of an instance.
    Check { instance: PathBuf },
    /// Run a greedy policy on an instance.
    Run {
        instance: PathBuf,
        /// pi1 (cost-average), pi2 (cost-insensitive) or combined.
        #[arg(long)]
        policy: PolicyKind,
        /// Realization as comma-separated item=state pairs.
        #[arg(long, conflicts_with = "all")]
        realization: Option<String>,
        /// Trace every realization.
        #[arg(long)]
        all: bool,
        /// Budget override.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Compare worst-case policy values against the brute-force optimum.
    VerifyBounds {
        instances: Vec<PathBuf>,
        /// Draw this many random checked instances.
        #[arg(long)]
        random: Option<usize>,
        /// Use a generated counterexample instance.
        #[arg(long, value_enum)]
        counterexample: Option<Construction>,
        #[arg(long, default_value_t = 10.0)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// best_of_two, best_of_first_pick, pi1, pi2 or combined; default is all guarantees.
        #[arg(long)]
        policy: Option<Candidate>,
        /// full, half or an explicit budget for the optimal policy.
        #[arg(long)]
        reference: Option<Reference>,
    },
    /// Print a generated counterexample instance as JSON.
    Counterexample {
        #[arg(value_enum)]
        construction: Construction,
        #[arg(long, default_value_t = 10.0)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Run an active-learning experiment grid from a JSON config.
    Al { config: PathBuf },
}

/// Result of a subcommand: rendered output and whether a property failed.
pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

fn settings(cli: &Cli) -> CliResult<Settings> {
    let mut s = Settings::default();
    if let Some(t) = cli.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("--tolerance must be a non-negative number, got {t}")));
        }
        s.tolerance = t;
    }
    if let Some(m) = cli.max_items {
        if m > 20 {
            return Err(CliError::Usage("--max-items cannot exceed 20".into()));
        }
        if m > s.caps.checker_items {
            eprintln!(
                "warning: raising the checker item cap from {} to {m}; exhaustive checks grow as 3^n",
                s.caps.checker_items
            );
        }
        s.caps.checker_items = m;
    }
    Ok(s)
}

fn format(cli: &Cli) -> Format {
    cli.format.unwrap_or_else(|| {
        let al = matches!(cli.command, Command::Al { .. });
        if cli.out.is_none() && std::io::stdout().is_terminal() {
            if al { Format::Csv } else { Format::Text }
        } else if al {
            Format::Csv
        } else {
            Format::Json
        }
    })
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    let settings = settings(cli)?;
    let fmt = format(cli);
    match &cli.command {
        Command::Check { instance } => commands::check(instance, settings, fmt),
        Command::Run { instance, policy, realization, all, budget } => {
            commands::run(instance, settings, fmt, *policy, realization.as_deref(), *all, *budget)
        }
        Command::VerifyBounds { instances, random, counterexample, p, n, policy, reference } => {
            let source = commands::BoundSource {
                files: instances,
                random: *random,
                construction: counterexample.map(|c| (c, *p, *n)),
            };
            commands::verify_bounds(source, settings, fmt, cli.seed.unwrap_or(0), *policy, *reference)
        }
        Command::Counterexample { construction, p, n } => commands::counterexample(*construction, *p, *n, settings),
        Command::Al { config } => commands::al(config, fmt, cli.seed),
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|source| CliError::Io { path: "stdout".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = execute(&cli).and_then(|o| emit(&cli, &o.text).map(|_| o.failed));
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
