//! `marc`: allocations, regime paths, rate regions and figure data for the
//! dual-band multiple-access relay channel.

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::table::ResultTable;

#[derive(Parser, Debug)]
#[command(name = "marc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the table here instead of stdout (overrides `output` in the config).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// RNG seed; overrides MARC_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// mm-wave gains given directly, or taken from a config file.
#[derive(Args, Debug, Clone)]
pub struct GainArgs {
    /// JSON or TOML run config; gains and γ are derived from the channel model.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    /// Overrides the config's γ when both are given.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArg {
    /// JSON or TOML run config; a built-in scenario is used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    #[value(name = "2a")]
    Fig2a,
    #[value(name = "5")]
    Fig5,
    #[value(name = "6a")]
    Fig6a,
    #[value(name = "6b")]
    Fig6b,
    #[value(name = "7a")]
    Fig7a,
    #[value(name = "7b")]
    Fig7b,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Criterion {
    Sum,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal mm-wave allocation at one budget.
    Allocate {
        #[command(flatten)]
        gains: GainArgs,
        #[arg(long)]
        budget: f64,
        /// Bandwidth mismatch factor used for Σ_R, Σ_D when gains are given directly.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Regime path over the budget axis, or sampled allocations with --dense.
    Path {
        #[command(flatten)]
        gains: GainArgs,
        /// Number of evenly spaced budgets to sample in [0, p_max].
        #[arg(long)]
        dense: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        p_max: f64,
    },
    /// Threshold powers.
    Thresholds {
        #[command(flatten)]
        gains: GainArgs,
    },
    /// γ, relay regime, path label and saturation data.
    Summary {
        #[command(flatten)]
        gains: GainArgs,
    },
    /// The six bounds of the relay-only region, optionally with direct links.
    Region {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 0.0)]
        direct_p1: f64,
        #[arg(long, default_value_t = 0.0)]
        direct_p2: f64,
    },
    /// Jointly-near conditions, or the threshold source-relay distance.
    CheckNear {
        #[command(flatten)]
        config: ConfigArg,
        /// Bisect for the source-relay distance where the condition stops holding.
        #[arg(long)]
        threshold: bool,
        #[arg(long, value_enum, default_value_t = Criterion::Sum)]
        criterion: Criterion,
    },
    /// Mode map over source angle and source-relay distance.
    Sweep2d {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 10.0)]
        budget: f64,
        #[arg(long, default_value_t = 0.0)]
        phi_min: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        phi_max: f64,
        #[arg(long, default_value_t = 61)]
        phi_steps: usize,
        #[arg(long, default_value_t = 0.02)]
        dsr_min: f64,
        #[arg(long, default_value_t = 2.0)]
        dsr_max: f64,
        #[arg(long, default_value_t = 100)]
        dsr_steps: usize,
    },
    /// Randomized agreement suite: closed form against the numeric oracle and KKT.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Joint microwave + mm-wave allocation by projected supergradient.
    P2 {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 5.0)]
        p_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        iterations: usize,
    },
    /// Data grid behind one of the reference figures.
    Fig {
        #[arg(long, value_enum)]
        id: FigureId,
    },
}

fn seed(flag: Option<u64>) -> Result<Option<u64>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("MARC_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| CliError::Usage(format!("MARC_SEED is not an integer: {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = commands::Context { seed: seed(cli.seed)? };
    let (table, config_output): (ResultTable, Option<PathBuf>) = match cli.command {
        Command::Allocate { gains, budget, alpha } => commands::allocate(&ctx, &gains, budget, alpha)?,
        Command::Path { gains, dense, p_max } => commands::path(&ctx, &gains, dense, p_max)?,
        Command::Thresholds { gains } => commands::thresholds(&ctx, &gains)?,
        Command::Summary { gains } => commands::summary(&ctx, &gains)?,
        Command::Region { config, direct_p1, direct_p2 } => commands::region(&ctx, &config, direct_p1, direct_p2)?,
        Command::CheckNear { config, threshold, criterion } => commands::check_near(&ctx, &config, threshold, criterion)?,
        Command::Sweep2d { config, budget, phi_min, phi_max, phi_steps, dsr_min, dsr_max, dsr_steps } => {
            let phi = commands::linspace(phi_min, phi_max, phi_steps);
            let dsr = commands::linspace(dsr_min, dsr_max, dsr_steps);
            commands::sweep2d(&ctx, &config, budget, &phi, &dsr)?
        }
        Command::Verify { trials } => commands::verify(&ctx, trials)?,
        Command::P2 { config, budget, p_max, steps, iterations } => {
            commands::p2(&ctx, &config, budget, p_max, steps, iterations)?
        }
        Command::Fig { id } => (commands::figure(&ctx, id)?, None),
    };
    let text = match cli.format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json(),
    };
    match cli.output.or(config_output) {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if verify_failed(&table) {
        return Err(CliError::VerifyFailed);
    }
    Ok(())
}

/// `verify` reports its verdict in a `pass` column.
fn verify_failed(table: &ResultTable) -> bool {
    match table.column("pass") {
        Some(i) => table.rows.iter().any(|r| r[i] == table::Cell::Text("false".into())),
        None => false,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::VerifyFailed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
