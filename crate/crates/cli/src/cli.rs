use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "msum", version, about = "Monthly-sum option pricer: Edgeworth closed form, quadrature and Monte-Carlo oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price one contract with the closed-form expansion.
    Price(PriceArgs),
    /// Monte-Carlo price of the exact and log-approximated payoffs.
    Mc(McArgs),
    /// Price over a grid of one parameter, optionally with Monte-Carlo columns.
    Sweep(SweepArgs),
    /// Check every closed form against quadrature on the standard grid.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Correction {
    Quadrature,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Vol,
    Cap,
    Floor,
    Rate,
    Div,
    Months,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Vol => "vol",
            Axis::Cap => "cap",
            Axis::Floor => "floor",
            Axis::Rate => "rate",
            Axis::Div => "div",
            Axis::Months => "months",
        }
    }
}

/// Output and execution options shared by every subcommand.
#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Market and contract inputs. Flags override `--config`, which overrides defaults.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Monthly cap on simple returns, as a decimal (0.025 = 2.5%).
    #[arg(long, allow_negative_numbers = true)]
    pub cap: Option<f64>,
    /// Monthly floor on simple returns.
    #[arg(long, allow_negative_numbers = true)]
    pub floor: Option<f64>,
    #[arg(long)]
    pub vol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub div: Option<f64>,
    /// Term in years.
    #[arg(long)]
    pub term: Option<f64>,
    #[arg(long)]
    pub months: Option<u32>,
    /// File of `key = value` lines with any of the keys above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use the appendix formulas exactly as printed (adjudication runs only).
    #[arg(long)]
    pub printed_formulas: bool,
}

#[derive(Debug, Args)]
pub struct McOptions {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub antithetic: bool,
    /// Draw the exact and log payoffs from independent streams.
    #[arg(long)]
    pub independent_streams: bool,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Expansion order: 0 (leading) or 1 (with skew correction).
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, value_enum, default_value = "quadrature")]
    pub correction: Correction,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub mc_paths: Option<u64>,
    #[command(flatten)]
    pub mc: McOptions,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Add Monte-Carlo columns with this many paths per grid point.
    #[arg(long)]
    pub mc_paths: Option<u64>,
    #[command(flatten)]
    pub mc: McOptions,
    #[arg(long, value_enum, default_value = "quadrature")]
    pub correction: Correction,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Single tolerance replacing every per-formula default.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub printed_formulas: bool,
    /// Write the printed-vs-corrected discrepancy records here (JSON lines).
    #[arg(long)]
    pub discrepancy_log: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}
