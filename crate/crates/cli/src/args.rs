use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wright_core::Sign;

#[derive(Debug, Parser)]
#[command(name = "wright", version = crate::VERSION, about = "Wright function oracle and large-parameter expansions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate W^±_{λ,ν}(x) (ν = a·x) by direct summation.
    Eval(EvalArgs),
    /// Asymptotic expansion for large x, compared against the oracle.
    Expand(ExpandArgs),
    /// Saddle points, classification and contributory-pair count.
    Saddles(SaddlesArgs),
    /// Regenerate a reference table or curve and diff it against the stored values.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, value_enum)]
    pub sign: SignArg,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub x: f64,
    /// Working precision in decimal digits.
    #[arg(long, default_value_t = 60)]
    pub precision: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub x: f64,
    /// Truncate after term K.
    #[arg(long, value_name = "K", conflicts_with = "optimal")]
    pub order: Option<usize>,
    /// Truncate near the smallest term (the default when --order is absent).
    #[arg(long)]
    pub optimal: bool,
    /// Add the exponentially small final pair to the W⁺ sum.
    #[arg(long)]
    pub include_subdominant: bool,
    /// Oracle precision in decimal digits.
    #[arg(long, default_value_t = 60)]
    pub precision: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SaddlesArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// List the first N saddles of the W⁺ complex chain.
    #[arg(long, value_name = "N")]
    pub chain: Option<usize>,
    /// Write steepest-descent path samples as CSV.
    #[arg(long)]
    pub trace: bool,
    /// Destination of the --trace CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableId {
    #[value(name = "T1")]
    T1,
    #[value(name = "T2")]
    T2,
    #[value(name = "T3")]
    T3,
    #[value(name = "T4")]
    T4,
    #[value(name = "T5")]
    T5,
    #[value(name = "Fig2Curve")]
    Fig2Curve,
    #[value(name = "Fig4Curves")]
    Fig4Curves,
}

impl std::fmt::Display for TableId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TableId::T1 => "T1",
            TableId::T2 => "T2",
            TableId::T3 => "T3",
            TableId::T4 => "T4",
            TableId::T5 => "T5",
            TableId::Fig2Curve => "Fig2Curve",
            TableId::Fig4Curves => "Fig4Curves",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub table: TableId,
    /// Override x (disables the reference diff).
    #[arg(long)]
    pub x: Option<f64>,
    /// Override the largest truncation index (disables the reference diff).
    #[arg(long, value_name = "K")]
    pub order: Option<usize>,
    /// Oracle precision in decimal digits.
    #[arg(long, default_value_t = 60)]
    pub precision: u32,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}
