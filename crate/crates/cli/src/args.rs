//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptqkd_core::{FallbackPolicy, NullPolicy, ResendPolicy};

pub const SEED_ENV: &str = "PTQKD_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "ptqkd", version, about = "BB84 under PT-symmetric eavesdropping attacks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the randomized algebraic self-checks.
    Verify(VerifyArgs),
    /// Simulate one protocol run and report the statistics.
    Run(RunArgs),
    /// Approach-3 accuracy against alpha.
    SweepAlpha(SweepAlphaArgs),
    /// Accuracy against discriminator efficiency, with the 0.75 crossing.
    SweepEta(SweepEtaArgs),
    /// Pairwise CPT cosines after the Approach-2 gate.
    Angles(AnglesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    None,
    Hermitian,
    Approach1,
    Approach2,
    Approach3,
}

impl StrategyName {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::None => "none",
            StrategyName::Hermitian => "hermitian",
            StrategyName::Approach1 => "approach1",
            StrategyName::Approach2 => "approach2",
            StrategyName::Approach3 => "approach3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NullArg {
    Wrong,
    Loss,
}

impl From<NullArg> for NullPolicy {
    fn from(a: NullArg) -> Self {
        match a {
            NullArg::Wrong => NullPolicy::Wrong,
            NullArg::Loss => NullPolicy::Loss,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FallbackArg {
    None,
    Coin,
}

impl From<FallbackArg> for FallbackPolicy {
    fn from(a: FallbackArg) -> Self {
        match a {
            FallbackArg::None => FallbackPolicy::None,
            FallbackArg::Coin => FallbackPolicy::Coin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResendArg {
    Invert,
    Reencode,
}

impl From<ResendArg> for ResendPolicy {
    fn from(a: ResendArg) -> Self {
        match a {
            ResendArg::Invert => ResendPolicy::Invert,
            ResendArg::Reencode => ResendPolicy::Reencode,
        }
    }
}

/// Strategy parameters; each applies to specific strategies only.
#[derive(Debug, Clone, Default, Args)]
pub struct StrategyParams {
    /// PT metric parameter (approach2, approach3).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// R2 gate angle (approach2).
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Target-state angle (approach3); only pi/4 admits a unitary gate.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Evolution frequency (approach3).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Distance from the breaking point (approach1).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

/// Options shared by every simulating command.
#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Discriminator efficiency in [0, 1].
    #[arg(long)]
    pub eta: Option<f64>,
    /// How Eve's null results are handled.
    #[arg(long = "null", value_enum)]
    pub null_policy: Option<NullArg>,
    /// What Eve records for a null result.
    #[arg(long = "fallback", value_enum)]
    pub fallback_policy: Option<FallbackArg>,
    /// What Eve forwards to Bob.
    #[arg(long, value_enum, default_value = "invert")]
    pub resend: ResendArg,
    /// Master seed.
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads, 0 for all cores. Never changes results.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, required_unless_present = "config")]
    pub strategy: Option<StrategyName>,
    /// Rerun the configuration echoed in an earlier JSON report.
    #[arg(
        long,
        conflicts_with_all = ["strategy", "alpha", "rho", "sigma", "omega", "epsilon", "eta", "null_policy", "fallback_policy"]
    )]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    pub qubits: u64,
    #[command(flatten)]
    pub params: StrategyParams,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepAlphaArgs {
    #[arg(long, default_value_t = 0.3)]
    pub from: f64,
    #[arg(long, default_value_t = 1.5)]
    pub to: f64,
    #[arg(long, default_value_t = 60)]
    pub steps: usize,
    /// Qubits per row.
    #[arg(long, default_value_t = 100_000)]
    pub qubits: u64,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a whitespace-separated data file with a commented header.
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepEtaArgs {
    #[arg(long, value_enum, default_value = "approach2")]
    pub strategy: StrategyName,
    #[arg(long, default_value_t = 0.8)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
    /// Qubits per row.
    #[arg(long, default_value_t = 100_000)]
    pub qubits: u64,
    #[command(flatten)]
    pub params: StrategyParams,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random draws per check.
    #[arg(long, default_value_t = crate::verify::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct AnglesArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 3.0 * std::f64::consts::FRAC_PI_4)]
    pub rho: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TableFormat,
}
