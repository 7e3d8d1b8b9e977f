use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fdd2d",
    version,
    about = "Interference analysis for two full-duplex D2D pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print lambda, mu, tau, dominance thresholds and the payoff matrix.
    Analyze(AnalyzeArgs),
    /// Solve the non-cooperative game.
    Game(GameArgs),
    /// Solve the symmetric cooperative mixed-strategy problem.
    Optimize(OptimizeArgs),
    /// Check closed forms against a Monte Carlo run.
    Simulate(SimulateArgs),
    /// Emit figure data or a custom sweep as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub scenario: PathBuf,
    /// Write the payoff matrix as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Scenario file; alternatively give --lambda1 and --lambda2.
    #[arg(conflicts_with_all = ["lambda1", "lambda2", "mu1", "mu2"])]
    pub scenario: Option<PathBuf>,
    #[arg(long, requires = "lambda2")]
    pub lambda1: Option<f64>,
    #[arg(long, requires = "lambda1")]
    pub lambda2: Option<f64>,
    /// Defaults to 1 (no external interference).
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub mu2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, conflicts_with_all = ["lambda", "mu"])]
    pub scenario: Option<PathBuf>,
    #[arg(long, requires = "mu")]
    pub lambda: Option<f64>,
    #[arg(long, requires = "lambda")]
    pub mu: Option<f64>,
    /// Also run the lattice search with this step and report the gap.
    #[arg(long, value_name = "STEP")]
    pub oracle: Option<f64>,
    /// Exit with status 3 when the oracle gap exceeds the lattice step.
    #[arg(long, requires = "oracle")]
    pub strict: bool,
    /// Allow asymmetric scenarios (lattice search on the sum throughput).
    #[arg(long)]
    pub experimental: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub scenario: PathBuf,
    /// Fixed modes, e.g. `HD,FD`.
    #[arg(long, conflicts_with_all = ["strategy1", "strategy2"])]
    pub modes: Option<String>,
    /// Mixed strategy of pair 1 as `p_idle,p_hd,p_fd`.
    #[arg(long, requires = "strategy2")]
    pub strategy1: Option<String>,
    #[arg(long, requires = "strategy1")]
    pub strategy2: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    pub slots: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when an estimand misses its 3-sigma band.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarArg {
    Mu,
    Lambda,
    #[value(alias = "beta_db")]
    BetaDb,
    D,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub preset: PresetArg,
    #[arg(long, value_enum)]
    pub var: Option<VarArg>,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
