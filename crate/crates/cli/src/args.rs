use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyadic_core::grid::{SamplingMode, DEFAULT_EXHAUSTIVE_LIMIT};

#[derive(Debug, Parser)]
#[command(name = "dyadic", version, about = "Random dyadic lattices on finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the metric axioms of an input space.
    Validate(CommonArgs),
    /// Build nested random grids and check the covering bound.
    Grids(LatticeArgs),
    /// Build a random forest with its cubes and check the structural lemmas.
    Lattice(LatticeArgs),
    /// Exact coloring analysis: membership bounds, recoloring, tree experiment.
    Coloring(ColoringArgs),
    /// Bad-cube probability, boundary-layer decay and equalization.
    Goodness(GoodnessArgs),
    /// A2 characteristic, growth and doubling constants of a weighted measure.
    A2(A2Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ExhaustiveUniform,
    GreedyPermutation,
}

impl From<Mode> for SamplingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::ExhaustiveUniform => SamplingMode::ExhaustiveUniform,
            Mode::GreedyPermutation => SamplingMode::GreedyPermutation,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Space file: JSON `{"points": [...], "dist": [[...]]}` or CSV coordinates.
    #[arg(long)]
    pub input: PathBuf,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Scale ratio; level `k` grids are `delta^k`-separated.
    #[arg(long)]
    pub delta: f64,
    /// Master seed; required for every randomized run.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exhaustive-uniform")]
    pub mode: Mode,
    /// Largest point set enumerated exhaustively.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
    pub exhaustive_limit: usize,
    /// Coarsest level to build; by default stop at the first one-point grid.
    #[arg(long, allow_hyphen_values = true)]
    pub coarsest: Option<i32>,
    /// Build levels `>= freeze_from` (the finer ones) with deterministic greedy grids.
    #[arg(long, allow_hyphen_values = true)]
    pub freeze_from: Option<i32>,
}

#[derive(Debug, Clone, Args)]
pub struct ColoringArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid scale at which colorings are enumerated.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Largest point set enumerated exhaustively.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
    pub exhaustive_limit: usize,
    #[arg(long, default_value_t = 3)]
    pub tree_branching: usize,
    #[arg(long, default_value_t = 2)]
    pub tree_height: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GoodnessArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Goodness exponent in (0, 1).
    #[arg(long)]
    pub gamma: f64,
    /// Level gap; must satisfy `delta^(r (1 - gamma)) < 1/2`.
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub trials: u64,
    /// Cube level; the finest level by default.
    #[arg(long, allow_hyphen_values = true)]
    pub level: Option<i32>,
    /// Name of the fixed cube center; the first point by default.
    #[arg(long)]
    pub center: Option<String>,
    /// Comma-separated, strictly decreasing geometric epsilons; defaults to
    /// `delta^(j gamma)` for `j = 1..=10`.
    #[arg(long, value_delimiter = ',')]
    pub eps_schedule: Option<Vec<f64>>,
    /// Largest number of forests the exact enumeration may visit.
    #[arg(long, default_value_t = 200_000)]
    pub max_outcomes: u64,
}

#[derive(Debug, Clone, Args)]
pub struct A2Args {
    #[command(flatten)]
    pub common: CommonArgs,
    /// JSON `{"mu": {name: mass}, "w": {name: weight}}`; `mu` defaults to counting measure.
    #[arg(long)]
    pub weights: PathBuf,
    /// Growth exponent `m`.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
}
