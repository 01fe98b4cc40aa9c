use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "swm", version, about = "Greedy submodular welfare workbench")]
pub struct Cli {
    /// Worker threads for permutation sweeps (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for Monte-Carlo sampling, random scans and spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here; `simulate` also writes a CSV next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected Greedy trace (w, a, b) over random arrival orders.
    Simulate(SimulateArgs),
    /// Solve a factor-revealing LP and compare with its closed form.
    Lp(LpArgs),
    /// Axiom checks and second-order class of every agent.
    Classify(InstanceArg),
    /// Run the lemma checks on an instance.
    Verify(VerifyArgs),
    /// Compare the copy and move expectations on one or many instances.
    Conjecture(ConjectureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct InstanceArg {
    /// Instance JSON file.
    pub instance: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Beta,
    BetaLambda,
    General,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// Required for `beta-lambda`; `lambda * n` must be an integer.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Also write the model as a plain-text LP listing.
    #[arg(long)]
    pub listing: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum CheckSet {
    Lemmas,
    Eq1,
    Secondhalf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "lemmas")]
    pub checks: Vec<CheckSet>,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    /// Instance JSON file; omit when scanning with `--random`.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    pub instance: Option<PathBuf>,
    /// Scan this many seeded random instances instead.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub nmax: usize,
    #[arg(long, default_value_t = 3)]
    pub mmax: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}
