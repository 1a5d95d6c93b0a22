use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rivalry", version, about = "Binocular-rivalry model simulations, sweeps and Levelt tests")]
pub struct Cli {
    /// Worker threads for sweeps (1 runs sequentially).
    #[arg(long, global = true, env = "RIVALRY_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one model run, export the trajectory and print its dominance report.
    Simulate(SimulateArgs),
    /// Run a parameter sweep and export per-replicate results.
    Sweep(SweepArgs),
    /// Run the three Levelt sweeps for a model and report proposition verdicts.
    Levelt(LeveltArgs),
    /// Analyse a trajectory CSV and print its dominance report.
    Classify(ClassifyArgs),
}

/// Options shared by every command that builds a model run.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Model: wilson, laing-chow, lc-adaptation, lc-depression or kalarickal.
    #[arg(long)]
    pub model: Option<String>,

    /// JSON run file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Parameter override `name=value` (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,

    #[arg(long)]
    pub dt: Option<f64>,

    /// Simulated duration.
    #[arg(long)]
    pub dur: Option<f64>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Record every n-th integration step.
    #[arg(long)]
    pub record_every: Option<usize>,

    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,

    /// Initial-state preset.
    #[arg(long, value_enum)]
    pub init: Option<PresetArg>,

    /// Analysis transient to discard.
    #[arg(long)]
    pub transient: Option<f64>,

    /// Dominance margin (also sets the fusion margin unless given separately).
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Stimuli `s1,s2`.
    #[arg(long, value_name = "S1,S2")]
    pub stim: Option<String>,

    /// Trajectory CSV path; the JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Dominance interval CSV path.
    #[arg(long)]
    pub intervals: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,

    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,

    /// Grid `lo:hi:step`.
    #[arg(long, value_name = "LO:HI:STEP")]
    pub grid: Option<String>,

    #[arg(long)]
    pub replicates: Option<usize>,

    /// Fixed value `stimulus=v` (cross-inhibition) or `s2=v` (asymmetric).
    #[arg(long = "fixed", value_name = "NAME=VALUE")]
    pub fixed: Vec<String>,

    /// Output prefix; writes `<prefix>.csv` and `<prefix>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LeveltArgs {
    #[arg(long)]
    pub model: String,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Full report JSON, including all sweeps.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Trajectory CSV.
    #[arg(long = "in")]
    pub input: PathBuf,

    /// Model, when the header does not identify it.
    #[arg(long)]
    pub model: Option<String>,

    /// Sidecar JSON; defaults to the CSV path with a `.json` extension, if present.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,

    #[arg(long)]
    pub transient: Option<f64>,

    #[arg(long)]
    pub delta: Option<f64>,

    /// Dominance interval CSV path.
    #[arg(long)]
    pub intervals: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PresetArg {
    SymmetricZero,
    Perturbed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Equal,
    CrossInhibition,
    Asymmetric,
}
