use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "strictqst",
    version,
    about = "Random-basis measurement design, simulation and PSD-constrained estimation for low-rank quantum state tomography"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw Haar-random orthonormal bases and write them as JSON.
    GenBases(GenBasesArgs),
    /// Simulate a measurement record for a state and a basis set.
    Simulate(SimulateArgs),
    /// Reconstruct a state from a measurement record.
    Estimate(EstimateArgs),
    /// Run a completeness-onset sweep from a config file.
    Sweep(ExperimentArgs),
    /// Run the noisy near-pure-state protocol from a config file.
    Noisy(ExperimentArgs),
    /// Run a robustness-versus-noise scan from a config file.
    Robustness(ExperimentArgs),
    /// Re-render the SVG plot of an experiment from its CSV table.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisKind {
    Global,
    Local,
}

#[derive(Debug, Args)]
pub struct GenBasesArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub n_bases: usize,
    /// `local` draws independent single-qubit bases; needs a power-of-two dimension.
    #[arg(long = "type", value_enum, default_value = "global")]
    pub basis_type: BasisKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["state", "random_rank"])))]
#[command(group(ArgGroup::new("sampling").required(true).args(["shots", "noiseless"])))]
pub struct SimulateArgs {
    #[arg(long)]
    pub bases: PathBuf,
    /// State JSON file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Draw a random state of this rank instead of reading one.
    #[arg(long)]
    pub random_rank: Option<usize>,
    /// Shots per basis for a sampled record.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Record exact outcome probabilities.
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `c` in the attached noise bound `ε = c √(k d / shots)`.
    #[arg(long, default_value_t = strictqst::measurement::DEFAULT_NOISE_SCALE)]
    pub noise_scale: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the simulated state (useful with --random-rank).
    #[arg(long)]
    pub state_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ls,
    Tracemin,
    Mle,
    Feasibility,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub record: PathBuf,
    #[arg(long)]
    pub bases: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Data-ball radius for tracemin and feasibility. Falls back to the
    /// record's attached noise bound.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving the JSON, CSV, SVG and manifest outputs.
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
    /// Maximum number of worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Sweep,
    Noisy,
    Robustness,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    #[arg(long)]
    pub out: PathBuf,
}
