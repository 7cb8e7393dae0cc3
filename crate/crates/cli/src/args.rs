use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "entpoly", version, about = "Entanglement-polytope witnesses from local spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prepare a (possibly noisy) state and write it as a density-matrix JSON file
    Prepare(PrepareArgs),
    /// Simulate Poisson coincidence counts for a state file
    Measure(MeasureArgs),
    /// Reconstruct a global state or the local spectrum from a counts file
    Reconstruct(ReconstructArgs),
    /// Classify a local spectrum against the entanglement polytopes
    Witness(WitnessArgs),
    /// Measurement budgets, overheads and crossing efficiencies
    Overhead(OverheadArgs),
    /// Full pipeline: prepare, measure, reconstruct, classify, report
    Run(RunArgs),
    /// Regenerate the data behind a figure or table
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanKind {
    /// Four single-qubit settings per qubit
    Local,
    /// All 4^N product settings
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReconstructMode {
    /// Local when every setting acts on one qubit, global otherwise
    Auto,
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fig3,
    Fig4,
    Table1,
    Overhead,
}

/// Exactly one state source is required.
#[derive(Debug, Clone, Default, Args)]
pub struct StateArgs {
    /// Canonical three-qubit representative (S, BS_AB_C, BS_AC_B, BS_BC_A, W, GHZ)
    #[arg(long)]
    pub class: Option<String>,
    /// Circuit preset: a three-qubit class or a four-qubit family label
    #[arg(long)]
    pub preset: Option<String>,
    /// Three-qubit circuit "alpha,beta,phi,varphi"; amplitudes may be complex ("0.5+0.5i")
    #[arg(long, allow_hyphen_values = true)]
    pub waveplates3: Option<String>,
    /// Four-qubit circuit "alpha,beta,route_a,route_b,rotate_a,rotate_b"
    #[arg(long, allow_hyphen_values = true)]
    pub waveplates4: Option<String>,
    /// Pump-angle form: "gamma_h,phi,varphi" (three qubits) or
    /// "gamma_h,route_a,route_b,rotate_a,rotate_b" (four qubits)
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Four-qubit family label, e.g. G_abcd or L_ab3
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameters "a,b,c,d"
    #[arg(long, default_value = "1,1,1,1", allow_hyphen_values = true)]
    pub params: String,
    /// Angles are given in degrees
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// White-noise visibility v in rho = v |psi><psi| + (1 - v) I / d
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Density-matrix JSON file
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Expected events per setting at unit efficiency (rate x time)
    #[arg(long, default_value_t = 1e4)]
    pub counts: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = PlanKind::Local)]
    pub plan: PlanKind,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Counts CSV with header setting_id,outcome,count
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ReconstructMode::Auto)]
    pub mode: ReconstructMode,
    /// Monte Carlo trials for local error bars (0 disables)
    #[arg(long, default_value_t = 0)]
    pub mc_trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Local spectrum "l1,l2,l3[,l4]"
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Spectrum JSON written by `reconstruct`
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Purity bound used for epsilon
    #[arg(long)]
    pub purity: Option<f64>,
    /// Epsilon given directly (overrides --purity)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Widen the box by this many Monte Carlo standard errors
    #[arg(long, default_value_t = 3.0)]
    pub stat_sigmas: f64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct OverheadArgs {
    /// Qubit numbers, comma separated
    #[arg(long, default_value = "3,4,8")]
    pub qubits: String,
    /// Detector efficiencies, comma separated
    #[arg(long, default_value = "0.25,0.5,0.75,1")]
    pub eta: String,
    /// Methods (LPM, FQST, CSQST, WITNESS_A, WITNESS_B), comma separated
    #[arg(long, default_value = "LPM,FQST,CSQST,WITNESS_A,WITNESS_B")]
    pub methods: String,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PuritySourceArg {
    /// Global maximum-likelihood tomography of simulated counts
    Tomography,
    /// Exact purity of the simulated state
    State,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Experiment configuration JSON; replaces the state and run flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    #[arg(long, default_value_t = 1e4)]
    pub counts: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = PuritySourceArg::Tomography)]
    pub purity_source: PuritySourceArg,
    #[arg(long, default_value_t = 3.0)]
    pub stat_sigmas: f64,
    #[arg(long, default_value_t = 200)]
    pub mc_trials: usize,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Rendering of the summary printed to stdout
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Seed for the noisy simulations; the bundles are fixed by default
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e4)]
    pub counts: f64,
    /// Noise visibility; by default tuned so the global purity is 0.87
    #[arg(long)]
    pub visibility: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub mc_trials: usize,
    #[arg(long, default_value_t = 3.0)]
    pub stat_sigmas: f64,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}
