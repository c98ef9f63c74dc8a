use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "plankton",
    version,
    about = "Fixed points, Neimark-Sacker analysis and simulation of the discrete plankton-toxin map",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Existence count, locations and stability labels of all fixed points
    FixedPoints(AnalysisArgs),
    /// Root-location cases and labels of the boundary and interior points
    Classify(AnalysisArgs),
    /// Neimark-Sacker point, normal form and discriminating quantity
    Ns(NsArgs),
    /// Iterate a single orbit
    Orbit(OrbitArgs),
    /// Bifurcation diagram data over a theta grid
    Sweep(SweepArgs),
    /// Largest Lyapunov exponent along one orbit
    Mle(MleArgs),
    /// Nonnegativity, invariance of M and global-convergence checks
    Regions(AnalysisArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FixedPoints(_) => "fixed-points",
            Command::Classify(_) => "classify",
            Command::Ns(_) => "ns",
            Command::Orbit(_) => "orbit",
            Command::Sweep(_) => "sweep",
            Command::Mle(_) => "mle",
            Command::Regions(_) => "regions",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::FixedPoints(a) | Command::Classify(a) | Command::Regions(a) => &a.common,
            Command::Ns(a) => &a.common,
            Command::Orbit(a) => &a.common,
            Command::Sweep(a) => &a.common,
            Command::Mle(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Zooplankton conversion rate
    #[arg(long)]
    pub beta: Option<f64>,
    /// Zooplankton death rate
    #[arg(long)]
    pub r: Option<f64>,
    /// Toxin liberation rate
    #[arg(long)]
    pub theta: Option<f64>,
    /// Half-saturation constant of the toxin response
    #[arg(long)]
    pub c: Option<f64>,
    /// Holling exponent (1 or 2)
    #[arg(long)]
    pub h: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// key=value file; flags given on the command line take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (standard output when absent)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Published,
    Projected,
}

#[derive(Debug, Clone, Args)]
pub struct NsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which Neimark-Sacker point to report, in ascending u (default 0)
    #[arg(long)]
    pub index: Option<usize>,
    /// Closed form used for the Y^2 coefficient of the first normal-form component
    #[arg(long, value_enum)]
    pub convention: Option<Convention>,
}

#[derive(Debug, Clone, Args)]
pub struct OrbitSpecArgs {
    /// Initial phytoplankton density
    #[arg(long)]
    pub u0: Option<f64>,
    /// Initial zooplankton density
    #[arg(long)]
    pub v0: Option<f64>,
    /// Total iterations (default 10000)
    #[arg(long)]
    pub steps: Option<usize>,
    /// Iterations discarded before recording (orbit default 0, otherwise 9000)
    #[arg(long)]
    pub transient: Option<usize>,
    /// Record every k-th state after the transient (default 1)
    #[arg(long)]
    pub record_every: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub orbit: OrbitSpecArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub orbit: OrbitSpecArgs,
    /// Lower end of the theta grid
    #[arg(long)]
    pub theta_min: Option<f64>,
    /// Upper end of the theta grid
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Number of theta grid points (default 500)
    #[arg(long)]
    pub grid: Option<usize>,
    /// Samples kept per theta (default 200)
    #[arg(long)]
    pub keep: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct MleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub orbit: OrbitSpecArgs,
    /// Initial tangent vector components (default (1, 1)/sqrt 2)
    #[arg(long)]
    pub tangent_u: Option<f64>,
    #[arg(long)]
    pub tangent_v: Option<f64>,
}
