use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sonar-knot", version, about = "Distortion-invariant CSAS signature experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Distortion seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, or report file for commands that print JSON.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Residual tolerance for torus matching, overriding the data-derived
    /// default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the signature of every target in a config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-render a signature along a distorted trajectory.
    Distort(DistortArgs),
    /// Recover an invariant from a signature file.
    Estimate(EstimateArgs),
    /// QuasiP classes of a loop with the given degrees.
    Classes {
        #[arg(required = true, allow_negative_numbers = true)]
        degrees: Vec<i64>,
    },
    /// Decide whether two signatures can come from the same target.
    Compare(CompareArgs),
    /// Rank the targets of a config against a measured signature.
    Classify(ClassifyArgs),
    /// Write the plot-ready datasets of the demonstration figures.
    DemoFigures,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    /// Signature file whose sidecar names the target and geometry.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// Config whose targets are rendered with its distortion.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Circle map JSON to apply instead of a seeded distortion.
    #[arg(long, conflicts_with_all = ["max_order", "strength"])]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub max_order: Option<u32>,
    #[arg(long)]
    pub strength: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Degree,
    Spectrum,
    Pullback,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Frequency column for the spectral estimate.
    #[arg(long, default_value_t = 0)]
    pub freq_index: usize,
    /// Relative magnitude threshold for the spectral estimate.
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,
    /// Config holding the reference target for the pullback; defaults to
    /// the target recorded in the signature's sidecar.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Target name within the reference config.
    #[arg(long)]
    pub target: Option<String>,
    /// Torus grid size per axis.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[arg(long, requires = "torus_b")]
    pub torus_a: Option<PathBuf>,
    #[arg(long, requires = "torus_a")]
    pub torus_b: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub measured: PathBuf,
    /// Config whose targets form the dictionary.
    #[arg(long)]
    pub config: PathBuf,
}
