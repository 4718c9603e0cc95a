use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "hti",
    version,
    about = "Hypergeometric tail inversion generalization bounds"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism). Never changes output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound.
    Bound(BoundArgs),
    /// Evaluate several bounds along a parameter grid and write CSV.
    Sweep(SweepArgs),
    /// Find the ghost sample size minimizing a bound.
    Optimize(OptimizeArgs),
    /// Relative gain of the optimized ghost sample size over m' = m.
    Study(StudyArgs),
    /// Sample size at which the chaining bound overtakes the pessimistic one.
    Crossover(CrossoverArgs),
}

/// Empirical error as a count or a rate.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ErrorArgs {
    /// Number of errors on the sample.
    #[arg(long)]
    pub errors: Option<u64>,
    /// Empirical risk; rounded to the nearest error count.
    #[arg(long)]
    pub risk: Option<f64>,
}

/// Complexity of the hypothesis class.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GrowthArgs {
    /// VC dimension (Sauer-Shelah growth function).
    #[arg(long)]
    pub d: Option<u64>,
    /// Number of hypotheses in a finite class.
    #[arg(long)]
    pub class_size: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// hti, hti-rd, hti-lower, margin, vp, vrd, lugosi, catoni, sc, langford.
    #[arg(long)]
    pub method: String,
    #[arg(long)]
    pub m: u64,
    #[command(flatten)]
    pub error: ErrorArgs,
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    pub growth: GrowthArgs,
    /// Ghost sample size (default 4m).
    #[arg(long, conflicts_with = "auto_mprime")]
    pub mprime: Option<u64>,
    /// Optimize m' over [1, 128m] before evaluating.
    #[arg(long)]
    pub auto_mprime: bool,
    /// Anticipated error count to optimize m' for (default: --errors).
    #[arg(long, requires = "auto_mprime")]
    pub target_errors: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Swept parameter: risk, m, d or mprime.
    #[arg(long)]
    pub vary: String,
    /// Values: a,b,c or lo:hi:step or log:lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// Sample size (ignored when --vary m).
    #[arg(long, default_value_t = 2000)]
    pub m: u64,
    /// Errors held fixed (ignored when --vary risk).
    #[arg(long, conflicts_with = "risk")]
    pub errors: Option<u64>,
    /// Risk held fixed (ignored when --vary risk).
    #[arg(long)]
    pub risk: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// VC dimension (ignored when --vary d).
    #[arg(long, conflicts_with = "class_size")]
    pub d: Option<u64>,
    #[arg(long)]
    pub class_size: Option<u64>,
    /// Comma-separated method tags, each optionally suffixed with @opt,
    /// @m, @<c>m or @<n> to choose m'.
    #[arg(long, default_value = "hti,vp,vrd,catoni,lugosi")]
    pub methods: String,
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// hti, hti-rd, hti-lower or catoni.
    #[arg(long)]
    pub method: String,
    #[arg(long)]
    pub m: u64,
    /// Anticipated error count, fixed before the scan.
    #[command(flatten)]
    pub error: ErrorArgs,
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    pub growth: GrowthArgs,
    /// Scanned interval lo:hi (default 1:128m).
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub step: u64,
    /// Rescan ±step around the strided optimum with step 1.
    #[arg(long)]
    pub refine: bool,
    /// Scan every m' instead of only multiples of m for Catoni.
    #[arg(long)]
    pub catoni_any: bool,
    /// Write the (m', bound) curve as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Restrict the default grid to zero empirical risk.
    #[arg(long)]
    pub k0_only: bool,
    /// Grid overrides, e.g. "m=100,200;risk=0:0.5:0.05;d=5;delta=0.05".
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value = "hti")]
    pub method: String,
    /// Scan [1, factor·m].
    #[arg(long, default_value_t = 128)]
    pub range_factor: u64,
    /// Scanned interval lo:hi for every combination.
    #[arg(long, conflicts_with = "range_factor")]
    pub range: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub step: u64,
    #[arg(long)]
    pub refine: bool,
    /// Per-combination CSV file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrossoverArgs {
    /// VC dimension; the constant does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub d: u64,
}
