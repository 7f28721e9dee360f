use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use dimgrid::estimators::{Method, DEFAULT_BASE_TARGET, DEFAULT_EDCF_D_MAX, DEFAULT_MLE_K};
use dimgrid::Engine;

#[derive(Debug, Parser)]
#[command(name = "dimgrid", version, about = "Grid-connectivity intrinsic dimension estimation")]
pub struct Cli {
    /// Run every stage on the current thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the intrinsic dimension of a CSV point cloud.
    Estimate(EstimateArgs),
    /// Print the lower/middle/upper CF table for an ambient dimension.
    Bounds(BoundsArgs),
    /// Compute (and cache) an eDCF reference model.
    Calibrate(CalibrateArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Analyze the decision boundary of a k-NN classifier or a label raster.
    Boundary(BoundaryArgs),
    /// Run estimators over a manifold suite and report MAE, bias and exact-match rate.
    Benchmark(BenchmarkArgs),
}

/// Reference cache location. `DIMGRID_CACHE` is used when `--cache` is absent;
/// with neither, references live in memory for the duration of the run.
#[derive(Debug, Clone, Args)]
pub struct CacheArgs {
    #[arg(long, env = "DIMGRID_CACHE")]
    pub cache: Option<PathBuf>,

    /// Read the cache but never write it back.
    #[arg(long)]
    pub read_only_cache: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// Input CSV, one point per row.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,

    /// The first row is a header.
    #[arg(long)]
    pub header: bool,

    #[arg(long, default_value = "edcf")]
    pub method: Method,

    /// Explicit IP range; otherwise DCF uses 45–55 and eDCF the adaptive target.
    #[arg(long, requires = "ip_max")]
    pub ip_min: Option<f64>,

    #[arg(long, requires = "ip_min")]
    pub ip_max: Option<f64>,

    /// eDCF base IP target before the ambient-dimension adjustment.
    #[arg(long, default_value_t = DEFAULT_BASE_TARGET)]
    pub base_target: f64,

    /// Largest candidate dimension (DCF: ambient when omitted; eDCF: 50).
    #[arg(long)]
    pub d_max: Option<usize>,

    #[arg(long, default_value = "auto")]
    pub engine: Engine,

    /// Calibration-sphere noise (per-coordinate sigma on the unit sphere);
    /// estimated from the data when omitted.
    #[arg(long)]
    pub noise: Option<f64>,

    /// Neighbors used by MLE.
    #[arg(long, default_value_t = DEFAULT_MLE_K)]
    pub mle_k: usize,

    /// Recorded in the report; every method is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub cache: CacheArgs,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub ambient: usize,

    /// Emit JSON with 12 significant digits instead of a text table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// Ambient dimension of the data the model will serve.
    #[arg(long)]
    pub d: usize,

    #[arg(long = "dmax", default_value_t = DEFAULT_EDCF_D_MAX)]
    pub d_max: usize,

    /// Number of points of the data the model will serve.
    #[arg(long)]
    pub n: usize,

    /// Calibration-sphere noise (per-coordinate sigma).
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    #[arg(long, default_value_t = DEFAULT_BASE_TARGET)]
    pub base_target: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Manifold name (sphere, affine, helix1d, helix2d, swissroll, affine20,
    /// moebius, scurve, spiral) or benchmark id (`M7_Roll`, `M7`), `hypersphere`,
    /// `circles-concentric`, `circles-overlapping`, `sinusoids`, `fern`,
    /// `carpet` or `triangle`.
    #[arg(long)]
    pub generator: String,

    /// Number of points (per class for the labeled sets). Defaults: 1000 for
    /// manifolds, 360 per circle, 500 per sinusoid, 100000 for IFS.
    #[arg(long)]
    pub n: Option<usize>,

    /// Per-coordinate Gaussian sigma for manifolds; noise rate for the
    /// labeled 2-D sets (their presets apply when omitted).
    #[arg(long)]
    pub noise: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub intrinsic: Option<usize>,

    #[arg(long)]
    pub ambient: Option<usize>,

    /// Uniform background points (label 0) added to IFS output, which then
    /// carries a label column.
    #[arg(long)]
    pub background: Option<usize>,

    /// Chaos-game iterations discarded before recording.
    #[arg(long, default_value_t = dimgrid::datagen::DEFAULT_BURN_IN)]
    pub burn_in: usize,

    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundaryArgs {
    /// Labeled training CSV (last column is the integer label).
    #[arg(long, value_name = "FILE", required_unless_present = "raster", conflicts_with = "raster")]
    pub train: Option<PathBuf>,

    /// Precomputed label raster CSV (integers, one raster row per line).
    #[arg(long, value_name = "FILE")]
    pub raster: Option<PathBuf>,

    #[arg(long)]
    pub header: bool,

    #[arg(long, default_value_t = 5)]
    pub k: usize,

    #[arg(long, default_value_t = 512)]
    pub resolution: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,

    /// Also write the boundary points as CSV.
    #[arg(long, value_name = "FILE")]
    pub boundary_out: Option<PathBuf>,

    /// Also write the predicted label raster as CSV.
    #[arg(long, value_name = "FILE")]
    pub raster_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// `desk` (helix1d, sphere, affine) or `full` (every manifold).
    #[arg(long, default_value = "desk")]
    pub suite: String,

    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub n: Vec<usize>,

    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub noise: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "edcf,dcf,twonn,mle")]
    pub methods: Vec<Method>,

    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub cache: CacheArgs,

    /// Write the CSV table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
