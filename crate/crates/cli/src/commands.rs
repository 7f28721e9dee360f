use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use dimgrid::bounds::{lmu_table, BoundsTable};
use dimgrid::datagen::{
    gen_circles, gen_hypersphere, gen_ifs, gen_ifs_labeled, gen_manifold, gen_sinusoids, AffineIfs, CircleKind,
    CircleParams, Manifold, ManifoldSpec, SinusoidParams,
};
use dimgrid::estimators::reference::{generate_reference_model, ReferenceCache, ReferenceKey, ReferenceRequest};
use dimgrid::estimators::{
    estimate, DcfOptions, EdcfOptions, EstimateOptions, EstimateReport, Method, NoiseSource, DEFAULT_EDCF_D_MAX,
};
use dimgrid::fractal::{boundary_report_with, extract_boundary, knn_label_grid_with, BoundaryReport, LabelRaster};
use dimgrid::render::decimal_sig;
use dimgrid::{exec, Engine, Execution, IpRange, LabeledCloud, PointCloud, VERSION};

use crate::args::{
    BenchmarkArgs, BoundaryArgs, BoundsArgs, CacheArgs, CalibrateArgs, Cli, Command, EstimateArgs, GenerateArgs,
};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

impl Timing {
    fn since(start: Instant) -> Self {
        Self {
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Dispatches a parsed command line, writing its report.
pub fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Estimate(a) => {
            let out = cmd_estimate(&a, exec)?;
            write_json(a.out.as_deref(), &out)
        }
        Command::Bounds(a) => {
            let table = cmd_bounds(&a)?;
            if a.json {
                write_json(None, &table.rendered())
            } else {
                write_text(None, &render_bounds_text(&table))
            }
        }
        Command::Calibrate(a) => {
            let out = cmd_calibrate(&a, exec)?;
            write_json(None, &out)
        }
        Command::Generate(a) => cmd_generate(&a),
        Command::Boundary(a) => {
            let out = cmd_boundary(&a, exec)?;
            write_json(a.report.as_deref(), &out)
        }
        Command::Benchmark(a) => {
            let rows = cmd_benchmark(&a, exec)?;
            write_text(a.out.as_deref(), &BenchmarkRow::to_csv(&rows))
        }
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p.display(), e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let target = path.map_or("stdout".into(), |p| p.display().to_string());
    let mut w = writer(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(target, e))
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// Reads a point-cloud CSV; any failure to read or parse it is an I/O error.
pub fn read_cloud(path: &Path, header: bool) -> Result<PointCloud> {
    let f = File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    PointCloud::read_csv(BufReader::new(f), header).map_err(|e| CliError::io(path.display(), e))
}

fn read_labeled(path: &Path, header: bool) -> Result<LabeledCloud> {
    let f = File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    LabeledCloud::read_csv(BufReader::new(f), header).map_err(|e| CliError::io(path.display(), e))
}

/// Opens the configured cache, or an in-memory one when no path is set.
pub fn open_cache(args: &CacheArgs) -> Result<ReferenceCache> {
    match &args.cache {
        Some(p) => ReferenceCache::open(p, args.read_only_cache).map_err(|e| CliError::io(p.display(), e)),
        None => Ok(ReferenceCache::in_memory()),
    }
}

/// Estimation settings shared by the CLI and the bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub method: Method,
    pub ip_range: Option<(f64, f64)>,
    pub base_target: f64,
    pub d_max: Option<usize>,
    pub engine: Engine,
    /// Fixed calibration noise; estimated from the data when `None`.
    pub noise: Option<f64>,
    pub mle_k: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            method: Method::Edcf,
            ip_range: None,
            base_target: dimgrid::estimators::DEFAULT_BASE_TARGET,
            d_max: None,
            engine: Engine::Auto,
            noise: None,
            mle_k: dimgrid::estimators::DEFAULT_MLE_K,
            seed: 0,
            exec: Execution::Parallel,
        }
    }
}

impl EstimateConfig {
    pub fn from_args(a: &EstimateArgs, exec: Execution) -> Self {
        Self {
            method: a.method,
            ip_range: a.ip_min.zip(a.ip_max),
            base_target: a.base_target,
            d_max: a.d_max,
            engine: a.engine,
            noise: a.noise,
            mle_k: a.mle_k,
            seed: a.seed,
            exec,
        }
    }

    /// Checks the settings and builds the estimator options.
    pub fn options(&self) -> Result<EstimateOptions> {
        let ip_range = self.ip_range.map(|(lo, hi)| IpRange::new(lo, hi)).transpose()?;
        if !(self.base_target > 0.0 && self.base_target <= 100.0) {
            return Err(CliError::Config(format!("base target must lie in (0, 100], got {}", self.base_target)));
        }
        if let Some(s) = self.noise {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(CliError::Config(format!("noise must be ≥ 0, got {s}")));
            }
        }
        if self.mle_k == 0 {
            return Err(CliError::Config("mle-k must be at least 1".into()));
        }
        let mut dcf = DcfOptions {
            d_max: self.d_max,
            engine: self.engine,
            exec: self.exec,
            ..DcfOptions::default()
        };
        if let Some(r) = ip_range {
            dcf.ip_range = r;
        }
        let edcf = EdcfOptions {
            ip_range,
            base_target: self.base_target,
            d_max: self.d_max.unwrap_or(DEFAULT_EDCF_D_MAX),
            noise: self.noise.map_or(NoiseSource::default(), NoiseSource::Fixed),
            engine: self.engine,
            exec: self.exec,
        };
        Ok(EstimateOptions {
            dcf,
            edcf,
            mle_k: Some(self.mle_k),
            discard_fraction: None,
            exec: self.exec,
        })
    }
}

pub fn run_estimate(cloud: &PointCloud, config: &EstimateConfig, cache: &ReferenceCache) -> Result<EstimateReport> {
    let options = config.options()?;
    Ok(estimate(config.method, cloud, &options, Some(cache))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateOutput {
    pub version: &'static str,
    pub seed: u64,
    pub input: PathBuf,
    #[serde(flatten)]
    pub report: EstimateReport,
    pub timing: Timing,
}

pub fn cmd_estimate(a: &EstimateArgs, exec: Execution) -> Result<EstimateOutput> {
    let start = Instant::now();
    let config = EstimateConfig::from_args(a, exec);
    config.options()?;
    let cloud = read_cloud(&a.input, a.header)?;
    let cache = open_cache(&a.cache)?;
    let report = run_estimate(&cloud, &config, &cache)?;
    Ok(EstimateOutput {
        version: VERSION,
        seed: a.seed,
        input: a.input.clone(),
        report,
        timing: Timing::since(start),
    })
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<BoundsTable> {
    const MAX_AMBIENT: usize = 64;
    if a.ambient > MAX_AMBIENT {
        return Err(CliError::Config(format!("ambient dimension above {MAX_AMBIENT}")));
    }
    Ok(lmu_table(a.ambient))
}

/// Text table with six significant digits per value.
pub fn render_bounds_text(table: &BoundsTable) -> String {
    const DIGITS: usize = 6;
    let mut out = format!("n = {}\n{:>3}  {:>10}  {:>10}  {:>10}\n", table.n, "m", "lower", "middle", "upper");
    for r in &table.rows {
        out.push_str(&format!(
            "{:>3}  {:>10}  {:>10}  {:>10}\n",
            r.m,
            decimal_sig(&r.lower, DIGITS),
            decimal_sig(&r.middle, DIGITS),
            decimal_sig(&r.upper, DIGITS)
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrateOutput {
    pub version: &'static str,
    pub seed: u64,
    pub key: ReferenceKey,
    pub anchors: Vec<f64>,
    pub from_cache: bool,
    pub cache: Option<PathBuf>,
    pub cache_entries: usize,
    pub timing: Timing,
}

pub fn cmd_calibrate(a: &CalibrateArgs, exec: Execution) -> Result<CalibrateOutput> {
    let start = Instant::now();
    if a.d == 0 || a.n == 0 {
        return Err(CliError::Config("--d and --n must be positive".into()));
    }
    let edcf = EdcfOptions {
        base_target: a.base_target,
        ..EdcfOptions::default()
    };
    let request = ReferenceRequest {
        n_points: a.n,
        d: a.d,
        d_max: a.d_max,
        ip_range: edcf.ip_range_for(a.d)?,
        sigma: a.noise,
    };
    let cache = open_cache(&a.cache)?;
    let outcome = generate_reference_model(&request, Some(&cache), exec)?;
    if let Some(e) = outcome.cache_error {
        return Err(e.into());
    }
    Ok(CalibrateOutput {
        version: VERSION,
        seed: a.seed,
        key: outcome.model.key,
        anchors: outcome.model.anchors,
        from_cache: outcome.from_cache,
        cache: cache.path().map(Path::to_path_buf),
        cache_entries: cache.len(),
        timing: Timing::since(start),
    })
}

/// A synthetic dataset, with or without class labels.
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Plain(PointCloud),
    Labeled(LabeledCloud),
}

fn ifs_preset(name: &str) -> Option<AffineIfs> {
    match name {
        "fern" | "barnsley-fern" => Some(AffineIfs::barnsley_fern()),
        "carpet" | "sierpinski-carpet" => Some(AffineIfs::sierpinski_carpet()),
        "triangle" | "sierpinski-triangle" => Some(AffineIfs::sierpinski_triangle()),
        _ => None,
    }
}

/// Builds the dataset named by `a.generator`; `a.out` is ignored.
pub fn generate(a: &GenerateArgs) -> Result<Generated> {
    let name = a.generator.to_ascii_lowercase();
    const IFS_POINTS: usize = 100_000;
    const MANIFOLD_POINTS: usize = 1000;
    if let Some(ifs) = ifs_preset(&name) {
        let n = a.n.unwrap_or(IFS_POINTS);
        return Ok(match a.background {
            Some(bg) => Generated::Labeled(gen_ifs_labeled(&ifs, n, bg, a.seed)?),
            None => Generated::Plain(gen_ifs(&ifs, n, a.seed, a.burn_in)?),
        });
    }
    let circles = |kind| -> Result<Generated> {
        let mut p = CircleParams::preset(kind);
        p.points_per_class = a.n.unwrap_or(p.points_per_class);
        if let Some(rate) = a.noise {
            p.noise_rate = rate;
        }
        Ok(Generated::Labeled(gen_circles(&p, a.seed)?))
    };
    let n = a.n.unwrap_or(MANIFOLD_POINTS);
    match name.as_str() {
        "circles-concentric" | "ccd" => circles(CircleKind::Concentric),
        "circles-overlapping" | "occd" => circles(CircleKind::Overlapping),
        "sinusoids" => {
            let mut p = SinusoidParams::default();
            p.points_per_curve = a.n.unwrap_or(p.points_per_curve);
            if let Some(rate) = a.noise {
                p.noise_rate = rate;
            }
            Ok(Generated::Labeled(gen_sinusoids(&p, a.seed)?))
        }
        "hypersphere" => {
            let m = a.intrinsic.unwrap_or(2);
            Ok(Generated::Plain(gen_hypersphere(m, n, a.noise.unwrap_or(0.0), a.seed)?))
        }
        _ => {
            let manifold = Manifold::from_str(&a.generator)?;
            let mut spec = ManifoldSpec::benchmark(manifold, n, a.noise.unwrap_or(0.0), a.seed);
            spec.intrinsic = a.intrinsic.unwrap_or(spec.intrinsic);
            spec.ambient = a.ambient.unwrap_or(spec.ambient.max(spec.intrinsic));
            Ok(Generated::Plain(gen_manifold(&spec)?))
        }
    }
}

/// Writes the generated dataset as CSV (labels, when present, last).
pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let data = generate(a)?;
    let target = a.out.as_ref().map_or("stdout".into(), |p| p.display().to_string());
    let mut w = writer(a.out.as_deref())?;
    let written = match &data {
        Generated::Plain(c) => c.write_csv(&mut w),
        Generated::Labeled(c) => c.write_csv(&mut w),
    };
    written.map_err(|e| CliError::io(&target, e))?;
    w.flush().map_err(|e| CliError::io(target, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryOutput {
    pub version: &'static str,
    pub seed: u64,
    pub k: Option<usize>,
    pub resolution: usize,
    #[serde(flatten)]
    pub report: BoundaryReport,
    pub timing: Timing,
}

pub fn cmd_boundary(a: &BoundaryArgs, exec: Execution) -> Result<BoundaryOutput> {
    let start = Instant::now();
    let (raster, train) = match (&a.train, &a.raster) {
        (Some(path), _) => {
            let train = read_labeled(path, a.header)?;
            (knn_label_grid_with(&train, a.k, a.resolution, exec)?, Some(train))
        }
        (None, Some(path)) => {
            let f = File::open(path).map_err(|e| CliError::io(path.display(), e))?;
            let raster = LabelRaster::read_csv(BufReader::new(f)).map_err(|e| CliError::io(path.display(), e))?;
            (raster, None)
        }
        (None, None) => return Err(CliError::Config("either --train or --raster is required".into())),
    };
    if let Some(p) = &a.raster_out {
        let mut w = writer(Some(p))?;
        raster.write_csv(&mut w).map_err(|e| CliError::io(p.display(), e))?;
        w.flush().map_err(|e| CliError::io(p.display(), e))?;
    }
    let boundary = extract_boundary(&raster)?;
    if let Some(p) = &a.boundary_out {
        let mut w = writer(Some(p))?;
        boundary.write_csv(&mut w).map_err(|e| CliError::io(p.display(), e))?;
        w.flush().map_err(|e| CliError::io(p.display(), e))?;
    }
    let report = boundary_report_with(&boundary, train.as_ref(), exec)?;
    Ok(BoundaryOutput {
        version: VERSION,
        seed: a.seed,
        k: train.is_some().then_some(a.k),
        resolution: raster.width.max(raster.height),
        report,
        timing: Timing::since(start),
    })
}

/// One `(manifold, N, noise, method)` cell of a benchmark, or the `all` row
/// pooling every manifold for a method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub manifold: String,
    pub intrinsic: usize,
    pub ambient: usize,
    pub n: usize,
    pub noise: f64,
    pub method: Method,
    pub runs: usize,
    /// Mean |m̂ − m|.
    pub mae: f64,
    /// Mean m̂ − m.
    pub bias: f64,
    /// Percentage of runs with m̂ = m.
    pub exact_pct: f64,
}

impl BenchmarkRow {
    fn from_errors(manifold: String, dims: (usize, usize), n: usize, noise: f64, method: Method, errors: &[i64]) -> Self {
        let runs = errors.len().max(1) as f64;
        Self {
            manifold,
            intrinsic: dims.0,
            ambient: dims.1,
            n,
            noise,
            method,
            runs: errors.len(),
            mae: errors.iter().map(|e| e.abs() as f64).sum::<f64>() / runs,
            bias: errors.iter().sum::<i64>() as f64 / runs,
            exact_pct: 100.0 * errors.iter().filter(|&&e| e == 0).count() as f64 / runs,
        }
    }

    pub fn to_csv(rows: &[BenchmarkRow]) -> String {
        let mut out = String::from("manifold,intrinsic,ambient,n,noise,method,runs,mae,bias,exact_pct\n");
        for r in rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:.4},{:.4},{:.2}\n",
                r.manifold, r.intrinsic, r.ambient, r.n, r.noise, r.method, r.runs, r.mae, r.bias, r.exact_pct
            ));
        }
        out
    }
}

fn suite(name: &str) -> Result<Vec<Manifold>> {
    match name {
        "desk" => Ok(vec![Manifold::Helix1d, Manifold::Sphere, Manifold::Affine]),
        "full" => Ok(Manifold::ALL.to_vec()),
        other => Err(CliError::Config(format!("unknown suite `{other}` (desk, full)"))),
    }
}

/// Seed of one benchmark run, decorrelated from its neighbors.
fn job_seed(base: u64, job: usize) -> u64 {
    let mut z = base ^ (job as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs every `(manifold, N, noise)` cell `repeats` times with independent
/// seeds. Runs are spread over the thread pool; each row aggregates one cell
/// and method, followed by one `all` row per `(N, noise, method)`.
pub fn cmd_benchmark(a: &BenchmarkArgs, exec: Execution) -> Result<Vec<BenchmarkRow>> {
    let manifolds = suite(&a.suite)?;
    if a.repeats == 0 || a.n.is_empty() || a.noise.is_empty() || a.methods.is_empty() {
        return Err(CliError::Config("repeats, n, noise and methods must be non-empty".into()));
    }
    if let Some(bad) = a.noise.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(CliError::Config(format!("noise must be ≥ 0, got {bad}")));
    }
    let cache = open_cache(&a.cache)?;
    let options = EstimateConfig {
        exec,
        ..EstimateConfig::default()
    }
    .options()?;

    let mut cells = Vec::new();
    for &n in &a.n {
        for &noise in &a.noise {
            for &m in &manifolds {
                cells.push((m, n, noise));
            }
        }
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..a.repeats).map(move |r| (c, r)))
        .collect();
    let outcomes = exec::map_slice(exec, &jobs, |&(c, r)| -> Result<Vec<i64>> {
        let (manifold, n, noise) = cells[c];
        let spec = ManifoldSpec::benchmark(manifold, n, noise, job_seed(a.seed, c * a.repeats + r));
        let cloud = gen_manifold(&spec)?;
        a.methods
            .iter()
            .map(|&method| {
                let report = estimate(method, &cloud, &options, Some(&cache))?;
                Ok(report.m_hat as i64 - spec.intrinsic as i64)
            })
            .collect()
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (c, &(manifold, n, noise)) in cells.iter().enumerate() {
        for (mi, &method) in a.methods.iter().enumerate() {
            let errors: Vec<i64> = (0..a.repeats).map(|r| outcomes[c * a.repeats + r][mi]).collect();
            rows.push(BenchmarkRow::from_errors(
                manifold.benchmark_id().to_string(),
                manifold.default_dims(),
                n,
                noise,
                method,
                &errors,
            ));
        }
    }
    for &n in &a.n {
        for &noise in &a.noise {
            for (mi, &method) in a.methods.iter().enumerate() {
                let errors: Vec<i64> = jobs
                    .iter()
                    .zip(&outcomes)
                    .filter(|((c, _), _)| cells[*c].1 == n && cells[*c].2 == noise)
                    .map(|(_, errs)| errs[mi])
                    .collect();
                rows.push(BenchmarkRow::from_errors("all".into(), (0, 0), n, noise, method, &errors));
            }
        }
    }
    Ok(rows)
}
