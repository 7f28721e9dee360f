//! Binding layer for a host-language extension module.
//!
//! Everything here works on flat `f64` buffers plus a shape, which is what a
//! NumPy array hands over, and returns plain structs a wrapper converts to
//! dicts and tuples. No formula lives here: estimation, calibration and
//! generation go through the same functions the `dimgrid` binary calls, so a
//! given array and seed produce the same `m_hat` and bitwise-identical
//! weights as `dimgrid estimate` on the equivalent CSV.
//!
//! A wrapper should release the interpreter lock around each call; the core
//! holds no global state besides the reference cache, which is thread-safe.

use std::borrow::Cow;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dimgrid::estimators::{Method, DEFAULT_BASE_TARGET, DEFAULT_EDCF_D_MAX};
use dimgrid::{Execution, PointCloud};
use dimgrid_cli::args::{BoundsArgs, CacheArgs, CalibrateArgs, GenerateArgs};
use dimgrid_cli::{CliError, EstimateConfig, Generated};

pub use dimgrid_cli::CalibrateOutput;

/// Host exception class a failure should be raised as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad shapes, unknown names, out-of-range settings.
    Value,
    /// Filesystem failures (cache reads and writes).
    Os,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingError {
    pub kind: ErrorKind,
    pub message: String,
}

impl BindingError {
    fn value(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Value,
            message: message.into(),
        }
    }
}

impl fmt::Display for BindingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for BindingError {}

impl From<CliError> for BindingError {
    fn from(e: CliError) -> Self {
        let kind = match e {
            CliError::Io(_) => ErrorKind::Os,
            CliError::Config(_) => ErrorKind::Value,
        };
        let message = match e {
            CliError::Io(m) | CliError::Config(m) => m,
        };
        Self { kind, message }
    }
}

impl From<dimgrid::Error> for BindingError {
    fn from(e: dimgrid::Error) -> Self {
        CliError::from(e).into()
    }
}

pub type Result<T> = std::result::Result<T, BindingError>;

/// Row-major N×d view over host memory; borrowed when the host buffer is
/// contiguous, owned when the wrapper had to copy it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayView<'a> {
    data: Cow<'a, [f64]>,
    rows: usize,
    cols: usize,
}

impl<'a> ArrayView<'a> {
    /// `shape` must have exactly two entries whose product is `data.len()`.
    pub fn new(data: impl Into<Cow<'a, [f64]>>, shape: &[usize]) -> Result<Self> {
        let data = data.into();
        let &[rows, cols] = shape else {
            return Err(BindingError::value(format!("expected a 2-D array, got {} dimensions", shape.len())));
        };
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(BindingError::value(format!(
                "shape ({rows}, {cols}) does not match buffer of length {}",
                data.len()
            )));
        }
        Ok(Self { data, rows, cols })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn to_cloud(&self) -> Result<PointCloud> {
        if self.cols == 0 {
            return Ok(PointCloud::zero_dim(self.rows)?);
        }
        Ok(PointCloud::new(self.data.to_vec(), self.cols)?)
    }
}

/// Keyword arguments of `estimate`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateParams {
    pub method: String,
    pub ip_min: Option<f64>,
    pub ip_max: Option<f64>,
    pub d_max: Option<usize>,
    pub noise: Option<f64>,
    pub cache_path: Option<PathBuf>,
    pub seed: u64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            method: Method::Edcf.as_str().into(),
            ip_min: None,
            ip_max: None,
            d_max: None,
            noise: None,
            cache_path: None,
            seed: 0,
        }
    }
}

/// The mapping returned by `estimate`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub m_hat: usize,
    pub estimate: f64,
    pub weights: Vec<f64>,
    pub cf: Option<f64>,
    pub spacing: Option<f64>,
    pub ip: Option<f64>,
    pub seed: u64,
}

pub fn estimate(array: &ArrayView<'_>, params: &EstimateParams) -> Result<EstimateResult> {
    let method = Method::from_str(&params.method)?;
    let ip_range = match (params.ip_min, params.ip_max) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => return Err(BindingError::value("ip_min and ip_max must be given together")),
    };
    let config = EstimateConfig {
        method,
        ip_range,
        d_max: params.d_max,
        noise: params.noise,
        seed: params.seed,
        exec: Execution::Parallel,
        ..EstimateConfig::default()
    };
    let cloud = array.to_cloud()?;
    let cache = dimgrid_cli::open_cache(&CacheArgs {
        cache: params.cache_path.clone(),
        read_only_cache: false,
    })?;
    let report = dimgrid_cli::run_estimate(&cloud, &config, &cache)?;
    Ok(EstimateResult {
        m_hat: report.m_hat,
        estimate: report.estimate,
        weights: report.weights,
        cf: report.cf,
        spacing: report.spacing,
        ip: report.achieved_ip,
        seed: params.seed,
    })
}

/// `(m, lower, middle, upper)` rows as decimal strings, identical to the
/// JSON form of `dimgrid bounds`.
pub fn bounds(n: i64) -> Result<Vec<(usize, String, String, String)>> {
    let n = usize::try_from(n).map_err(|_| BindingError::value(format!("n must be non-negative, got {n}")))?;
    Ok(dimgrid_cli::cmd_bounds(&BoundsArgs { ambient: n, json: true })?
        .rendered()
        .rows
        .into_iter()
        .map(|r| (r.m, r.lower, r.middle, r.upper))
        .collect())
}

/// Keyword arguments of `calibrate`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrateParams {
    pub d: usize,
    pub n: usize,
    pub d_max: usize,
    pub noise: f64,
    pub cache_path: Option<PathBuf>,
    pub seed: u64,
}

impl CalibrateParams {
    pub fn new(d: usize, n: usize) -> Self {
        Self {
            d,
            n,
            d_max: DEFAULT_EDCF_D_MAX,
            noise: 0.0,
            cache_path: None,
            seed: 0,
        }
    }
}

pub fn calibrate(params: &CalibrateParams) -> Result<CalibrateOutput> {
    let args = CalibrateArgs {
        d: params.d,
        d_max: params.d_max,
        n: params.n,
        noise: params.noise,
        base_target: DEFAULT_BASE_TARGET,
        seed: params.seed,
        cache: CacheArgs {
            cache: params.cache_path.clone(),
            read_only_cache: false,
        },
    };
    Ok(dimgrid_cli::cmd_calibrate(&args, Execution::Parallel)?)
}

/// Keyword arguments of `generate`; `None` picks the generator's default.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GenerateParams {
    pub n: Option<usize>,
    pub noise: Option<f64>,
    pub seed: u64,
    pub intrinsic: Option<usize>,
    pub ambient: Option<usize>,
}

/// A generated dataset as a flat row-major buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct OwnedArray {
    pub data: Vec<f64>,
    pub shape: (usize, usize),
    pub labels: Option<Vec<i64>>,
}

pub fn generate(name: &str, params: &GenerateParams) -> Result<OwnedArray> {
    let args = GenerateArgs {
        generator: name.into(),
        n: params.n,
        noise: params.noise,
        seed: params.seed,
        intrinsic: params.intrinsic,
        ambient: params.ambient,
        background: None,
        burn_in: dimgrid::datagen::DEFAULT_BURN_IN,
        out: None,
    };
    let (cloud, labels) = match dimgrid_cli::generate(&args)? {
        Generated::Plain(c) => (c, None),
        Generated::Labeled(l) => (l.cloud, Some(l.labels)),
    };
    Ok(OwnedArray {
        shape: (cloud.len(), cloud.dim()),
        data: cloud.as_flat().to_vec(),
        labels,
    })
}
