//! eDCF: neighbor counts scored against empirical anchors measured on
//! calibration spheres of matching size and noise, dimension = rounded
//! weighted mean of the normalized weights.

use super::membership::{MembershipAnchors, WeightVector};
use super::noise::NoiseSource;
use super::reference::{generate_reference_model, ReferenceCache, ReferenceRequest};
use super::{EstimateReport, Method};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gridding::{find_spacing_with, normalize_or_collapse, snap_to_grid_with, IpRange};
use crate::neighborhood::{connectivity_factor, count_neighbors_with, Engine};

pub const DEFAULT_BASE_TARGET: f64 = 50.0;
pub const DEFAULT_EDCF_D_MAX: usize = 50;

/// Half-width of the adaptive IP window. Neighbor counts in the saturated
/// high-dimensional regime track the number of occupied cells, so data and
/// calibration spheres must land at nearly the same IP to be comparable.
pub const EDCF_HALF_WIDTH: f64 = 0.5;

pub(crate) fn edcf_window(target: f64) -> Result<IpRange> {
    IpRange::new(target - EDCF_HALF_WIDTH, (target + EDCF_HALF_WIDTH).min(100.0))
}

/// `min(95, base_target + 3·√n)` for ambient dimension `n`.
pub fn adaptive_target(base_target: f64, n: usize) -> f64 {
    (base_target + 3.0 * (n as f64).sqrt()).min(95.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdcfOptions {
    /// Explicit IP range; the adaptive target ±`EDCF_HALF_WIDTH` when `None`.
    pub ip_range: Option<IpRange>,
    pub base_target: f64,
    pub d_max: usize,
    pub noise: NoiseSource,
    pub engine: Engine,
    pub exec: Execution,
}

impl Default for EdcfOptions {
    fn default() -> Self {
        Self {
            ip_range: None,
            base_target: DEFAULT_BASE_TARGET,
            d_max: DEFAULT_EDCF_D_MAX,
            noise: NoiseSource::default(),
            engine: Engine::Auto,
            exec: Execution::default(),
        }
    }
}

impl EdcfOptions {
    pub fn ip_range_for(&self, ambient: usize) -> Result<IpRange> {
        match self.ip_range {
            Some(r) => IpRange::new(r.min, r.max),
            None => {
                if !(self.base_target > 0.0 && self.base_target <= 100.0) {
                    return Err(Error::InvalidArgument(format!(
                        "base target must lie in (0, 100], got {}",
                        self.base_target
                    )));
                }
                edcf_window(adaptive_target(self.base_target, ambient))
            }
        }
    }
}

/// Calibration spheres have diameter 2 and are normalized to the unit box, so
/// a noise level measured on the normalized data is doubled to express it in
/// sphere units.
const SPHERE_DIAMETER: f64 = 2.0;

/// Runs eDCF. `cache` may be `None` to always recompute the reference model.
///
/// An estimated noise level is measured on the normalized cloud and scaled to
/// calibration-sphere units; a fixed [`NoiseSource`] is taken to be in sphere
/// units already and used as is. When the cloud is too small for the noise
/// estimator, noise 0 is used with a warning.
pub fn edcf_estimate(cloud: &PointCloud, options: &EdcfOptions, cache: Option<&ReferenceCache>) -> Result<EstimateReport> {
    let exec = options.exec;
    let ambient = cloud.dim();
    let range = options.ip_range_for(ambient)?;
    let unit = normalize_or_collapse(cloud)?;
    let choice = find_spacing_with(&unit, range, exec)?;
    let grid = snap_to_grid_with(&unit, choice.spacing, exec)?;
    if grid.len() < 2 {
        return Ok(single_cell_report(cloud, options, range, choice.spacing, choice.achieved_ip));
    }

    let sigma = match options.noise {
        NoiseSource::Fixed(_) => options.noise.resolve(&unit, exec)?,
        NoiseSource::Estimate { .. } => match options.noise.resolve(&unit.dedup(), exec) {
            Ok(s) => SPHERE_DIAMETER * s,
            Err(Error::TooFewPoints { n, k }) => {
                log::warn!("noise estimate needs more than {k} distinct points, got {n}; using 0");
                0.0
            }
            Err(e) => return Err(e),
        },
    };

    let request = ReferenceRequest {
        n_points: cloud.len(),
        d: ambient,
        d_max: options.d_max,
        ip_range: range,
        sigma,
    };
    let reference = generate_reference_model(&request, cache, exec)?;

    let counts = count_neighbors_with(&grid, options.engine, exec);
    let cf = connectivity_factor(&counts).cf;
    let anchors = MembershipAnchors::empirical(reference.model.anchors);
    let weights = WeightVector::from_counts(&anchors, counts.counts.iter().map(|&c| c as f64));
    let zero = weights.is_zero();
    let estimate = if zero { 0.0 } else { weights.mean() };
    let m_hat = if zero {
        0
    } else {
        weights.rounded_mean().min(options.d_max)
    };
    Ok(EstimateReport {
        method: Method::Edcf,
        m_hat,
        estimate,
        weights: weights.normalized,
        cf: Some(cf),
        spacing: Some(choice.spacing),
        achieved_ip: Some(choice.achieved_ip),
        ip_target: Some(range.midpoint()),
        noise: Some(reference.model.key.noise_bucket),
        d_max: options.d_max,
        n_points: cloud.len(),
        ambient,
        low_confidence: zero || !choice.in_range,
    })
}

/// A cloud occupying one cell has no neighborhood to score: dimension 0.
fn single_cell_report(cloud: &PointCloud, options: &EdcfOptions, range: IpRange, spacing: f64, ip: f64) -> EstimateReport {
    let mut weights = vec![0.0; options.d_max + 1];
    weights[0] = 1.0;
    EstimateReport {
        method: Method::Edcf,
        m_hat: 0,
        estimate: 0.0,
        weights,
        cf: Some(if cloud.dim() == 0 { 1.0 } else { 0.0 }),
        spacing: Some(spacing),
        achieved_ip: Some(ip),
        ip_target: Some(range.midpoint()),
        noise: None,
        d_max: options.d_max,
        n_points: cloud.len(),
        ambient: cloud.dim(),
        low_confidence: true,
    }
}
