//! Noise-level estimation for matching calibration spheres to the data.

use serde::{Deserialize, Serialize};

use super::baselines::kth_neighbor_distances;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Divisor applied to the median k-th neighbor distance.
pub const NOISE_CALIBRATION: f64 = 2.0;
pub const DEFAULT_NOISE_K: usize = 2;

/// Where the noise level comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseSource {
    /// Median k-th nearest-neighbor distance over [`NOISE_CALIBRATION`].
    Estimate { k: usize },
    /// Caller-supplied sigma, used verbatim.
    Fixed(f64),
}

impl Default for NoiseSource {
    fn default() -> Self {
        NoiseSource::Estimate { k: DEFAULT_NOISE_K }
    }
}

impl NoiseSource {
    pub fn resolve(self, cloud: &PointCloud, exec: Execution) -> Result<f64> {
        match self {
            NoiseSource::Fixed(sigma) if sigma >= 0.0 && sigma.is_finite() => Ok(sigma),
            NoiseSource::Fixed(sigma) => Err(Error::InvalidArgument(format!("noise must be ≥ 0, got {sigma}"))),
            NoiseSource::Estimate { k } => estimate_noise_with(cloud, k, exec),
        }
    }
}

pub fn estimate_noise(cloud: &PointCloud, k: usize) -> Result<f64> {
    estimate_noise_with(cloud, k, Execution::default())
}

/// Median distance from each point to its `k`-th nearest neighbor, divided by
/// [`NOISE_CALIBRATION`]. Duplicates count as neighbors at distance zero.
pub fn estimate_noise_with(cloud: &PointCloud, k: usize, exec: Execution) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be ≥ 1".into()));
    }
    if cloud.len() <= k {
        return Err(Error::TooFewPoints { n: cloud.len(), k });
    }
    let mut d = kth_neighbor_distances(cloud, k, exec);
    let mid = d.len() / 2;
    let (_, m, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    let mut median = *m;
    if d.len().is_multiple_of(2) {
        let below = d[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        median = 0.5 * (median + below);
    }
    Ok(median / NOISE_CALIBRATION)
}
