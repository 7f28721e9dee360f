//! Nearest-neighbor baselines: TWO-NN and the Levina–Bickel MLE.
//!
//! Both work on distance ratios only, so they are invariant under global
//! isotropic scaling. Exact duplicates are removed first.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

pub const DEFAULT_DISCARD_FRACTION: f64 = 0.1;
pub const DEFAULT_MLE_K: usize = 20;

const RATIO_TOLERANCE: f64 = 1e-9;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sorted distances from every point to its `k` nearest other points
/// (brute force). Row `i` holds `k` ascending distances.
pub fn knn_distances(cloud: &PointCloud, k: usize, exec: Execution) -> Vec<Vec<f64>> {
    let n = cloud.len();
    let k = k.min(n.saturating_sub(1));
    exec::map_range(exec, n, |i| {
        let p = cloud.point(i);
        let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| sq_dist(p, cloud.point(j))).collect();
        if k < d.len() {
            d.select_nth_unstable_by(k, f64::total_cmp);
            d.truncate(k);
        }
        d.sort_unstable_by(f64::total_cmp);
        d.into_iter().map(f64::sqrt).collect()
    })
}

pub(crate) fn kth_neighbor_distances(cloud: &PointCloud, k: usize, exec: Execution) -> Vec<f64> {
    knn_distances(cloud, k, exec)
        .into_iter()
        .map(|row| row[k - 1])
        .collect()
}

pub fn twonn_estimate(cloud: &PointCloud, discard_fraction: f64) -> Result<f64> {
    twonn_estimate_with(cloud, discard_fraction, Execution::default())
}

/// TWO-NN: with `μ = r2/r1` per point, `−log(1 − F(μ)) = d·log μ` for the
/// empirical CDF `F`. The largest `discard_fraction` of ratios are dropped
/// and `d` is fitted by least squares through the origin.
pub fn twonn_estimate_with(cloud: &PointCloud, discard_fraction: f64, exec: Execution) -> Result<f64> {
    if !(0.0..0.5).contains(&discard_fraction) {
        return Err(Error::InvalidArgument(format!(
            "discard fraction must lie in [0, 0.5), got {discard_fraction}"
        )));
    }
    let cloud = cloud.dedup();
    let n = cloud.len();
    if n < 3 {
        return Err(Error::TooFewPoints { n, k: 2 });
    }
    let mut mu = Vec::with_capacity(n);
    for row in knn_distances(&cloud, 2, exec) {
        if row[0] == 0.0 {
            return Err(Error::DegenerateDistances("zero nearest-neighbor distance".into()));
        }
        mu.push(row[1] / row[0]);
    }
    mu.sort_unstable_by(f64::total_cmp);
    let keep = ((n as f64) * (1.0 - discard_fraction)).floor() as usize;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    // F = i/n reaches 1 at the last ratio, which is never kept
    for (i, &m) in mu.iter().enumerate().take(keep.min(n - 1)) {
        let f = (i + 1) as f64 / n as f64;
        let x = m.ln();
        let y = -(1.0 - f).ln();
        sxy += x * y;
        sxx += x * x;
    }
    // An exact lattice has r2 = r1 everywhere and no dimension signal.
    if mu[..keep.min(n - 1)].iter().all(|&m| m - 1.0 <= RATIO_TOLERANCE) {
        return Err(Error::DegenerateDistances("all distance ratios equal 1".into()));
    }
    Ok(sxy / sxx)
}

pub fn mle_estimate(cloud: &PointCloud, k: usize) -> Result<f64> {
    mle_estimate_with(cloud, k, Execution::default())
}

/// Levina–Bickel: per point
/// `m_k(x) = [ 1/(k−1) · Σ_{j<k} log(T_k(x)/T_j(x)) ]^{−1}`, averaged over
/// all points.
pub fn mle_estimate_with(cloud: &PointCloud, k: usize, exec: Execution) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be ≥ 2, got {k}")));
    }
    let cloud = cloud.dedup();
    let n = cloud.len();
    if n <= k {
        return Err(Error::TooFewPoints { n, k });
    }
    let per_point: Vec<Result<f64>> = exec::map_slice(exec, &knn_distances(&cloud, k, exec), |t| {
        let tk = t[k - 1];
        if t[0] == 0.0 {
            return Err(Error::DegenerateDistances("zero nearest-neighbor distance".into()));
        }
        let s: f64 = t[..k - 1].iter().map(|tj| (tk / tj).ln()).sum();
        if s == 0.0 {
            return Err(Error::DegenerateDistances("k nearest neighbors equidistant".into()));
        }
        Ok((k - 1) as f64 / s)
    });
    let mut total = 0.0;
    for m in per_point {
        total += m?;
    }
    Ok(total / n as f64)
}
