//! DCF: per-cell neighbor counts scored against the theoretical anchors
//! `3^t − 1`, dimension = argmax of the summed memberships.

use super::membership::{MembershipAnchors, WeightVector};
use super::{EstimateReport, Method};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gridding::{find_spacing_with, normalize_or_collapse, snap_to_grid_with, IpRange};
use crate::neighborhood::{connectivity_factor, count_neighbors_with, Engine};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcfOptions {
    pub ip_range: IpRange,
    /// Largest candidate dimension; the ambient dimension when `None`.
    pub d_max: Option<usize>,
    pub engine: Engine,
    pub exec: Execution,
}

impl Default for DcfOptions {
    fn default() -> Self {
        Self {
            ip_range: IpRange { min: 45.0, max: 55.0 },
            d_max: None,
            engine: Engine::Auto,
            exec: Execution::default(),
        }
    }
}

pub fn dcf_estimate(cloud: &PointCloud, options: &DcfOptions) -> Result<EstimateReport> {
    let ambient = cloud.dim();
    let d_max = options.d_max.unwrap_or(ambient);
    if d_max > ambient {
        return Err(Error::InvalidArgument(format!(
            "d_max = {d_max} exceeds the ambient dimension {ambient}"
        )));
    }
    let exec = options.exec;
    let unit = normalize_or_collapse(cloud)?;
    let choice = find_spacing_with(&unit, options.ip_range, exec)?;
    let grid = snap_to_grid_with(&unit, choice.spacing, exec)?;
    let counts = count_neighbors_with(&grid, options.engine, exec);
    let cf = connectivity_factor(&counts).cf;

    let anchors = MembershipAnchors::theoretical(d_max);
    let weights = WeightVector::from_counts(&anchors, counts.counts.iter().map(|&c| c as f64));
    let m_hat = weights.argmax();
    Ok(EstimateReport {
        method: Method::Dcf,
        m_hat,
        estimate: m_hat as f64,
        weights: weights.normalized,
        cf: Some(cf),
        spacing: Some(choice.spacing),
        achieved_ip: Some(choice.achieved_ip),
        ip_target: Some(options.ip_range.midpoint()),
        noise: None,
        d_max,
        n_points: cloud.len(),
        ambient,
        low_confidence: !choice.in_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_lattice_in_3d() {
        let rows: Vec<[f64; 3]> = (0..15)
            .flat_map(|i| (0..15).map(move |j| [i as f64, j as f64, 0.0]))
            .collect();
        let c = PointCloud::from_rows(&rows).unwrap();
        let r = dcf_estimate(&c, &DcfOptions::default()).unwrap();
        assert_eq!(r.m_hat, 2, "{r:?}");
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_in_2d() {
        let rows: Vec<[f64; 2]> = (0..200).map(|i| [i as f64, 0.5 * i as f64]).collect();
        let c = PointCloud::from_rows(&rows).unwrap();
        assert_eq!(dcf_estimate(&c, &DcfOptions::default()).unwrap().m_hat, 1);
    }

    #[test]
    fn single_point_is_zero_dimensional() {
        let c = PointCloud::from_rows(&[[0.3, 4.0, -1.0]]).unwrap();
        let r = dcf_estimate(&c, &DcfOptions::default()).unwrap();
        assert_eq!(r.m_hat, 0);
        assert_eq!(r.weights, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn d_max_above_ambient_rejected() {
        let c = PointCloud::from_rows(&[[0.0, 1.0]]).unwrap();
        let o = DcfOptions {
            d_max: Some(3),
            ..DcfOptions::default()
        };
        assert!(dcf_estimate(&c, &o).is_err());
    }
}
