//! Dimension estimators: DCF (theoretical anchors, argmax), eDCF (empirical
//! anchors from calibration spheres, rounded weighted mean) and the TWO-NN /
//! MLE baselines.

mod baselines;
mod dcf;
mod edcf;
mod membership;
mod noise;
pub mod reference;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baselines::{
    knn_distances, mle_estimate, mle_estimate_with, twonn_estimate, twonn_estimate_with, DEFAULT_DISCARD_FRACTION,
    DEFAULT_MLE_K,
};
pub use dcf::{dcf_estimate, DcfOptions};
pub use edcf::{
    adaptive_target, edcf_estimate, EdcfOptions, DEFAULT_BASE_TARGET, DEFAULT_EDCF_D_MAX, EDCF_HALF_WIDTH,
};
pub use membership::{AnchorKind, MembershipAnchors, WeightVector};
pub use noise::{estimate_noise, estimate_noise_with, NoiseSource, DEFAULT_NOISE_K, NOISE_CALIBRATION};
pub use reference::{generate_reference_model, ReferenceCache, ReferenceKey, ReferenceModel, ReferenceRequest};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Edcf,
    Dcf,
    Twonn,
    Mle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Edcf, Method::Dcf, Method::Twonn, Method::Mle];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Edcf => "edcf",
            Method::Dcf => "dcf",
            Method::Twonn => "twonn",
            Method::Mle => "mle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

/// Outcome of any estimator. Grid fields are absent for the baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: Method,
    pub m_hat: usize,
    /// Unrounded estimate: the weighted mean for eDCF, the argmax for DCF,
    /// the fitted value for the baselines.
    pub estimate: f64,
    /// Normalized weights `π_0..=π_{D_max}`; empty for the baselines.
    pub weights: Vec<f64>,
    pub cf: Option<f64>,
    #[serde(rename = "s_star")]
    pub spacing: Option<f64>,
    #[serde(rename = "ip")]
    pub achieved_ip: Option<f64>,
    pub ip_target: Option<f64>,
    /// Calibration-sphere noise used by eDCF.
    pub noise: Option<f64>,
    pub d_max: usize,
    pub n_points: usize,
    pub ambient: usize,
    /// All weights were zero (eDCF) or the IP target was missed.
    pub low_confidence: bool,
}

impl EstimateReport {
    fn baseline(method: Method, estimate: f64, cloud: &PointCloud) -> Self {
        let m_hat = if estimate.is_finite() && estimate > 0.0 {
            estimate.round() as usize
        } else {
            0
        };
        Self {
            method,
            m_hat,
            estimate,
            weights: Vec::new(),
            cf: None,
            spacing: None,
            achieved_ip: None,
            ip_target: None,
            noise: None,
            d_max: cloud.dim(),
            n_points: cloud.len(),
            ambient: cloud.dim(),
            low_confidence: false,
        }
    }
}

/// Options for [`estimate`]; each method reads its own part.
#[derive(Debug, Clone, Default)]
pub struct EstimateOptions {
    pub dcf: DcfOptions,
    pub edcf: EdcfOptions,
    pub mle_k: Option<usize>,
    pub discard_fraction: Option<f64>,
    /// Execution policy of the baselines.
    pub exec: Execution,
}

/// Runs `method` on `cloud`.
pub fn estimate(
    method: Method,
    cloud: &PointCloud,
    options: &EstimateOptions,
    cache: Option<&ReferenceCache>,
) -> Result<EstimateReport> {
    match method {
        Method::Dcf => dcf_estimate(cloud, &options.dcf),
        Method::Edcf => edcf_estimate(cloud, &options.edcf, cache),
        Method::Twonn => {
            let frac = options.discard_fraction.unwrap_or(DEFAULT_DISCARD_FRACTION);
            Ok(EstimateReport::baseline(method, twonn_estimate_with(cloud, frac, options.exec)?, cloud))
        }
        Method::Mle => {
            let k = options.mle_k.unwrap_or(DEFAULT_MLE_K);
            Ok(EstimateReport::baseline(method, mle_estimate_with(cloud, k, options.exec)?, cloud))
        }
    }
}
