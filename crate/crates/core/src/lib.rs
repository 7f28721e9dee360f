//! Intrinsic dimension estimation from grid connectivity.
//!
//! Point clouds are normalized to the unit box, snapped to a uniform grid whose
//! spacing is chosen to retain a target *Information Percentage* (IP), and each
//! occupied cell counts its occupied Moore neighbors. The average fraction of
//! present neighbors is the *Connectivity Factor* (CF). Closed-form lower,
//! middle and upper CF values for an `m`-dimensional structure embedded in `n`
//! dimensions live in [`bounds`]; the DCF and eDCF estimators in
//! [`estimators`] turn per-cell neighbor counts into a dimension estimate.
//!
//! Supporting modules generate benchmark datasets ([`datagen`]), compute
//! baselines (TWO-NN, Levina–Bickel MLE) and run box-counting boundary
//! analyses ([`fractal`]).

pub mod bounds;
pub mod cloud;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod fractal;
pub mod gridding;
pub mod neighborhood;
pub mod render;

pub use cloud::{LabeledCloud, PointCloud};
pub use error::{Error, Result};
pub use exec::Execution;
pub use gridding::{GriddedCloud, IpRange};
pub use neighborhood::{ConnectivityResult, Engine, NeighborCounts};

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
