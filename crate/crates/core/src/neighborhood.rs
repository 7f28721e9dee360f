//! Moore-neighbor counting on gridded clouds and the Connectivity Factor.
//!
//! Two cells are neighbors when their integer indices differ by at most one on
//! every axis and are not identical; this is exactly Chebyshev distance `≤ s`
//! between cell centers, decided without floating comparisons.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::gridding::GriddedCloud;

const MAX_HASH_DIM: usize = 20;

/// Counting strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Hash when `3^n < N·n`, pairwise otherwise.
    #[default]
    Auto,
    /// Probe the `3^n − 1` neighbor cells of every representative in a hash index.
    Hash,
    /// Compare every pair of representatives.
    Pairwise,
}

impl Engine {
    /// Resolves `Auto` by comparing the `N·3^n` and `N²·n` cost models. A
    /// forced `Hash` above 20 dimensions also falls back to pairwise.
    pub fn resolve(self, points: usize, dim: usize) -> Engine {
        match self {
            Engine::Hash if dim > MAX_HASH_DIM => Engine::Pairwise,
            Engine::Auto => {
                let hash_cost = 3f64.powi(dim as i32);
                let pair_cost = points as f64 * dim as f64;
                if hash_cost < pair_cost {
                    Engine::Hash
                } else {
                    Engine::Pairwise
                }
            }
            e => e,
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Engine::Auto),
            "hash" => Ok(Engine::Hash),
            "pairwise" => Ok(Engine::Pairwise),
            other => Err(Error::InvalidArgument(format!("unknown engine `{other}`"))),
        }
    }
}

/// Occupied-neighbor count per unique representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborCounts {
    pub counts: Vec<u64>,
    pub dim: usize,
    pub spacing: f64,
}

impl NeighborCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        if self.counts.is_empty() {
            0.0
        } else {
            self.total() as f64 / self.counts.len() as f64
        }
    }
}

pub fn count_neighbors(grid: &GriddedCloud, engine: Engine) -> NeighborCounts {
    count_neighbors_with(grid, engine, Execution::default())
}

pub fn count_neighbors_with(grid: &GriddedCloud, engine: Engine, exec: Execution) -> NeighborCounts {
    let dim = grid.dim();
    let counts = if grid.len() < 2 || dim == 0 {
        vec![0; grid.len()]
    } else {
        match engine.resolve(grid.len(), dim) {
            Engine::Hash => hash_counts(grid, exec),
            _ => pairwise_counts(grid, exec),
        }
    };
    NeighborCounts {
        counts,
        dim,
        spacing: grid.spacing(),
    }
}

fn hash_counts(grid: &GriddedCloud, exec: Execution) -> Vec<u64> {
    let dim = grid.dim();
    let index: HashMap<&[i64], ()> = grid.cells().map(|c| (c, ())).collect();
    exec::map_range(exec, grid.len(), |i| {
        let cell = grid.cell(i);
        let mut offset = vec![-1i64; dim];
        let mut probe = vec![0i64; dim];
        let mut count = 0;
        loop {
            if offset.iter().any(|&o| o != 0) {
                for ((p, &c), &o) in probe.iter_mut().zip(cell).zip(&offset) {
                    *p = c + o;
                }
                if index.contains_key(probe.as_slice()) {
                    count += 1;
                }
            }
            if !advance(&mut offset) {
                break;
            }
        }
        count
    })
}

/// Steps an odometer over `{-1, 0, 1}^dim`; false once it wraps around.
fn advance(digits: &mut [i64]) -> bool {
    for d in digits.iter_mut() {
        if *d < 1 {
            *d += 1;
            return true;
        }
        *d = -1;
    }
    false
}

fn pairwise_counts(grid: &GriddedCloud, exec: Execution) -> Vec<u64> {
    let n = grid.len();
    exec::map_range(exec, n, |i| {
        let u = grid.cell(i);
        (0..n)
            .filter(|&j| j != i && is_adjacent(u, grid.cell(j)))
            .count() as u64
    })
}

#[inline]
pub(crate) fn is_adjacent(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(a, b)| (a - b).abs() <= 1)
}

/// All offsets in `{-1, 0, 1}^dim` except the zero vector, flattened.
pub fn moore_offsets(dim: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity((3usize.pow(dim as u32) - 1) * dim);
    let mut digits = vec![-1i64; dim];
    loop {
        if digits.iter().any(|&d| d != 0) {
            out.extend_from_slice(&digits);
        }
        if !advance(&mut digits) {
            break;
        }
    }
    out
}

/// Result of [`connectivity_factor`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityResult {
    pub cf: f64,
    pub total_interactions: u64,
    pub n: usize,
    pub point_count: usize,
}

impl ConnectivityResult {
    /// `total / (N·(3^n − 1))` as an exact rational; `1` when `n = 0`.
    pub fn cf_exact(&self) -> BigRational {
        if self.n == 0 {
            return BigRational::from_integer(1.into());
        }
        let denom = BigInt::from(self.point_count) * (BigInt::from(3).pow(self.n as u32) - 1);
        BigRational::new(BigInt::from(self.total_interactions), denom)
    }
}

/// Average fraction of present Moore neighbors.
pub fn connectivity_factor(counts: &NeighborCounts) -> ConnectivityResult {
    let total = counts.total();
    let point_count = counts.counts.len();
    let cf = if counts.dim == 0 {
        1.0
    } else if point_count == 0 {
        0.0
    } else {
        let slots = 3f64.powi(counts.dim as i32) - 1.0;
        total as f64 / (point_count as f64 * slots)
    };
    ConnectivityResult {
        cf,
        total_interactions: total,
        n: counts.dim,
        point_count,
    }
}

/// Re-expresses a CF measured in `m` dimensions as the CF of the same set
/// embedded axis-aligned in `n ≥ m` dimensions.
pub fn space_convert_cf(cf: f64, m: usize, n: usize) -> Result<f64> {
    if m > n {
        return Err(Error::domain(format!("m = {m} exceeds n = {n}")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    Ok(cf * (3f64.powi(m as i32) - 1.0) / (3f64.powi(n as i32) - 1.0))
}

/// Exact-rational form of [`space_convert_cf`].
pub fn space_convert_cf_exact(cf: &BigRational, m: usize, n: usize) -> Result<BigRational> {
    if m > n {
        return Err(Error::domain(format!("m = {m} exceeds n = {n}")));
    }
    if n == 0 {
        return Ok(BigRational::from_integer(1.into()));
    }
    let num = BigInt::from(3).pow(m as u32) - 1;
    let den = BigInt::from(3).pow(n as u32) - 1;
    Ok(cf * BigRational::new(num, den))
}
