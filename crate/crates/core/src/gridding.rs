//! Global normalization, grid snapping, Information Percentage and the
//! spacing search.
//!
//! Cells are half-open boxes `[k·s, (k+1)·s)` per axis with the grid anchored
//! at the origin; a point's cell index is `⌊x/s⌋` (mathematical floor, so
//! `-0.3` lands in cell `-1` at `s = 0.5`). Cell identity is always the
//! integer index vector; representative coordinates `k·s + s/2` are derived
//! on demand and never compared for equality.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Per-feature minima and the shared scale used by [`normalize_global`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub minima: Vec<f64>,
    pub scale: f64,
}

/// Shifts every feature to start at zero and divides all of them by the
/// widest feature range, so the widest axis spans exactly `[0, 1]` and range
/// ratios between axes are preserved.
pub fn normalize_global(cloud: &PointCloud) -> Result<(PointCloud, NormalizationRecord)> {
    let bounds = cloud.bounds();
    let scale = bounds.iter().map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
    if scale <= 0.0 || !scale.is_finite() {
        return Err(Error::ZeroRange);
    }
    let minima: Vec<f64> = bounds.iter().map(|b| b.0).collect();
    let out = cloud.map_points(cloud.dim(), |p, o| {
        for ((o, &x), &lo) in o.iter_mut().zip(p).zip(&minima) {
            *o = ((x - lo) / scale).clamp(0.0, 1.0);
        }
    })?;
    Ok((out, NormalizationRecord { minima, scale }))
}

/// Like [`normalize_global`], but a cloud whose points all coincide collapses
/// to the origin instead of failing. Estimators use this so that a single
/// point (or `N` copies of one) is a valid, zero-dimensional input.
pub(crate) fn normalize_or_collapse(cloud: &PointCloud) -> Result<PointCloud> {
    if cloud.dim() == 0 {
        return Ok(cloud.clone());
    }
    match normalize_global(cloud) {
        Ok((c, _)) => Ok(c),
        Err(Error::ZeroRange) => PointCloud::new(vec![0.0; cloud.len() * cloud.dim()], cloud.dim()),
        Err(e) => Err(e),
    }
}

/// Target Information Percentage interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpRange {
    pub min: f64,
    pub max: f64,
}

impl IpRange {
    /// Default half-width used when a single target percentage is given.
    pub const HALF_WIDTH: f64 = 2.5;

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min <= max && max <= 100.0) {
            return Err(Error::InvalidRange { min, max });
        }
        Ok(Self { min, max })
    }

    /// `[target - HALF_WIDTH, target + HALF_WIDTH]`, clipped to `(0, 100]`.
    pub fn around(target: f64) -> Result<Self> {
        let min = (target - Self::HALF_WIDTH).max(f64::MIN_POSITIVE);
        let max = (target + Self::HALF_WIDTH).min(100.0);
        Self::new(min.min(max), max)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn contains(&self, ip: f64) -> bool {
        ip >= self.min && ip <= self.max
    }

    /// Distance from `ip` to the interval (0 inside).
    pub fn distance(&self, ip: f64) -> f64 {
        if ip < self.min {
            self.min - ip
        } else if ip > self.max {
            ip - self.max
        } else {
            0.0
        }
    }
}

/// Unique occupied cells of a cloud at a fixed spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedCloud {
    cells: Vec<i64>,
    multiplicities: Vec<usize>,
    dim: usize,
    spacing: f64,
    source_len: usize,
}

impl GriddedCloud {
    /// Builds a gridded cloud directly from distinct integer cell indices
    /// (each with multiplicity one).
    pub fn from_cells(cells: Vec<Vec<i64>>, dim: usize, spacing: f64) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let mut flat = Vec::with_capacity(cells.len() * dim);
        let mut seen = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: dim,
                    found: c.len(),
                });
            }
            if seen.insert(c.as_slice(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate cell {c:?}")));
            }
            flat.extend_from_slice(c);
        }
        let n = cells.len();
        Ok(Self {
            cells: flat,
            multiplicities: vec![1; n],
            dim,
            spacing,
            source_len: n,
        })
    }

    /// Number of unique representatives.
    pub fn len(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicities.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of raw points that were snapped.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn cell(&self, i: usize) -> &[i64] {
        &self.cells[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        (0..self.len()).map(move |i| self.cell(i))
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// `100 · |unique cells| / N`.
    pub fn achieved_ip(&self) -> f64 {
        100.0 * self.len() as f64 / self.source_len as f64
    }

    /// Center of cell `i`: `k·s + s/2` per axis.
    pub fn representative(&self, i: usize) -> Vec<f64> {
        self.cell(i)
            .iter()
            .map(|&k| k as f64 * self.spacing + 0.5 * self.spacing)
            .collect()
    }

    pub fn representatives(&self) -> PointCloud {
        if self.dim == 0 {
            return PointCloud::zero_dim(self.len()).expect("gridded cloud is non-empty");
        }
        let data: Vec<f64> = self
            .cells
            .iter()
            .map(|&k| k as f64 * self.spacing + 0.5 * self.spacing)
            .collect();
        PointCloud::new(data, self.dim).expect("cell centers are finite")
    }
}

#[inline]
fn cell_index(x: f64, spacing: f64) -> i64 {
    (x / spacing).floor() as i64
}

fn cell_indices(cloud: &PointCloud, spacing: f64, exec: Execution) -> Vec<i64> {
    let dim = cloud.dim();
    if dim == 0 {
        return Vec::new();
    }
    let per_point = exec::map_range(exec, cloud.len(), |i| {
        cloud
            .point(i)
            .iter()
            .map(|&x| cell_index(x, spacing))
            .collect::<Vec<_>>()
    });
    per_point.concat()
}

pub fn snap_to_grid(cloud: &PointCloud, spacing: f64) -> Result<GriddedCloud> {
    snap_to_grid_with(cloud, spacing, Execution::default())
}

/// Snaps every point to its cell and keeps unique cells in order of first
/// occurrence, with multiplicities.
pub fn snap_to_grid_with(cloud: &PointCloud, spacing: f64, exec: Execution) -> Result<GriddedCloud> {
    check_spacing(spacing)?;
    let dim = cloud.dim();
    let n = cloud.len();
    if dim == 0 {
        return Ok(GriddedCloud {
            cells: Vec::new(),
            multiplicities: vec![n],
            dim,
            spacing,
            source_len: n,
        });
    }
    let raw = cell_indices(cloud, spacing, exec);
    let mut index: HashMap<&[i64], usize> = HashMap::with_capacity(n);
    let mut cells = Vec::new();
    let mut multiplicities = Vec::new();
    for key in raw.chunks_exact(dim) {
        match index.get(key) {
            Some(&j) => multiplicities[j] += 1,
            None => {
                index.insert(key, multiplicities.len());
                cells.extend_from_slice(key);
                multiplicities.push(1);
            }
        }
    }
    Ok(GriddedCloud {
        cells,
        multiplicities,
        dim,
        spacing,
        source_len: n,
    })
}

pub fn information_percentage(cloud: &PointCloud, spacing: f64) -> Result<f64> {
    information_percentage_with(cloud, spacing, Execution::default())
}

/// `100 · |unique cells| / N` without materializing the gridded cloud.
pub fn information_percentage_with(cloud: &PointCloud, spacing: f64, exec: Execution) -> Result<f64> {
    check_spacing(spacing)?;
    if cloud.dim() == 0 {
        return Ok(100.0 / cloud.len() as f64);
    }
    let raw = cell_indices(cloud, spacing, exec);
    let unique: std::collections::HashSet<&[i64]> = raw.chunks_exact(cloud.dim()).collect();
    Ok(100.0 * unique.len() as f64 / cloud.len() as f64)
}

fn check_spacing(spacing: f64) -> Result<()> {
    if spacing > 0.0 && spacing.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("spacing must be positive, got {spacing}")))
    }
}

/// Outcome of [`find_spacing`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingChoice {
    pub spacing: f64,
    pub achieved_ip: f64,
    /// False when no probed spacing landed inside the target range and the
    /// closest one was returned instead.
    pub in_range: bool,
}

const COARSE_DIVISOR: f64 = 5.0;
const COARSE_STEPS: usize = 40;
const FINE_STEPS: usize = 60;

pub fn find_spacing(cloud: &PointCloud, range: IpRange) -> Result<SpacingChoice> {
    find_spacing_with(cloud, range, Execution::default())
}

/// Two-phase search for a spacing whose IP lies in `range`.
///
/// The coarse phase starts at `s = 1` and divides by 5 until the IP reaches
/// `range.min` (at most 40 steps); the fine phase bisects between the last two
/// coarse spacings (at most 60 steps). IP is a step function of `s`, so the
/// range may be unattainable: the probed spacing with IP closest to the range
/// is returned then, with `in_range = false`. The cloud is expected to lie in
/// the unit box.
pub fn find_spacing_with(cloud: &PointCloud, range: IpRange, exec: Execution) -> Result<SpacingChoice> {
    IpRange::new(range.min, range.max)?;
    let ip_at = |s: f64| information_percentage_with(cloud, s, exec);

    let mut best = Candidate::new(1.0, ip_at(1.0)?, range);
    let mut coarse = best;
    let mut previous = None;
    for _ in 0..COARSE_STEPS {
        if coarse.ip >= range.min {
            break;
        }
        previous = Some(coarse);
        let s = coarse.spacing / COARSE_DIVISOR;
        coarse = Candidate::new(s, ip_at(s)?, range);
        best = best.closer(coarse);
    }
    if best.distance == 0.0 {
        return Ok(best.choice(true));
    }
    // `coarse` is the first spacing reaching ip_min (or the last one tried);
    // `previous` is the larger spacing before it.
    let Some(previous) = previous else {
        return Ok(best.choice(false));
    };
    if coarse.ip < range.min {
        return Ok(best.choice(false));
    }

    let (mut low, mut high) = (coarse.spacing, previous.spacing);
    for _ in 0..FINE_STEPS {
        let mid = 0.5 * (low + high);
        if mid <= low || mid >= high {
            break;
        }
        let c = Candidate::new(mid, ip_at(mid)?, range);
        best = best.closer(c);
        if c.distance == 0.0 {
            return Ok(c.choice(true));
        }
        if c.ip > range.max {
            low = mid;
        } else {
            high = mid;
        }
    }
    Ok(best.choice(false))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    spacing: f64,
    ip: f64,
    distance: f64,
}

impl Candidate {
    fn new(spacing: f64, ip: f64, range: IpRange) -> Self {
        Self {
            spacing,
            ip,
            distance: range.distance(ip),
        }
    }

    fn closer(self, other: Self) -> Self {
        if other.distance < self.distance {
            other
        } else {
            self
        }
    }

    fn choice(self, in_range: bool) -> SpacingChoice {
        SpacingChoice {
            spacing: self.spacing,
            achieved_ip: self.ip,
            in_range,
        }
    }
}
