//! Empirical reference models: mean neighbor counts of gridded calibration
//! spheres `S^m`, `m = 0..=D_max`, and the on-disk cache that stores them.
//!
//! A model is a pure function of its [`ReferenceKey`]. Point counts and noise
//! levels are first snapped to their buckets, the calibration spheres are
//! generated at the bucket values with seeds derived from the key, so a cache
//! hit and a fresh computation always agree bit for bit.

use std::collections::HashMap;
use std::fs;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::datagen::gen_hypersphere;
use super::edcf::edcf_window;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::gridding::{find_spacing_with, normalize_or_collapse, snap_to_grid_with, IpRange};
use crate::neighborhood::{count_neighbors_with, Engine};

/// Noise buckets; a sigma maps to the nearest one on a log scale, with
/// anything below half the smallest positive bucket mapped to 0.
pub const NOISE_BUCKETS: [f64; 7] = [0.0, 0.001, 0.003, 0.01, 0.03, 0.1, 0.3];

pub const CACHE_VERSION: u32 = 1;

/// Environment variable naming the default cache file.
pub const CACHE_ENV: &str = "DIMGRID_CACHE";

/// Nearest power of two (on a log scale), at least 1.
pub fn n_bucket(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let lower = 1usize << (usize::BITS - 1 - n.leading_zeros());
    if lower == n {
        return n;
    }
    let upper = lower * 2;
    // compare n/lower with upper/n without rounding: n² vs lower·upper
    if (n as u128) * (n as u128) < (lower as u128) * (upper as u128) {
        lower
    } else {
        upper
    }
}

pub fn noise_bucket(sigma: f64) -> f64 {
    if !(sigma > NOISE_BUCKETS[1] / 2.0) {
        return 0.0;
    }
    let ls = sigma.ln();
    NOISE_BUCKETS[1..]
        .iter()
        .copied()
        .min_by(|a, b| (a.ln() - ls).abs().total_cmp(&(b.ln() - ls).abs()))
        .expect("non-empty")
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReferenceKey {
    /// Ambient dimension of the data being estimated.
    pub d: usize,
    pub d_max: usize,
    pub n_bucket: usize,
    pub noise_bucket: f64,
    /// Midpoint of the IP range the spheres are gridded at.
    pub ip_target: f64,
}

impl ReferenceKey {
    pub fn new(n_points: usize, d: usize, d_max: usize, ip_target: f64, sigma: f64) -> Self {
        Self {
            d,
            d_max,
            n_bucket: n_bucket(n_points),
            noise_bucket: noise_bucket(sigma),
            ip_target,
        }
    }

    fn bits(&self) -> (usize, usize, usize, u64, u64) {
        (
            self.d,
            self.d_max,
            self.n_bucket,
            self.noise_bucket.to_bits(),
            self.ip_target.to_bits(),
        )
    }

    /// Seed of the calibration sphere `S^m` for this key.
    pub fn sphere_seed(&self, m: usize) -> u64 {
        let (d, d_max, n, noise, ip) = self.bits();
        [d as u64, d_max as u64, n as u64, noise, ip, m as u64]
            .into_iter()
            .fold(0x243f_6a88_85a3_08d3, |h, v| splitmix(h ^ v))
    }

    /// Calibration spheres are gridded at `ip_target ± EDCF_HALF_WIDTH`.
    fn ip_range(&self) -> Result<IpRange> {
        edcf_window(self.ip_target)
    }
}

impl PartialEq for ReferenceKey {
    fn eq(&self, other: &Self) -> bool {
        self.bits() == other.bits()
    }
}

impl Eq for ReferenceKey {}

impl Hash for ReferenceKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits().hash(state);
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Anchors `μ_0..=μ_{D_max}` for one key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceModel {
    pub key: ReferenceKey,
    pub anchors: Vec<f64>,
}

/// Result of [`generate_reference_model`].
#[derive(Debug)]
pub struct ReferenceOutcome {
    pub model: ReferenceModel,
    pub from_cache: bool,
    /// Set when the model was computed but could not be persisted.
    pub cache_error: Option<Error>,
}

/// Parameters of a reference model request, before bucketing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRequest {
    pub n_points: usize,
    pub d: usize,
    pub d_max: usize,
    pub ip_range: IpRange,
    pub sigma: f64,
}

impl ReferenceRequest {
    pub fn key(&self) -> ReferenceKey {
        ReferenceKey::new(self.n_points, self.d, self.d_max, self.ip_range.midpoint(), self.sigma)
    }
}

pub fn generate_reference_model(
    request: &ReferenceRequest,
    cache: Option<&ReferenceCache>,
    exec: Execution,
) -> Result<ReferenceOutcome> {
    if request.sigma < 0.0 || !request.sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("noise must be ≥ 0, got {}", request.sigma)));
    }
    IpRange::new(request.ip_range.min, request.ip_range.max)?;
    let key = request.key();
    if let Some(anchors) = cache.and_then(|c| c.get(&key)) {
        return Ok(ReferenceOutcome {
            model: ReferenceModel { key, anchors },
            from_cache: true,
            cache_error: None,
        });
    }
    let anchors = compute_anchors(&key, exec)?;
    let cache_error = match cache {
        Some(c) => c.insert(key, anchors.clone()).err(),
        None => None,
    };
    if let Some(e) = &cache_error {
        log::warn!("reference cache not updated: {e}");
    }
    Ok(ReferenceOutcome {
        model: ReferenceModel { key, anchors },
        from_cache: false,
        cache_error,
    })
}

/// Builds the anchors from scratch, ignoring any cache.
pub fn compute_anchors(key: &ReferenceKey, exec: Execution) -> Result<Vec<f64>> {
    let range = key.ip_range()?;
    let per_m = exec::map_range(exec, key.d_max + 1, |m| sphere_mean_count(key, m, range, exec));
    per_m.into_iter().collect()
}

fn sphere_mean_count(key: &ReferenceKey, m: usize, range: IpRange, exec: Execution) -> Result<f64> {
    let sphere = gen_hypersphere(m, key.n_bucket, key.noise_bucket, key.sphere_seed(m))?;
    let unit = normalize_or_collapse(&sphere)?;
    let choice = find_spacing_with(&unit, range, exec)?;
    let grid = snap_to_grid_with(&unit, choice.spacing, exec)?;
    if grid.len() < 2 {
        return Ok(0.0);
    }
    Ok(count_neighbors_with(&grid, Engine::Auto, exec).mean())
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    entries: Vec<CacheEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: ReferenceKey,
    anchors: Vec<f64>,
}

/// Shared store of reference models, optionally backed by a JSON file.
///
/// Concurrent misses on the same key may both compute it; the results are
/// identical, so the last write simply wins.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    path: Option<PathBuf>,
    read_only: bool,
    entries: Mutex<HashMap<ReferenceKey, Vec<f64>>>,
}

impl ReferenceCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path` if it exists. With `read_only`, misses are computed but
    /// never written back.
    pub fn open(path: impl Into<PathBuf>, read_only: bool) -> Result<Self> {
        let path = path.into();
        let entries = match fs::read(&path) {
            Ok(bytes) => {
                let file: CacheFile = serde_json::from_slice(&bytes)?;
                if file.version != CACHE_VERSION {
                    return Err(Error::InvalidArgument(format!(
                        "cache version {} is not {CACHE_VERSION}",
                        file.version
                    )));
                }
                file.entries.into_iter().map(|e| (e.key, e.anchors)).collect()
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => HashMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            path: Some(path),
            read_only,
            entries: Mutex::new(entries),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn is_read_only(&self) -> bool {
        self.read_only
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &ReferenceKey) -> Option<Vec<f64>> {
        self.lock().get(key).cloned()
    }

    /// All stored models, in a stable order.
    pub fn models(&self) -> Vec<ReferenceModel> {
        let mut out: Vec<ReferenceModel> = self
            .lock()
            .iter()
            .map(|(k, a)| ReferenceModel {
                key: *k,
                anchors: a.clone(),
            })
            .collect();
        out.sort_by_key(|m| m.key.bits());
        out
    }

    /// Stores a model in memory and, unless read-only or memory-only, rewrites
    /// the backing file. The in-memory entry survives a failed write.
    pub fn insert(&self, key: ReferenceKey, anchors: Vec<f64>) -> Result<()> {
        self.lock().insert(key, anchors);
        match &self.path {
            Some(path) if !self.read_only => self.persist(path),
            _ => Ok(()),
        }
    }

    fn persist(&self, path: &Path) -> Result<()> {
        let file = CacheFile {
            version: CACHE_VERSION,
            entries: self
                .models()
                .into_iter()
                .map(|m| CacheEntry {
                    key: m.key,
                    anchors: m.anchors,
                })
                .collect(),
        };
        let write = || -> std::io::Result<()> {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            serde_json::to_writer_pretty(&mut tmp, &file)?;
            tmp.write_all(b"\n")?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        };
        write().map_err(|e| Error::CacheWrite(format!("{}: {e}", path.display())))
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<ReferenceKey, Vec<f64>>> {
        self.entries.lock().unwrap_or_else(|p| p.into_inner())
    }
}
