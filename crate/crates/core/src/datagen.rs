//! Seeded dataset generators: calibration hyperspheres, a subset of the
//! standard synthetic manifold benchmark, labeled 2-D classification sets and
//! chaos-game fractals.
//!
//! Every generator is a pure function of its parameters and seed (ChaCha8
//! stream, consumed sequentially). Noise levels are per-coordinate Gaussian
//! standard deviations in the manifold's own units; "p% noise" means
//! `sigma = p / 100`.
//!
//! Manifold parametrizations (`u`, `v` uniform on `[0, 1)`):
//!
//! | id  | name      | ID | ambient | map |
//! |-----|-----------|----|---------|-----|
//! | M1  | sphere    | m  | m+1     | Gaussian direction normalized to the unit sphere |
//! | M2  | affine    | m  | d       | `A·u`, `u ∈ [0,1)^m`, `A` a fixed `d×m` matrix with orthonormal columns |
//! | M5a | helix1d   | 1  | 3       | `t = 2πu`: `((2+cos 8t) cos t, (2+cos 8t) sin t, sin 8t)` |
//! | M5b | helix2d   | 2  | 3       | `p = 2πu`, `r = v`: `(r cos p, r sin p, p/2)` |
//! | M7  | swissroll | 2  | 3       | `t = 1.5π(1+2u)`, `h = 21v`: `(t cos t, h, t sin t)` |
//! | M9  | affine20  | d  | d       | uniform box `[0,1)^d` |
//! | M11 | moebius   | 2  | 3       | `a = 2πu`, `w = 2v−1`: `((1+w/2 cos a/2) cos a, (1+w/2 cos a/2) sin a, w/2 sin a/2)` |
//! | M13a| scurve    | 2  | 3       | `t = 3π(u−½)`: `(sin t, 2v, sign(t)(cos t − 1))` |
//! | M13b| spiral    | 1  | 13      | `x_0 = u`, `(x_{2j−1}, x_{2j}) = u (cos 2πju, sin 2πju)`, `j = 1..6` |

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cloud::{LabeledCloud, PointCloud};
use crate::error::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Adds i.i.d. `N(0, sigma²)` noise to every coordinate, in place.
pub fn add_noise(data: &mut [f64], sigma: f64, rng: &mut impl Rng) {
    if sigma > 0.0 {
        for v in data.iter_mut() {
            *v += sigma * gaussian(rng);
        }
    }
}

/// `n` points uniform on the unit sphere `S^m ⊂ R^(m+1)` plus per-coordinate
/// Gaussian noise. `S^0` degenerates to the single point `(1)`.
pub fn gen_hypersphere(m: usize, n: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("noise must be ≥ 0, got {sigma}")));
    }
    let mut rng = rng(seed);
    if m == 0 {
        return PointCloud::new(vec![1.0; n], 1);
    }
    let d = m + 1;
    let mut data = Vec::with_capacity(n * d);
    let mut v = vec![0.0; d];
    for _ in 0..n {
        loop {
            for x in v.iter_mut() {
                *x = gaussian(&mut rng);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                data.extend(v.iter().map(|x| x / norm));
                break;
            }
        }
    }
    add_noise(&mut data, sigma, &mut rng);
    PointCloud::new(data, d)
}

/// The implemented benchmark manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manifold {
    Sphere,
    Affine,
    Helix1d,
    Helix2d,
    SwissRoll,
    AffineBox,
    Moebius,
    SCurve,
    Spiral,
}

impl Manifold {
    pub const ALL: [Manifold; 9] = [
        Manifold::Sphere,
        Manifold::Affine,
        Manifold::Helix1d,
        Manifold::Helix2d,
        Manifold::SwissRoll,
        Manifold::AffineBox,
        Manifold::Moebius,
        Manifold::SCurve,
        Manifold::Spiral,
    ];

    /// Benchmark table name.
    pub fn benchmark_id(self) -> &'static str {
        match self {
            Manifold::Sphere => "M1_Sphere",
            Manifold::Affine => "M2_Affine_3to5",
            Manifold::Helix1d => "M5a_Helix1d",
            Manifold::Helix2d => "M5b_Helix2d",
            Manifold::SwissRoll => "M7_Roll",
            Manifold::AffineBox => "M9_Affine",
            Manifold::Moebius => "M11_Moebius",
            Manifold::SCurve => "M13a_Scurve",
            Manifold::Spiral => "M13b_Spiral",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Manifold::Sphere => "sphere",
            Manifold::Affine => "affine",
            Manifold::Helix1d => "helix1d",
            Manifold::Helix2d => "helix2d",
            Manifold::SwissRoll => "swissroll",
            Manifold::AffineBox => "affine20",
            Manifold::Moebius => "moebius",
            Manifold::SCurve => "scurve",
            Manifold::Spiral => "spiral",
        }
    }

    /// `(intrinsic, ambient)` dimensions used by the benchmark table.
    pub fn default_dims(self) -> (usize, usize) {
        match self {
            Manifold::Sphere => (10, 11),
            Manifold::Affine => (3, 5),
            Manifold::Helix1d => (1, 3),
            Manifold::Helix2d => (2, 3),
            Manifold::SwissRoll => (2, 3),
            Manifold::AffineBox => (20, 20),
            Manifold::Moebius => (2, 3),
            Manifold::SCurve => (2, 3),
            Manifold::Spiral => (1, 13),
        }
    }
}

impl FromStr for Manifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        let found = Manifold::ALL.into_iter().find(|m| {
            let id = m.benchmark_id().to_ascii_lowercase();
            key == m.name() || key == id || key == id.split('_').next().unwrap_or_default()
        });
        found.ok_or_else(|| Error::UnknownGenerator(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub manifold: Manifold,
    pub intrinsic: usize,
    pub ambient: usize,
    pub n: usize,
    /// Per-coordinate Gaussian standard deviation.
    pub noise: f64,
    pub seed: u64,
}

impl ManifoldSpec {
    /// Benchmark-table dimensions for `manifold`.
    pub fn benchmark(manifold: Manifold, n: usize, noise: f64, seed: u64) -> Self {
        let (intrinsic, ambient) = manifold.default_dims();
        Self {
            manifold,
            intrinsic,
            ambient,
            n,
            noise,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyCloud);
        }
        if self.intrinsic > self.ambient {
            return Err(Error::InvalidArgument(format!(
                "intrinsic dimension {} exceeds ambient {}",
                self.intrinsic, self.ambient
            )));
        }
        if self.noise < 0.0 || !self.noise.is_finite() {
            return Err(Error::InvalidArgument(format!("noise must be ≥ 0, got {}", self.noise)));
        }
        let fixed = match self.manifold {
            Manifold::Sphere => {
                if self.ambient < self.intrinsic + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "S^{} needs ambient ≥ {}",
                        self.intrinsic,
                        self.intrinsic + 1
                    )));
                }
                None
            }
            Manifold::Affine => None,
            Manifold::AffineBox => (self.intrinsic != self.ambient).then_some((self.ambient, self.ambient)),
            other => Some(other.default_dims()),
        };
        match fixed {
            Some((i, a)) if (i, a) != (self.intrinsic, self.ambient) => Err(Error::InvalidArgument(format!(
                "{} is fixed at intrinsic {i}, ambient {a}",
                self.manifold.name()
            ))),
            _ => Ok(()),
        }
    }
}

/// Seed of the fixed embedding matrix used by the affine manifold.
const AFFINE_MATRIX_SEED: u64 = 0x5eed_a551;

/// `d × m` matrix (row-major) with orthonormal columns, fixed for each shape.
pub fn affine_embedding(m: usize, d: usize) -> Vec<f64> {
    let mut rng = rng(AFFINE_MATRIX_SEED ^ ((m as u64) << 32) ^ d as u64);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    while cols.len() < m {
        let mut v: Vec<f64> = (0..d).map(|_| gaussian(&mut rng)).collect();
        for c in &cols {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut a = vec![0.0; d * m];
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            a[i * m + j] = x;
        }
    }
    a
}

pub fn gen_manifold(spec: &ManifoldSpec) -> Result<PointCloud> {
    spec.validate()?;
    let (n, m, d) = (spec.n, spec.intrinsic, spec.ambient);
    if spec.manifold == Manifold::Sphere {
        let s = gen_hypersphere(m, n, 0.0, spec.seed)?;
        let mut data = Vec::with_capacity(n * d);
        for p in s.points() {
            data.extend_from_slice(p);
            data.extend(std::iter::repeat_n(0.0, d - p.len()));
        }
        // noise on every ambient coordinate, padded axes included
        let mut r = rng(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
        add_noise(&mut data, spec.noise, &mut r);
        return PointCloud::new(data, d);
    }

    let mut r = rng(spec.seed);
    let mut data = Vec::with_capacity(n * d);
    let matrix = (spec.manifold == Manifold::Affine).then(|| affine_embedding(m, d));
    let mut latent = vec![0.0; m.max(2)];
    for _ in 0..n {
        for x in latent.iter_mut() {
            *x = r.random::<f64>();
        }
        let (u, v) = (latent[0], latent[1]);
        match spec.manifold {
            Manifold::Sphere => unreachable!(),
            Manifold::Affine => {
                let a = matrix.as_ref().expect("matrix built above");
                for i in 0..d {
                    data.push((0..m).map(|j| a[i * m + j] * latent[j]).sum());
                }
            }
            Manifold::AffineBox => data.extend_from_slice(&latent[..d]),
            Manifold::Helix1d => data.extend(helix1d(2.0 * PI * u)),
            Manifold::Helix2d => {
                let p = 2.0 * PI * u;
                data.extend([v * p.cos(), v * p.sin(), 0.5 * p]);
            }
            Manifold::SwissRoll => {
                let t = 1.5 * PI * (1.0 + 2.0 * u);
                data.extend([t * t.cos(), 21.0 * v, t * t.sin()]);
            }
            Manifold::Moebius => data.extend(moebius(2.0 * PI * u, 2.0 * v - 1.0)),
            Manifold::SCurve => {
                let t = 3.0 * PI * (u - 0.5);
                data.extend([t.sin(), 2.0 * v, t.signum() * (t.cos() - 1.0)]);
            }
            Manifold::Spiral => data.extend(spiral(u)),
        }
    }
    add_noise(&mut data, spec.noise, &mut r);
    PointCloud::new(data, d)
}

pub fn helix1d(t: f64) -> [f64; 3] {
    let r = 2.0 + (8.0 * t).cos();
    [r * t.cos(), r * t.sin(), (8.0 * t).sin()]
}

pub fn moebius(a: f64, w: f64) -> [f64; 3] {
    let r = 1.0 + 0.5 * w * (0.5 * a).cos();
    [r * a.cos(), r * a.sin(), 0.5 * w * (0.5 * a).sin()]
}

pub fn spiral(u: f64) -> [f64; 13] {
    let mut out = [0.0; 13];
    out[0] = u;
    for j in 1..=6 {
        let w = 2.0 * PI * j as f64 * u;
        out[2 * j - 1] = u * w.cos();
        out[2 * j] = u * w.sin();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleKind {
    Concentric,
    Overlapping,
}

/// Two labeled noisy rings (labels 1 and 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleParams {
    pub radii: [f64; 2],
    pub center: [f64; 2],
    /// Number of evenly spaced angles on `[0, 2π)`.
    pub samples: usize,
    /// Points per ring; angles cycle through the sample grid.
    pub points_per_class: usize,
    pub noise_rate: f64,
}

impl CircleParams {
    pub fn preset(kind: CircleKind) -> Self {
        let (radii, noise_rate) = match kind {
            CircleKind::Concentric => ([3.0, 4.0], 0.5),
            CircleKind::Overlapping => ([3.0, 3.5], 0.7),
        };
        Self {
            radii,
            center: [0.0, 0.0],
            samples: 360,
            points_per_class: 360,
            noise_rate,
        }
    }
}

/// `rand()·rate − rand()·rate`, the two draws independent uniforms on `[0, 1)`.
fn difference_noise(rng: &mut impl Rng, rate: f64) -> f64 {
    rng.random::<f64>() * rate - rng.random::<f64>() * rate
}

pub fn gen_circles(params: &CircleParams, seed: u64) -> Result<LabeledCloud> {
    if params.samples == 0 || params.points_per_class == 0 {
        return Err(Error::InvalidArgument("circle sample counts must be positive".into()));
    }
    if params.radii.iter().any(|r| *r <= 0.0) || params.noise_rate < 0.0 {
        return Err(Error::InvalidArgument("radii must be positive, noise ≥ 0".into()));
    }
    let mut r = rng(seed);
    let mut data = Vec::with_capacity(4 * params.points_per_class);
    let mut labels = Vec::with_capacity(2 * params.points_per_class);
    for (class, &radius) in params.radii.iter().enumerate() {
        for i in 0..params.points_per_class {
            let theta = 2.0 * PI * (i % params.samples) as f64 / params.samples as f64;
            let nx = difference_noise(&mut r, params.noise_rate);
            let ny = difference_noise(&mut r, params.noise_rate);
            data.push(radius * theta.cos() + params.center[0] + nx);
            data.push(radius * theta.sin() + params.center[1] + ny);
            labels.push(class as i64 + 1);
        }
    }
    LabeledCloud::new(PointCloud::new(data, 2)?, labels)
}

/// Two phase-shifted, offset sine curves (labels 1 and 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinusoidParams {
    pub points_per_curve: usize,
    pub x_range: [f64; 2],
    pub amplitude: f64,
    pub phases: [f64; 2],
    pub offsets: [f64; 2],
    pub noise_rate: f64,
}

impl Default for SinusoidParams {
    fn default() -> Self {
        Self {
            points_per_curve: 500,
            x_range: [0.0, 2.0 * PI],
            amplitude: 1.0,
            phases: [0.0, PI],
            offsets: [0.0, 0.5],
            noise_rate: 0.5,
        }
    }
}

/// `y = amplitude·sin(x + phase) + offset + (rand()·rate − rate/2)` on evenly
/// spaced `x` (endpoints included).
pub fn gen_sinusoids(params: &SinusoidParams, seed: u64) -> Result<LabeledCloud> {
    let n = params.points_per_curve;
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut r = rng(seed);
    let mut data = Vec::with_capacity(4 * n);
    let mut labels = Vec::with_capacity(2 * n);
    let [x0, x1] = params.x_range;
    for curve in 0..2 {
        for i in 0..n {
            let x = if n == 1 {
                x0
            } else {
                x0 + (x1 - x0) * i as f64 / (n - 1) as f64
            };
            let noise = r.random::<f64>() * params.noise_rate - params.noise_rate / 2.0;
            let y = params.amplitude * (x + params.phases[curve]).sin() + params.offsets[curve] + noise;
            data.extend([x, y]);
            labels.push(curve as i64 + 1);
        }
    }
    LabeledCloud::new(PointCloud::new(data, 2)?, labels)
}

/// Planar iterated function system `(x, y) → (a x + b y + e, c x + d y + f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineIfs {
    /// `[a, b, c, d, e, f]` per map.
    pub maps: Vec<[f64; 6]>,
    pub probabilities: Vec<f64>,
    pub start: [f64; 2],
}

impl AffineIfs {
    pub fn new(maps: Vec<[f64; 6]>, probabilities: Vec<f64>, start: [f64; 2]) -> Result<Self> {
        if maps.is_empty() || maps.len() != probabilities.len() {
            return Err(Error::InvalidArgument("one probability per map required".into()));
        }
        if probabilities.iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidArgument("map probabilities must be positive".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-2 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        // renormalize the table's rounded values (e.g. 3 × 0.333)
        let probabilities = probabilities.iter().map(|p| p / total).collect();
        Ok(Self {
            maps,
            probabilities,
            start,
        })
    }

    pub fn barnsley_fern() -> Self {
        Self::new(
            vec![
                [0.0, 0.0, 0.0, 0.16, 0.0, 0.0],
                [0.85, 0.04, -0.04, 0.85, 0.0, 1.6],
                [0.20, -0.26, 0.23, 0.22, 0.0, 1.6],
                [-0.15, 0.28, 0.26, 0.24, 0.0, 0.44],
            ],
            vec![0.01, 0.85, 0.07, 0.07],
            [0.0, 0.0],
        )
        .expect("valid preset")
    }

    pub fn sierpinski_carpet() -> Self {
        let offsets = [0.0, 0.333, 0.666];
        let mut maps = Vec::with_capacity(8);
        for &f in &offsets {
            for &e in &offsets {
                if e == 0.333 && f == 0.333 {
                    continue;
                }
                maps.push([0.333, 0.0, 0.0, 0.333, e, f]);
            }
        }
        Self::new(maps, vec![0.125; 8], [0.5, 0.5]).expect("valid preset")
    }

    pub fn sierpinski_triangle() -> Self {
        Self::new(
            vec![
                [0.5, 0.0, 0.0, 0.5, 0.0, 0.0],
                [0.5, 0.0, 0.0, 0.5, 0.5, 0.0],
                [0.5, 0.0, 0.0, 0.5, 0.25, 0.433],
            ],
            vec![0.333; 3],
            [0.0, 0.0],
        )
        .expect("valid preset")
    }

    fn pick(&self, u: f64) -> &[f64; 6] {
        let mut acc = 0.0;
        for (map, p) in self.maps.iter().zip(&self.probabilities) {
            acc += p;
            if u < acc {
                return map;
            }
        }
        self.maps.last().expect("non-empty")
    }
}

/// Default number of discarded chaos-game iterations.
pub const DEFAULT_BURN_IN: usize = 100;

/// Chaos game: iterate random maps from `ifs.start`, drop `burn_in`
/// iterations, emit the next `n` points.
pub fn gen_ifs(ifs: &AffineIfs, n: usize, seed: u64, burn_in: usize) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut r = rng(seed);
    let [mut x, mut y] = ifs.start;
    let mut data = Vec::with_capacity(2 * n);
    for i in 0..(burn_in + n) {
        let [a, b, c, d, e, f] = *ifs.pick(r.random::<f64>());
        (x, y) = (a * x + b * y + e, c * x + d * y + f);
        if i >= burn_in {
            data.extend([x, y]);
        }
    }
    PointCloud::new(data, 2)
}

/// Fractal points (label 1) plus uniform background points over the
/// attractor's bounding box (label 0).
pub fn gen_ifs_labeled(ifs: &AffineIfs, n_fractal: usize, n_background: usize, seed: u64) -> Result<LabeledCloud> {
    let fractal = gen_ifs(ifs, n_fractal, seed, DEFAULT_BURN_IN)?;
    let bounds = fractal.bounds();
    let mut r = rng(seed.wrapping_add(1));
    let mut data = fractal.as_flat().to_vec();
    let mut labels = vec![1; n_fractal];
    for _ in 0..n_background {
        for &(lo, hi) in &bounds {
            data.push(lo + (hi - lo) * r.random::<f64>());
        }
        labels.push(0);
    }
    LabeledCloud::new(PointCloud::new(data, 2)?, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_radius_without_noise() {
        let c = gen_hypersphere(1, 500, 0.0, 3).unwrap();
        for p in c.points() {
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_mean_near_origin() {
        let c = gen_hypersphere(2, 10_000, 0.0, 11).unwrap();
        for axis in 0..3 {
            let mean: f64 = c.points().map(|p| p[axis]).sum::<f64>() / c.len() as f64;
            assert!(mean.abs() < 0.05, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn zero_sphere_is_one_point() {
        let c = gen_hypersphere(0, 17, 0.0, 1).unwrap();
        assert_eq!(c.dedup().len(), 1);
        assert_eq!(c.dim(), 1);
    }

    #[test]
    fn helix_residuals() {
        let c = gen_manifold(&ManifoldSpec::benchmark(Manifold::Helix1d, 1000, 0.0, 5)).unwrap();
        for p in c.points() {
            let t = p[1].atan2(p[0]);
            let q = helix1d(t);
            for (a, b) in p.iter().zip(q) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn moebius_and_scurve_residuals() {
        let c = gen_manifold(&ManifoldSpec::benchmark(Manifold::SCurve, 500, 0.0, 2)).unwrap();
        for p in c.points() {
            // sin t = x, z = sign(t)(cos t − 1)  ⇒  (|z| − 1)² + x² = 1... with z ≤ 0 branch handling
            let t_abs = (1.0 - p[2].abs()).acos();
            assert!((t_abs.sin().abs() - p[0].abs()).abs() < 1e-9);
        }
        let c = gen_manifold(&ManifoldSpec::benchmark(Manifold::Moebius, 500, 0.0, 2)).unwrap();
        assert_eq!(c.dim(), 3);
    }

    #[test]
    fn affine_rank_is_intrinsic() {
        let c = gen_manifold(&ManifoldSpec::benchmark(Manifold::Affine, 400, 0.0, 9)).unwrap();
        // Gram matrix of the data has rank 3: project onto the orthonormal columns
        let a = affine_embedding(3, 5);
        for p in c.points() {
            let coords: Vec<f64> = (0..3).map(|j| (0..5).map(|i| a[i * 3 + j] * p[i]).sum()).collect();
            for i in 0..5 {
                let back: f64 = (0..3).map(|j| a[i * 3 + j] * coords[j]).sum();
                assert!((back - p[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn affine_box_in_bounds() {
        let c = gen_manifold(&ManifoldSpec::benchmark(Manifold::AffineBox, 200, 0.0, 1)).unwrap();
        assert_eq!(c.dim(), 20);
        assert!(c.as_flat().iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn unknown_generators() {
        assert!(matches!("M3".parse::<Manifold>(), Err(Error::UnknownGenerator(_))));
        assert!(matches!("Mbeta".parse::<Manifold>(), Err(Error::UnknownGenerator(_))));
        assert_eq!("M5a".parse::<Manifold>().unwrap(), Manifold::Helix1d);
        assert_eq!("helix1d".parse::<Manifold>().unwrap(), Manifold::Helix1d);
        assert_eq!("M13b_Spiral".parse::<Manifold>().unwrap(), Manifold::Spiral);
    }

    #[test]
    fn circles_without_noise() {
        let mut p = CircleParams::preset(CircleKind::Concentric);
        p.noise_rate = 0.0;
        let c = gen_circles(&p, 0).unwrap();
        for (pt, &l) in c.cloud.points().zip(&c.labels) {
            let r = pt[0].hypot(pt[1]);
            let expected = if l == 1 { 3.0 } else { 4.0 };
            assert!((r - expected).abs() < 1e-12);
        }
        p.samples = 4;
        p.points_per_class = 4;
        let c = gen_circles(&p, 0).unwrap();
        let angles: Vec<f64> = c.cloud.points().take(4).map(|q| q[1].atan2(q[0]).rem_euclid(2.0 * PI)).collect();
        for (a, e) in angles.iter().zip([0.0, PI / 2.0, PI, 1.5 * PI]) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn overlapping_preset() {
        let p = CircleParams::preset(CircleKind::Overlapping);
        assert_eq!(p.radii, [3.0, 3.5]);
        assert_eq!(p.noise_rate, 0.7);
        let c = gen_circles(&p, 4).unwrap();
        for (pt, &l) in c.cloud.points().zip(&c.labels) {
            let r = pt[0].hypot(pt[1]);
            let base = if l == 1 { 3.0 } else { 3.5 };
            // |noise| ≤ rate on each axis
            assert!((r - base).abs() <= 0.7 * 2f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn sinusoids() {
        let mut p = SinusoidParams::default();
        p.noise_rate = 0.0;
        let c = gen_sinusoids(&p, 0).unwrap();
        let n = p.points_per_curve;
        assert_eq!(c.cloud.point(0), &[0.0, 0.0]);
        let y2 = c.cloud.point(n)[1];
        assert!((y2 - 0.5).abs() < 1e-15);

        let noisy = gen_sinusoids(&SinusoidParams::default(), 3).unwrap();
        for (i, pt) in noisy.cloud.points().enumerate() {
            let curve = i / n;
            let mean = (pt[0] + [0.0, PI][curve]).sin() + [0.0, 0.5][curve];
            assert!((pt[1] - mean).abs() <= 0.25 + 1e-12);
        }
    }

    #[test]
    fn ifs_presets() {
        let t = AffineIfs::sierpinski_triangle();
        assert_eq!(t.maps[2], [0.5, 0.0, 0.0, 0.5, 0.25, 0.433]);
        assert_eq!(AffineIfs::sierpinski_carpet().maps.len(), 8);

        let fern = gen_ifs(&AffineIfs::barnsley_fern(), 20_000, 7, DEFAULT_BURN_IN).unwrap();
        for p in fern.points() {
            assert!((-3.0..=3.0).contains(&p[0]), "{p:?}");
            assert!((0.0..=10.1).contains(&p[1]), "{p:?}");
        }
    }

    #[test]
    fn ifs_is_deterministic() {
        let ifs = AffineIfs::sierpinski_carpet();
        assert_eq!(gen_ifs(&ifs, 100, 5, 10).unwrap(), gen_ifs(&ifs, 100, 5, 10).unwrap());
        assert_ne!(gen_ifs(&ifs, 100, 5, 10).unwrap(), gen_ifs(&ifs, 100, 6, 10).unwrap());
    }

    #[test]
    fn ifs_rejects_bad_probabilities() {
        assert!(AffineIfs::new(vec![[0.0; 6]], vec![0.5], [0.0, 0.0]).is_err());
        assert!(AffineIfs::new(vec![[0.0; 6]; 2], vec![1.0, 0.0], [0.0, 0.0]).is_err());
    }
}
