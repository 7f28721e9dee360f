//! Box-counting dimension, decision-boundary extraction on label rasters and
//! the boundary report combining both with the CF machinery.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bounds::{classify_lmu, LmuClassification};
use crate::cloud::{LabeledCloud, PointCloud};
use crate::error::{Error, Result};
use crate::estimators::{MembershipAnchors, WeightVector};
use crate::exec::{self, Execution};
use crate::gridding::{find_spacing_with, normalize_or_collapse, snap_to_grid_with, IpRange};
use crate::neighborhood::{connectivity_factor, count_neighbors_with, Engine};

/// Default box sizes `2^-2 … 2^-9` on the normalized cloud.
pub fn default_scales() -> Vec<f64> {
    (2..=9).map(|k| 0.5f64.powi(k)).collect()
}

/// Coarsest default scales left out of the fit; at those sizes almost every
/// box touches the set.
pub const SATURATED_SCALES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountResult {
    /// Box sizes, descending.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// The fit uses `scales[fit_from..fit_to]`.
    pub fit_from: usize,
    pub fit_to: usize,
    pub slope: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
}

/// Scale ladder and fit window for [`box_dimension_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountConfig {
    pub scales: Vec<f64>,
    /// Number of coarsest scales left out of the fit.
    pub skip_coarsest: usize,
    /// Scales whose occupied boxes hold fewer points than this on average are
    /// left out of the fit (the sample no longer resolves the set there).
    /// At least the two coarsest remaining scales are always fitted.
    pub min_points_per_box: f64,
}

impl Default for BoxCountConfig {
    fn default() -> Self {
        Self {
            scales: default_scales(),
            skip_coarsest: SATURATED_SCALES,
            min_points_per_box: DEFAULT_MIN_POINTS_PER_BOX,
        }
    }
}

pub const DEFAULT_MIN_POINTS_PER_BOX: f64 = 10.0;

/// Box dimension fitted over every given scale.
pub fn box_dimension(cloud: &PointCloud, scales: &[f64]) -> Result<BoxCountResult> {
    let config = BoxCountConfig {
        scales: scales.to_vec(),
        skip_coarsest: 0,
        min_points_per_box: 0.0,
    };
    box_dimension_with(cloud, &config, Execution::default())
}

/// Default ladder and fit window.
pub fn box_dimension_default(cloud: &PointCloud) -> Result<BoxCountResult> {
    box_dimension_with(cloud, &BoxCountConfig::default(), Execution::default())
}

/// Counts occupied boxes at each scale on the normalized cloud and fits
/// `log count = slope · log(1/s) + c` over the configured window.
pub fn box_dimension_with(cloud: &PointCloud, config: &BoxCountConfig, exec: Execution) -> Result<BoxCountResult> {
    let fit_from = config.skip_coarsest;
    if config.scales.len() < fit_from + 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two fitted scales, got {} from {} scales",
            config.scales.len().saturating_sub(fit_from),
            config.scales.len()
        )));
    }
    let mut scales = config.scales.clone();
    if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidArgument("scales must be positive".into()));
    }
    scales.sort_by(|a, b| b.total_cmp(a));
    let unit = normalize_or_collapse(cloud)?;
    let counts: Vec<usize> = scales
        .iter()
        .map(|&s| snap_to_grid_with(&unit, s, exec).map(|g| g.len()))
        .collect::<Result<_>>()?;

    let max_boxes = unit.len() as f64 / config.min_points_per_box;
    let mut fit_to = fit_from + 2;
    while fit_to < scales.len() && counts[fit_to] as f64 <= max_boxes {
        fit_to += 1;
    }
    let xs: Vec<f64> = scales[fit_from..fit_to].iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts[fit_from..fit_to].iter().map(|&c| (c as f64).ln()).collect();
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(Error::DegenerateFit);
    }
    let (slope, intercept) = least_squares(&xs, &ys);
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(BoxCountResult {
        scales,
        counts,
        fit_from,
        fit_to,
        slope,
        residual: (sse / xs.len() as f64).sqrt(),
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Row-major integer raster over an axis-aligned box. Row `r`, column `c`
/// covers `[x0 + c·cell_w, x0 + (c+1)·cell_w) × [y0 + r·cell_h, …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRaster {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<i64>,
    pub origin: [f64; 2],
    pub cell: [f64; 2],
}

impl LabelRaster {
    pub fn new(width: usize, height: usize, labels: Vec<i64>, origin: [f64; 2], cell: [f64; 2]) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{} labels for a {width}×{height} raster",
                labels.len()
            )));
        }
        if !(cell[0] > 0.0 && cell[1] > 0.0) {
            return Err(Error::InvalidArgument("cell sizes must be positive".into()));
        }
        Ok(Self {
            width,
            height,
            labels,
            origin,
            cell,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.labels[row * self.width + col]
    }

    pub fn center(&self, row: usize, col: usize) -> [f64; 2] {
        [
            self.origin[0] + (col as f64 + 0.5) * self.cell[0],
            self.origin[1] + (row as f64 + 0.5) * self.cell[1],
        ]
    }

    /// One raster row per line, comma-separated integers; unit cells at the
    /// origin.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut labels = Vec::new();
        let mut width = None;
        let mut height = 0;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<i64> = line
                .split(',')
                .map(|f| {
                    f.trim().parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        value: f.trim().to_string(),
                    })
                })
                .collect::<Result<_>>()?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::RaggedRow {
                        row: height,
                        expected: w,
                        found: row.len(),
                    })
                }
                _ => {}
            }
            labels.extend(row);
            height += 1;
        }
        let width = width.ok_or(Error::EmptyCloud)?;
        Self::new(width, height, labels, [0.0, 0.0], [1.0, 1.0])
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.labels.chunks(self.width) {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Centers of the cells whose right or lower neighbor holds a different label,
/// in row-major order. Looking forward only keeps the boundary one cell thick
/// (a two-sided band would read as a 2-D strip once gridded); the rule does
/// not depend on the label values, so swapping labels gives the same cells.
pub fn extract_boundary(raster: &LabelRaster) -> Result<PointCloud> {
    let first = raster.labels[0];
    if raster.labels.iter().all(|&l| l == first) {
        return Err(Error::SingleClass);
    }
    let (w, h) = (raster.width, raster.height);
    let mut data = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let own = raster.get(r, c);
            let right = c + 1 < w && raster.get(r, c + 1) != own;
            let below = r + 1 < h && raster.get(r + 1, c) != own;
            if right || below {
                data.extend(raster.center(r, c));
            }
        }
    }
    PointCloud::new(data, 2)
}

/// Predicts a label for every cell center of a `resolution × resolution`
/// raster over the training bounding box by `k`-nearest-neighbor majority
/// vote. Vote ties go to the smallest label; distance ties to the earlier
/// training point.
pub fn knn_label_grid(train: &LabeledCloud, k: usize, resolution: usize) -> Result<LabelRaster> {
    knn_label_grid_with(train, k, resolution, Execution::default())
}

pub fn knn_label_grid_with(train: &LabeledCloud, k: usize, resolution: usize, exec: Execution) -> Result<LabelRaster> {
    if k == 0 || resolution < 2 {
        return Err(Error::InvalidArgument("k ≥ 1 and resolution ≥ 2 required".into()));
    }
    if train.cloud.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "training data must be 2-D, got {}-D",
            train.cloud.dim()
        )));
    }
    let bounds = train.cloud.bounds();
    let origin = [bounds[0].0, bounds[1].0];
    let extent = |i: usize| {
        let e = bounds[i].1 - bounds[i].0;
        if e > 0.0 {
            e
        } else {
            1.0
        }
    };
    let cell = [extent(0) / resolution as f64, extent(1) / resolution as f64];
    let k = k.min(train.cloud.len());
    let points = train.cloud.as_flat();
    let labels = exec::map_range(exec, resolution * resolution, |idx| {
        let (r, c) = (idx / resolution, idx % resolution);
        let q = [
            origin[0] + (c as f64 + 0.5) * cell[0],
            origin[1] + (r as f64 + 0.5) * cell[1],
        ];
        let mut d: Vec<(f64, usize)> = points
            .chunks_exact(2)
            .enumerate()
            .map(|(i, p)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2), i))
            .collect();
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        let mut votes: HashMap<i64, usize> = HashMap::new();
        for &(_, i) in &d[..k] {
            *votes.entry(train.labels[i]).or_default() += 1;
        }
        votes
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(l, _)| l)
            .expect("k ≥ 1")
    });
    LabelRaster::new(resolution, resolution, labels, origin, cell)
}

/// Dimension summary of a decision boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub boundary_points: usize,
    pub fractal_dimension: f64,
    pub cf: f64,
    pub spacing: f64,
    pub achieved_ip: f64,
    pub lmu: LmuClassification,
    /// Normalized DCF weights over topologies `0..=n`.
    pub weights: Vec<f64>,
    pub dcf_dimension: usize,
    /// `(label, box dimension)` per object class.
    pub object_dimensions: Vec<(i64, f64)>,
}

/// IP target used to grid a boundary.
pub const BOUNDARY_IP: f64 = 50.0;

pub fn boundary_report(boundary: &PointCloud, objects: Option<&LabeledCloud>) -> Result<BoundaryReport> {
    boundary_report_with(boundary, objects, Execution::default())
}

pub fn boundary_report_with(boundary: &PointCloud, objects: Option<&LabeledCloud>, exec: Execution) -> Result<BoundaryReport> {
    if boundary.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let n = boundary.dim();
    let fractal = box_dimension_with(boundary, &BoxCountConfig::default(), exec)?;
    let unit = normalize_or_collapse(boundary)?;
    let choice = find_spacing_with(&unit, IpRange::around(BOUNDARY_IP)?, exec)?;
    let grid = snap_to_grid_with(&unit, choice.spacing, exec)?;
    let counts = count_neighbors_with(&grid, Engine::Auto, exec);
    let cf = connectivity_factor(&counts).cf;
    let weights = WeightVector::from_counts(
        &MembershipAnchors::theoretical(n),
        counts.counts.iter().map(|&c| c as f64),
    );
    let mut object_dimensions = Vec::new();
    if let Some(objects) = objects {
        for label in objects.classes() {
            let class = objects.class(label)?;
            let d = box_dimension_with(&class, &BoxCountConfig::default(), exec)?;
            object_dimensions.push((label, d.slope));
        }
    }
    Ok(BoundaryReport {
        boundary_points: boundary.len(),
        fractal_dimension: fractal.slope,
        cf,
        spacing: choice.spacing,
        achieved_ip: choice.achieved_ip,
        lmu: classify_lmu(cf, n),
        dcf_dimension: weights.argmax(),
        weights: weights.normalized,
        object_dimensions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen;
    use rand::Rng;

    fn raster(rows: &[&[i64]]) -> LabelRaster {
        let w = rows[0].len();
        LabelRaster::new(w, rows.len(), rows.concat(), [0.0, 0.0], [1.0, 1.0]).unwrap()
    }

    #[test]
    fn filled_square() {
        let mut rng = datagen::rng(1);
        let c = PointCloud::new((0..200_000).map(|_| rng.random::<f64>()).collect(), 2).unwrap();
        let r = box_dimension_default(&c).unwrap();
        assert!((1.9..=2.05).contains(&r.slope), "{r:?}");
    }

    #[test]
    fn segment() {
        let rows: Vec<[f64; 2]> = (0..20_000).map(|i| [i as f64 / 20_000.0, 0.3]).collect();
        let r = box_dimension_default(&PointCloud::from_rows(&rows).unwrap()).unwrap();
        assert!((0.95..=1.05).contains(&r.slope), "{r:?}");
        assert!(r.counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn single_point_fit_is_degenerate() {
        let c = PointCloud::from_rows(&[[0.5, 0.5]]).unwrap();
        assert!(matches!(box_dimension_default(&c), Err(Error::DegenerateFit)));
    }

    #[test]
    fn vertical_split_boundary() {
        let r = raster(&[&[1, 1, 2, 2], &[1, 1, 2, 2], &[1, 1, 2, 2]]);
        let b = extract_boundary(&r).unwrap();
        let xs: Vec<f64> = b.points().map(|p| p[0]).collect();
        assert_eq!(b.len(), 3);
        assert!(xs.iter().all(|&x| x == 1.5));
    }

    #[test]
    fn checkerboard_boundary() {
        let r = raster(&[&[0, 1, 0], &[1, 0, 1], &[0, 1, 0]]);
        // Only the bottom-right cell has no forward neighbor.
        assert_eq!(extract_boundary(&r).unwrap().len(), 8);
    }

    #[test]
    fn uniform_raster_single_class() {
        let r = raster(&[&[3, 3], &[3, 3]]);
        assert!(matches!(extract_boundary(&r), Err(Error::SingleClass)));
    }

    #[test]
    fn raster_csv_round_trip() {
        let r = raster(&[&[1, 2, 3], &[-4, 5, 6]]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1,2,3\n-4,5,6\n");
        assert_eq!(LabelRaster::read_csv(buf.as_slice()).unwrap(), r);
        assert!(LabelRaster::read_csv("1,2\n3\n".as_bytes()).is_err());
    }

    #[test]
    fn one_nn_is_bisector_partition() {
        let train = LabeledCloud::new(PointCloud::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap(), vec![7, 9]).unwrap();
        let g = knn_label_grid(&train, 1, 16).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                let [x, y] = g.center(r, c);
                if (x + y - 1.0).abs() < 1e-9 {
                    continue;
                }
                let expected = if x + y < 1.0 { 7 } else { 9 };
                assert_eq!(g.get(r, c), expected, "cell ({r},{c})");
            }
        }
    }

    #[test]
    fn k_above_n_uses_global_majority() {
        let train = LabeledCloud::new(
            PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
            vec![2, 5, 5],
        )
        .unwrap();
        let g = knn_label_grid(&train, 10, 4).unwrap();
        assert!(g.labels.iter().all(|&l| l == 5));
    }

    #[test]
    fn straight_line_boundary_report() {
        let rows: Vec<[f64; 2]> = (0..2000).map(|i| [i as f64 / 2000.0, 0.25]).collect();
        let rep = boundary_report(&PointCloud::from_rows(&rows).unwrap(), None).unwrap();
        assert!(rep.weights[1] > 0.9, "{rep:?}");
        assert_eq!(rep.dcf_dimension, 1);
        assert!((rep.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_perimeter_is_one_dimensional() {
        let n = 64;
        let labels: Vec<i64> = (0..n * n)
            .map(|i| {
                let (r, c) = (i / n, i % n);
                i64::from((16..48).contains(&r) && (16..48).contains(&c))
            })
            .collect();
        let r = LabelRaster::new(n, n, labels, [0.0, 0.0], [1.0, 1.0]).unwrap();
        let b = extract_boundary(&r).unwrap();
        let rep = boundary_report(&b, None).unwrap();
        assert_eq!(rep.dcf_dimension, 1, "{rep:?}");
    }
}
