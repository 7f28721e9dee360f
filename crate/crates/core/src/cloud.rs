//! Point-cloud containers and the CSV reader/writer.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// `N` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    dim: usize,
    len: usize,
}

impl PointCloud {
    /// Builds a cloud from a flat row-major buffer. `data.len()` must be a
    /// multiple of `dim`; zero-dimensional clouds go through [`PointCloud::zero_dim`].
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "use PointCloud::zero_dim for d = 0".into(),
            ));
        }
        if data.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::RaggedRow {
                row: data.len() / dim,
                expected: dim,
                found: data.len() % dim,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / dim });
        }
        let len = data.len() / dim;
        Ok(Self { data, dim, len })
    }

    /// `len` copies of the unique point of `R^0`.
    pub fn zero_dim(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyCloud);
        }
        Ok(Self {
            data: Vec::new(),
            dim: 0,
            len,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyCloud)?;
        let dim = first.as_ref().len();
        if dim == 0 {
            return Self::zero_dim(rows.len());
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::RaggedRow {
                    row,
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(data, dim)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Per-axis `(min, max)`.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.points() {
            for (b, &v) in out.iter_mut().zip(p) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        out
    }

    /// Drops exact duplicate points, keeping first occurrences in order.
    pub fn dedup(&self) -> PointCloud {
        let mut seen = std::collections::HashSet::with_capacity(self.len);
        let mut data = Vec::with_capacity(self.data.len());
        let mut len = 0;
        for p in self.points() {
            let key: Vec<u64> = p.iter().map(|v| (v + 0.0).to_bits()).collect();
            if seen.insert(key) {
                data.extend_from_slice(p);
                len += 1;
            }
        }
        PointCloud {
            data,
            dim: self.dim,
            len,
        }
    }

    /// Maps every point through `f`, which must produce `out_dim` coordinates.
    pub fn map_points(&self, out_dim: usize, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<Self> {
        let mut data = vec![0.0; self.len * out_dim];
        for (i, p) in self.points().enumerate() {
            f(p, &mut data[i * out_dim..(i + 1) * out_dim]);
        }
        Self::new(data, out_dim)
    }

    /// Reads one point per line. With `header`, the first non-empty line is
    /// skipped. Ragged rows and unparsable fields are rejected.
    pub fn read_csv<R: BufRead>(reader: R, header: bool) -> Result<Self> {
        let rows = read_rows(reader, header)?;
        Self::from_rows(&rows)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for p in self.points() {
            write_row(&mut w, p, None)?;
        }
        Ok(())
    }
}

/// A cloud with one integer class label per point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloud {
    pub cloud: PointCloud,
    pub labels: Vec<i64>,
}

impl LabeledCloud {
    pub fn new(cloud: PointCloud, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != cloud.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} points",
                labels.len(),
                cloud.len()
            )));
        }
        Ok(Self { cloud, labels })
    }

    /// Reads rows whose last column is an integer label.
    pub fn read_csv<R: BufRead>(reader: R, header: bool) -> Result<Self> {
        let rows = read_rows(reader, header)?;
        let dim = rows.first().ok_or(Error::EmptyCloud)?.len();
        if dim < 2 {
            return Err(Error::InvalidArgument(
                "labeled CSV needs at least one coordinate and a label column".into(),
            ));
        }
        let mut labels = Vec::with_capacity(rows.len());
        let mut coords = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let label = r[dim - 1];
            if label.fract() != 0.0 {
                return Err(Error::Parse {
                    line: i + 1,
                    value: label.to_string(),
                });
            }
            labels.push(label as i64);
            coords.push(r[..dim - 1].to_vec());
        }
        Self::new(PointCloud::from_rows(&coords)?, labels)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (p, &l) in self.cloud.points().zip(&self.labels) {
            write_row(&mut w, p, Some(l))?;
        }
        Ok(())
    }

    /// Points carrying `label`, in input order.
    pub fn class(&self, label: i64) -> Result<PointCloud> {
        let rows: Vec<&[f64]> = self
            .cloud
            .points()
            .zip(&self.labels)
            .filter(|(_, &l)| l == label)
            .map(|(p, _)| p)
            .collect();
        PointCloud::from_rows(&rows)
    }

    /// Distinct labels, ascending.
    pub fn classes(&self) -> Vec<i64> {
        let mut ls = self.labels.clone();
        ls.sort_unstable();
        ls.dedup();
        ls
    }
}

fn read_rows<R: BufRead>(reader: R, header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut skip_header = header;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if skip_header {
            skip_header = false;
            continue;
        }
        let mut row = Vec::new();
        for field in trimmed.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                value: field.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { row: rows.len() });
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::RaggedRow {
                    row: rows.len(),
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(rows)
}

fn write_row<W: Write>(w: &mut W, p: &[f64], label: Option<i64>) -> Result<()> {
    let mut first = true;
    for v in p {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        // `{:?}` round-trips f64 exactly.
        write!(w, "{v:?}")?;
    }
    if let Some(l) = label {
        if !first {
            w.write_all(b",")?;
        }
        write!(w, "{l}")?;
    }
    w.write_all(b"\n")?;
    Ok(())
}
