//! Closed-form Lower / Middle / Upper Connectivity-Factor values for an
//! `m`-dimensional structure embedded in `n` ambient dimensions, computed in
//! exact rational arithmetic.
//!
//! * Lower: a single minimal set (a center and its full Moore neighborhood)
//!   embedded axis-aligned, `(7^m − 3^m) / ((3^n − 1)·3^m)`.
//! * Middle: a complete `m`-dimensional lattice embedded axis-aligned,
//!   `(3^m − 1) / (3^n − 1)`.
//! * Upper: the labeled full grid with every cell of type `< n − m` removed,
//!   averaged over the remaining types.
//!
//! A cell's *type* is the number of odd coordinates of its index. The labeled
//! grid oracle in [`LabeledGrid`] realizes these sets on a small torus so the
//! closed forms can be checked by brute-force counting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridding::GriddedCloud;
use crate::render::decimal_sig;

fn pow(base: u32, exp: usize) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn check_mn(m: usize, n: usize) -> Result<()> {
    if m > n {
        Err(Error::domain(format!("m = {m} exceeds n = {n}")))
    } else {
        Ok(())
    }
}

/// Number of type-`t` points in the minimal set `S_min^m`: `2^t · C(m, t)`.
pub fn alpha(m: usize, t: usize) -> Result<BigInt> {
    if t > m {
        return Err(Error::domain(format!("type {t} exceeds dimension {m}")));
    }
    Ok(pow(2, t) * binomial(m as i64, t as i64))
}

/// Neighbors inside `S_min^m` of a type-`t` point: `2^t · 3^(m−t) − 1`.
pub fn a_count(m: usize, t: usize) -> Result<BigInt> {
    if t > m {
        return Err(Error::domain(format!("type {t} exceeds dimension {m}")));
    }
    Ok(pow(2, t) * pow(3, m - t) - 1)
}

/// CF of `S_min^m` embedded in `n` dimensions.
pub fn lower_cf(m: usize, n: usize) -> Result<BigRational> {
    check_mn(m, n)?;
    if n == 0 {
        return Ok(BigRational::one());
    }
    Ok(ratio(pow(7, m) - pow(3, m), (pow(3, n) - 1) * pow(3, m)))
}

/// CF of a complete `m`-dimensional lattice embedded in `n` dimensions.
pub fn middle_cf(m: usize, n: usize) -> Result<BigRational> {
    check_mn(m, n)?;
    if n == 0 {
        return Ok(BigRational::one());
    }
    Ok(ratio(pow(3, m) - 1, pow(3, n) - 1))
}

/// Number of type-`y` neighbors of a type-`x` cell in the full labeled grid
/// of dimension `n`.
///
/// For the `x` odd axes, `t` of them keep their parity (offset 0, one way) or
/// flip (`±1`, two ways); the even axes contribute the remaining
/// `y − (x − t)` odd coordinates. The self term is removed when `x = y`.
pub fn cross_alpha(x: usize, y: usize, n: usize) -> Result<BigInt> {
    if x > n || y > n {
        return Err(Error::domain(format!("types ({x}, {y}) must be ≤ n = {n}")));
    }
    let (x, y, n) = (x as i64, y as i64, n as i64);
    let mut total = BigInt::zero();
    for t in 0..=x {
        let rest = y - (x - t);
        if rest < 0 {
            continue;
        }
        let stay = pow(2, t as usize) * binomial(x, t);
        let gain = pow(2, rest as usize) * binomial(n - x, rest);
        total += stay * gain;
    }
    if x == y {
        total -= 1;
    }
    Ok(total)
}

fn check_type_window(m: usize, t: usize, n: usize) -> Result<()> {
    check_mn(m, n)?;
    if t + m < n || t > n {
        return Err(Error::domain(format!(
            "type {t} outside [{}, {n}] for m = {m}",
            n - m
        )));
    }
    Ok(())
}

/// CF contribution of a type-`t` cell in the maximal set `S_max^(n,m)`:
/// the fraction of its `3^n − 1` neighbors whose type is at least `n − m`.
pub fn chi(m: usize, t: usize, n: usize) -> Result<BigRational> {
    check_type_window(m, t, n)?;
    if n == 0 {
        return Ok(BigRational::one());
    }
    let mut present = BigInt::zero();
    for i in (n - m)..=n {
        present += cross_alpha(t, i, n)?;
    }
    Ok(ratio(present, pow(3, n) - 1))
}

/// Share of type-`t` cells among the types kept in `S_max^(n,m)`.
pub fn type_frequency(m: usize, t: usize, n: usize) -> Result<BigRational> {
    check_type_window(m, t, n)?;
    let total: BigInt = ((n - m)..=n).map(|i| binomial(n as i64, i as i64)).sum();
    Ok(ratio(binomial(n as i64, t as i64), total))
}

/// Frequency-weighted average contribution over the maximal set.
pub fn upper_cf(m: usize, n: usize) -> Result<BigRational> {
    check_mn(m, n)?;
    let mut acc = BigRational::zero();
    for t in (n - m)..=n {
        acc += type_frequency(m, t, n)? * chi(m, t, n)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub m: usize,
    pub lower: BigRational,
    pub middle: BigRational,
    pub upper: BigRational,
}

impl BoundsRow {
    pub fn to_f64(&self) -> (f64, f64, f64) {
        (to_f64(&self.lower), to_f64(&self.middle), to_f64(&self.upper))
    }
}

/// Lower/middle/upper values for every `m` in `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsTable {
    pub n: usize,
    pub rows: Vec<BoundsRow>,
}

/// Decimal rendering of a [`BoundsTable`]; this is the frozen JSON schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsTableJson {
    pub n: usize,
    pub rows: Vec<BoundsRowJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRowJson {
    pub m: usize,
    pub lower: String,
    pub middle: String,
    pub upper: String,
}

/// Significant digits used when rendering bounds as decimal strings.
pub const RENDER_DIGITS: usize = 12;

impl BoundsTable {
    pub fn rendered(&self) -> BoundsTableJson {
        BoundsTableJson {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| BoundsRowJson {
                    m: r.m,
                    lower: decimal_sig(&r.lower, RENDER_DIGITS),
                    middle: decimal_sig(&r.middle, RENDER_DIGITS),
                    upper: decimal_sig(&r.upper, RENDER_DIGITS),
                })
                .collect(),
        }
    }
}

pub fn lmu_table(n: usize) -> BoundsTable {
    let rows = crate::exec::map_range(crate::Execution::default(), n + 1, |m| BoundsRow {
        m,
        lower: lower_cf(m, n).expect("m ≤ n"),
        middle: middle_cf(m, n).expect("m ≤ n"),
        upper: upper_cf(m, n).expect("m ≤ n"),
    });
    BoundsTable { n, rows }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Outcome of [`classify_lmu`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmuClassification {
    pub m_hat: usize,
    /// Every `m` whose `[lower, upper]` interval contains the CF.
    pub candidates: Vec<usize>,
}

/// Interval classification of a measured CF against the bounds table.
///
/// Among the dimensions whose `[lower, upper]` interval contains `cf`, the one
/// whose middle value is nearest wins (ties to the smaller `m`). When no
/// interval contains `cf`, the dimension with the nearest interval wins.
pub fn classify_lmu(cf: f64, n: usize) -> LmuClassification {
    let table = lmu_table(n);
    let x = BigRational::from_float(cf).unwrap_or_else(BigRational::zero);
    let candidates: Vec<usize> = table
        .rows
        .iter()
        .filter(|r| r.lower <= x && x <= r.upper)
        .map(|r| r.m)
        .collect();
    let m_hat = if candidates.is_empty() {
        argmin(table.rows.iter().map(|r| {
            let below = &r.lower - &x;
            let above = &x - &r.upper;
            let zero = BigRational::zero();
            (r.m, below.max(above).max(zero))
        }))
    } else {
        argmin(
            table
                .rows
                .iter()
                .filter(|r| candidates.contains(&r.m))
                .map(|r| (r.m, (&r.middle - &x).abs())),
        )
    };
    LmuClassification { m_hat, candidates }
}

fn argmin(items: impl Iterator<Item = (usize, BigRational)>) -> usize {
    let mut best: Option<(usize, BigRational)> = None;
    for (m, d) in items {
        match &best {
            Some((_, bd)) if d >= *bd => {}
            _ => best = Some((m, d)),
        }
    }
    best.map(|b| b.0).unwrap_or(0)
}

/// Cells of `S_min^m` (`{-1,0,1}^m`) embedded axis-aligned in `n` dimensions.
pub fn minimal_set(m: usize, n: usize, spacing: f64) -> Result<GriddedCloud> {
    check_mn(m, n)?;
    let count = 3usize.pow(m as u32);
    let cells = (0..count)
        .map(|mut code| {
            let mut c = vec![0i64; n];
            for slot in c.iter_mut().take(m) {
                *slot = (code % 3) as i64 - 1;
                code /= 3;
            }
            c
        })
        .collect();
    GriddedCloud::from_cells(cells, n, spacing)
}

/// Period of the labeled-grid torus. Types are parities, so the period must
/// be even, and at least 3 so that the offsets `-1` and `+1` stay distinct.
pub const TORUS_PERIOD: i64 = 4;

/// A subset of the labeled grid on the torus `(Z / 4Z)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGrid {
    pub n: usize,
    cells: Vec<Vec<i64>>,
}

impl LabeledGrid {
    /// The full labeled grid, every cell present.
    pub fn full(n: usize) -> Self {
        let total = (TORUS_PERIOD as usize).pow(n as u32);
        let cells = (0..total)
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let d = (code % TORUS_PERIOD as usize) as i64;
                        code /= TORUS_PERIOD as usize;
                        d
                    })
                    .collect()
            })
            .collect();
        Self { n, cells }
    }

    pub fn cells(&self) -> &[Vec<i64>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Type of a cell: its number of odd coordinates.
    pub fn label(cell: &[i64]) -> usize {
        cell.iter().filter(|c| c.is_odd()).count()
    }

    /// Number of present cells per type `0..=n`.
    pub fn census(&self) -> Vec<usize> {
        let mut out = vec![0; self.n + 1];
        for c in &self.cells {
            out[Self::label(c)] += 1;
        }
        out
    }

    /// Exact CF with wraparound neighbor counting.
    pub fn connectivity_factor(&self) -> BigRational {
        if self.n == 0 {
            return BigRational::one();
        }
        let present: std::collections::HashSet<&[i64]> =
            self.cells.iter().map(|c| c.as_slice()).collect();
        let offsets = crate::neighborhood::moore_offsets(self.n);
        let mut total = 0u64;
        let mut probe = vec![0i64; self.n];
        for c in &self.cells {
            for off in offsets.chunks_exact(self.n) {
                for ((p, &x), &o) in probe.iter_mut().zip(c).zip(off) {
                    *p = (x + o).rem_euclid(TORUS_PERIOD);
                }
                if present.contains(probe.as_slice()) {
                    total += 1;
                }
            }
        }
        ratio(
            BigInt::from(total),
            BigInt::from(self.cells.len()) * (pow(3, self.n) - 1),
        )
    }
}

/// Largest oracle dimension accepted by [`maximal_set_torus`].
pub const MAX_TORUS_DIM: usize = 4;

/// `S_max^(n,m)` on the torus: the labeled grid restricted to types `≥ n − m`.
pub fn maximal_set_torus(n: usize, m: usize) -> Result<LabeledGrid> {
    check_mn(m, n)?;
    if n > MAX_TORUS_DIM {
        return Err(Error::domain(format!(
            "torus oracle supports n ≤ {MAX_TORUS_DIM}, got {n}"
        )));
    }
    let full = LabeledGrid::full(n);
    let cells = full
        .cells
        .into_iter()
        .filter(|c| LabeledGrid::label(c) + m >= n)
        .collect();
    Ok(LabeledGrid { n, cells })
}
