//! Triangular ("hat") memberships of neighbor counts against per-dimension
//! anchors, and the weight vectors they sum to.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorKind {
    /// `r_t = 3^t − 1`.
    Theoretical,
    /// Mean neighbor counts measured on calibration spheres.
    Empirical,
}

/// Anchors `r_0..=r_{D_max}`; dimension `t` peaks at `r_t`.
///
/// Outside the table the boundary convention `r_{−1} = r_0`,
/// `r_{D_max+1} = r_{D_max}` applies: the first hat stays at 1 below `r_0`
/// and the last one at 1 above `r_{D_max}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipAnchors {
    anchors: Vec<f64>,
    kind: AnchorKind,
}

impl MembershipAnchors {
    pub fn theoretical(d_max: usize) -> Self {
        let anchors = (0..=d_max).map(|t| 3f64.powi(t as i32) - 1.0).collect();
        Self {
            anchors,
            kind: AnchorKind::Theoretical,
        }
    }

    /// Empirical anchors may be non-monotonic; negative or non-finite values
    /// are clamped to 0.
    pub fn empirical(anchors: Vec<f64>) -> Self {
        let anchors = if anchors.is_empty() { vec![0.0] } else { anchors };
        let anchors = anchors
            .into_iter()
            .map(|a| if a.is_finite() { a.max(0.0) } else { 0.0 })
            .collect();
        Self {
            anchors,
            kind: AnchorKind::Empirical,
        }
    }

    pub fn kind(&self) -> AnchorKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.anchors
    }

    pub fn d_max(&self) -> usize {
        self.anchors.len() - 1
    }

    /// Membership of a neighbor count `x` in every dimension `0..=D_max`.
    ///
    /// Each hat peaks at `r_t` and falls linearly to zero at `r_{t−1}` and
    /// `r_{t+1}`. With non-monotonic anchors both feet may lie on the same
    /// side of the peak, so a count can support more than two dimensions.
    pub fn membership(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.anchors.len()];
        self.accumulate(x, &mut out);
        out
    }

    /// Adds [`Self::membership`] of `x` into `acc`.
    pub fn accumulate(&self, x: f64, acc: &mut [f64]) {
        let r = &self.anchors;
        let last = r.len() - 1;
        for t in 0..=last {
            let peak = r[t];
            if x == peak {
                acc[t] += 1.0;
                continue;
            }
            let left = t.checked_sub(1).map(|u| r[u]);
            let right = (t < last).then(|| r[t + 1]);
            let mut f: f64 = 0.0;
            // (foot, +1 for the upper end of the table, -1 for the lower)
            for (foot, end) in [(left, -1.0), (right, 1.0)] {
                match foot {
                    Some(foot) if foot != peak => {
                        let (dx, span) = (x - peak, foot - peak);
                        if dx * span > 0.0 && dx.abs() <= span.abs() {
                            f = f.max(1.0 - dx.abs() / span.abs());
                        }
                    }
                    // interior plateau: only the peak itself counts
                    Some(_) => {}
                    // past either end of the table the end hats stay at 1:
                    // below r_0 for the first, above r_{D_max} for the last
                    None => {
                        if (x - peak) * end > 0.0 {
                            f = 1.0;
                        }
                    }
                }
            }
            acc[t] += f;
        }
    }
}

/// Summed memberships `W_t` and their normalization `π_t = W_t / Σ W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl WeightVector {
    pub fn from_counts<I: IntoIterator<Item = f64>>(anchors: &MembershipAnchors, counts: I) -> Self {
        let mut raw = vec![0.0; anchors.d_max() + 1];
        for c in counts {
            anchors.accumulate(c, &mut raw);
        }
        Self::from_raw(raw)
    }

    /// Normalizes `raw`; an all-zero vector stays all zero.
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        let normalized = if total > 0.0 {
            raw.iter().map(|w| w / total).collect()
        } else {
            vec![0.0; raw.len()]
        };
        Self { raw, normalized }
    }

    pub fn is_zero(&self) -> bool {
        self.raw.iter().all(|&w| w == 0.0)
    }

    /// Index of the largest weight, ties to the smaller index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (t, &w) in self.raw.iter().enumerate() {
            if w > self.raw[best] {
                best = t;
            }
        }
        best
    }

    /// `round(Σ t·π_t)`, halves rounded up.
    pub fn rounded_mean(&self) -> usize {
        self.mean().round() as usize
    }

    pub fn mean(&self) -> f64 {
        self.normalized.iter().enumerate().map(|(t, p)| t as f64 * p).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn theoretical_anchor_values() {
        assert_eq!(MembershipAnchors::theoretical(3).values(), &[0.0, 2.0, 8.0, 26.0]);
    }

    #[test]
    fn three_neighbors_in_the_plane() {
        let f = MembershipAnchors::theoretical(2).membership(3.0);
        assert!(close(f[0], 0.0));
        assert!(close(f[1], 5.0 / 6.0));
        assert!(close(f[2], 1.0 / 6.0));
    }

    #[test]
    fn peak_is_one() {
        let a = MembershipAnchors::theoretical(4);
        for (t, &r) in a.values().iter().enumerate() {
            let f = a.membership(r);
            for (u, v) in f.iter().enumerate() {
                assert_eq!(*v, if u == t { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn beyond_last_anchor_saturates() {
        let f = MembershipAnchors::theoretical(2).membership(20.0);
        assert_eq!(f, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn below_first_anchor_saturates() {
        let f = MembershipAnchors::empirical(vec![1.0, 3.0]).membership(0.5);
        assert_eq!(f, vec![1.0, 0.0]);
    }

    #[test]
    fn non_monotonic_tail_does_not_saturate_downward() {
        // the last anchor sits below its neighbor; counts under it belong to
        // the lower hats only
        let f = MembershipAnchors::empirical(vec![0.0, 2.0, 10.0, 8.0]).membership(1.0);
        assert_eq!(f, vec![0.5, 0.5, 0.0, 0.0]);
        let f = MembershipAnchors::empirical(vec![0.0, 2.0, 10.0, 8.0]).membership(12.0);
        assert_eq!(f, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn single_anchor_takes_everything() {
        let a = MembershipAnchors::empirical(vec![0.0]);
        assert_eq!(a.membership(0.0), vec![1.0]);
        assert_eq!(a.membership(7.0), vec![1.0]);
    }

    #[test]
    fn non_monotonic_anchors_spread_support() {
        // r = [0, 4, 2, 6]: every hat covers x = 3
        let f = MembershipAnchors::empirical(vec![0.0, 4.0, 2.0, 6.0]).membership(3.0);
        assert!(close(f[0], 0.25));
        assert!(close(f[1], 0.75));
        assert!(close(f[2], 0.75));
        assert!(close(f[3], 0.25));
    }

    #[test]
    fn interior_plateau_is_an_indicator() {
        let a = MembershipAnchors::empirical(vec![0.0, 2.0, 2.0, 2.0, 5.0]);
        let f = a.membership(2.0);
        assert_eq!(f[2], 1.0);
        let f = a.membership(2.5);
        assert_eq!(f[2], 0.0);
    }

    #[test]
    fn weights_argmax_ties_to_smaller() {
        let w = WeightVector::from_raw(vec![1.0, 3.0, 3.0]);
        assert_eq!(w.argmax(), 1);
        assert_eq!(w.normalized, vec![1.0 / 7.0, 3.0 / 7.0, 3.0 / 7.0]);
    }

    #[test]
    fn zero_weights_stay_zero() {
        let w = WeightVector::from_raw(vec![0.0; 3]);
        assert!(w.is_zero());
        assert_eq!(w.rounded_mean(), 0);
    }
}
