use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Peak-picking knobs shared by MUSIC and the grid baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeakOptions {
    /// Minimum index distance between reported peaks.
    pub min_distance: usize,
    /// Refine each peak with a parabola through its two neighbours.
    pub interpolate: bool,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self { min_distance: 2, interpolate: true }
    }
}

impl PeakOptions {
    pub fn on_grid() -> Self {
        Self { interpolate: false, ..Self::default() }
    }
}

/// Indices of local maxima, strictly above the left neighbour and not below
/// the right one (so a plateau yields one peak at its left edge and a flat
/// array yields none). Endpoints count when strictly above their neighbour.
pub fn local_maxima<T: Real>(values: &[T]) -> Vec<usize> {
    let n = values.len();
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if values[0] > values[1] {
        out.push(0);
    }
    for i in 1..n - 1 {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] {
            out.push(i);
        }
    }
    if values[n - 1] > values[n - 2] {
        out.push(n - 1);
    }
    out
}

/// Up to `k` local-maximum indices, highest first (ties to the lower index),
/// at least `min_distance` apart.
pub fn pick_peaks<T: Real>(values: &[T], k: usize, min_distance: usize) -> Vec<usize> {
    let mut cand = local_maxima(values);
    cand.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for i in cand {
        if chosen.len() == k {
            break;
        }
        if chosen.iter().all(|&j| i.abs_diff(j) >= min_distance) {
            chosen.push(i);
        }
    }
    chosen
}

/// Sub-grid offset in steps (within ±½) of the extremum of the parabola
/// through `(−1, a)`, `(0, b)`, `(1, c)`.
pub fn parabolic_offset<T: Real>(a: T, b: T, c: T) -> T {
    let curv = a - T::lit(2.0) * b + c;
    if curv == T::zero() || !curv.is_finite() {
        return T::zero();
    }
    let half = T::lit(0.5);
    (half * (a - c) / curv).max(-half).min(half)
}
