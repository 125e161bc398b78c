//! Angle estimation from a recovered aperture vector, and scoring.

mod grid;
mod music;
mod peaks;
mod rmse;

use serde::{Deserialize, Serialize};

pub use grid::AngleGrid;
pub use music::{hankel_matrix, hankel_rows, music_doas, music_doas_with};
pub use peaks::{local_maxima, parabolic_offset, pick_peaks, PeakOptions};
pub use rmse::{aggregate_rmse, match_rmse, match_trial, TrialMatch, MISSING_PENALTY_DEG};

use crate::scalar::Real;

/// Pseudospectrum over a grid and the angles picked from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct SpectrumResult<T: Real> {
    pub grid: AngleGrid<T>,
    pub values: Vec<T>,
    /// Grid indices of the picked peaks, highest first.
    pub peak_indices: Vec<usize>,
    /// Estimated angles in degrees, in the same order as `peak_indices`.
    pub peaks: Vec<T>,
    /// Fewer than the requested number of peaks were found.
    pub flagged: bool,
}

impl<T: Real> SpectrumResult<T> {
    /// Constant spectrum with no peaks, flagged whenever `k > 0`.
    pub fn flat(grid: AngleGrid<T>, k: usize) -> Self {
        Self { values: vec![T::one(); grid.len()], grid, peak_indices: Vec::new(), peaks: Vec::new(), flagged: k > 0 }
    }

    /// Peaks sorted ascending, handy for printing.
    pub fn sorted_peaks(&self) -> Vec<T> {
        let mut p = self.peaks.clone();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        p
    }
}
