use num_complex::Complex;

use super::grid::AngleGrid;
use super::peaks::{parabolic_offset, pick_peaks, PeakOptions};
use super::SpectrumResult;
use crate::error::{Error, Result};
use crate::numerics::{all_finite, dot, hermitian_eig, norm_sqr, Matrix};
use crate::scalar::{cis, Real};
use crate::signal::{spatial_frequency, ArrayGeometry};

/// `H[i, j] = x[i + j]`, shape `L × (M − L + 1)`.
pub fn hankel_matrix<T: Real>(x: &[Complex<T>], rows: usize) -> Result<Matrix<T>> {
    let m = x.len();
    if rows == 0 || rows > m {
        return Err(Error::Dimension(format!("Hankel row count {rows} must be in 1..={m}")));
    }
    Ok(Matrix::from_fn(rows, m - rows + 1, |i, j| x[i + j]))
}

/// Row count used for the Hankel matrix: `⌊M/2⌋ + 1`.
pub fn hankel_rows(m: usize) -> usize {
    m / 2 + 1
}

/// Orthonormal basis of the noise subspace of `H`: the left singular vectors
/// past the `k` largest, as columns of an `L × (L − k)` matrix.
fn noise_subspace<T: Real>(h: &Matrix<T>, k: usize) -> Result<Vec<Vec<Complex<T>>>> {
    // Left singular vectors of H are the eigenvectors of H·Hᴴ.
    let hh = h.matmul(&h.adjoint())?;
    let eig = hermitian_eig(&hh, true)?;
    Ok((k..hh.rows()).map(|j| eig.eigenvectors.column(j)).collect())
}

/// Single-snapshot Hankel MUSIC with default peak options.
pub fn music_doas<T: Real>(x: &[Complex<T>], k: usize, grid: &AngleGrid<T>, geometry: &ArrayGeometry<T>) -> Result<SpectrumResult<T>> {
    music_doas_with(x, k, grid, geometry, PeakOptions::default())
}

pub fn music_doas_with<T: Real>(
    x: &[Complex<T>],
    k: usize,
    grid: &AngleGrid<T>,
    geometry: &ArrayGeometry<T>,
    opts: PeakOptions,
) -> Result<SpectrumResult<T>> {
    grid.validate()?;
    let m = x.len();
    if m != geometry.elements {
        return Err(Error::Dimension(format!("x has {m} entries, array has {}", geometry.elements)));
    }
    if k == 0 || m < 2 * k {
        return Err(Error::Parameter(format!("need 1 <= K and M >= 2K, got K={k}, M={m}")));
    }
    let n_grid = grid.len();
    if !all_finite(x) || norm_sqr(x) == T::zero() {
        return Ok(SpectrumResult::flat(*grid, k));
    }

    let rows = hankel_rows(m);
    let noise = noise_subspace(&hankel_matrix(x, rows)?, k)?;
    let two_pi = T::TAU();
    // Denominator ‖E_nᴴ a_L(θ)‖² per grid angle.
    let denom: Vec<T> = (0..n_grid)
        .map(|g| {
            let f = spatial_frequency(grid.angle(g), geometry.spacing);
            let a: Vec<Complex<T>> = (0..rows).map(|l| cis(two_pi * T::from_count(l) * f)).collect();
            noise.iter().map(|e| dot(e, &a).norm_sqr()).sum::<T>()
        })
        .collect();
    let tiny = T::min_positive_value();
    let values: Vec<T> = denom.iter().map(|&d| T::one() / d.max(tiny)).collect();
    Ok(SpectrumResult::from_values(*grid, values, &denom, k, opts))
}

impl<T: Real> SpectrumResult<T> {
    /// Picks peaks of `values`; refinement fits a parabola to `smooth`, which
    /// should have its extrema where `values` does (e.g. `1/values`).
    pub fn from_values(grid: AngleGrid<T>, values: Vec<T>, smooth: &[T], k: usize, opts: PeakOptions) -> Self {
        let idx = pick_peaks(&values, k, opts.min_distance);
        let n = values.len();
        let peaks = idx
            .iter()
            .map(|&i| {
                let mut theta = grid.angle(i);
                if opts.interpolate && i > 0 && i + 1 < n {
                    theta += grid.step * parabolic_offset(smooth[i - 1], smooth[i], smooth[i + 1]);
                }
                theta.max(T::lit(-90.0)).min(T::lit(90.0))
            })
            .collect();
        let flagged = idx.len() < k;
        Self { grid, values, peak_indices: idx, peaks, flagged }
    }
}
