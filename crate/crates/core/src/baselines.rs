//! On-grid comparison estimators: matched-filter (FFT), OMP and ℓ1.
//!
//! All three work on a fixed angle dictionary and so cannot resolve an angle
//! more finely than the grid step.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{all_finite, cholesky, cholesky_solve, dot, hermitian_eig, norm, norm_sqr, CVector, Matrix};
use crate::scalar::{czero, Real};
use crate::signal::{steering_vector, ArrayGeometry};
use crate::spectrum::{pick_peaks, AngleGrid, PeakOptions, SpectrumResult};

/// Steering vectors sampled on a grid, one column per angle.
#[derive(Debug, Clone)]
pub struct Dictionary<T: Real> {
    pub grid: AngleGrid<T>,
    pub atoms: Matrix<T>,
}

impl<T: Real> Dictionary<T> {
    pub fn new(grid: AngleGrid<T>, geometry: &ArrayGeometry<T>) -> Result<Self> {
        grid.validate()?;
        let cols = grid
            .angles()
            .into_iter()
            .map(|a| steering_vector(a, geometry))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, atoms: Matrix::from_columns(&cols)? })
    }

    pub fn len(&self) -> usize {
        self.atoms.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.cols() == 0
    }

    /// Measurement-domain atoms `G·D`.
    pub fn through(&self, g: &Matrix<T>) -> Result<Matrix<T>> {
        g.matmul(&self.atoms)
    }
}

/// Projects `r` off `span{c}`: returns `r − c·q̂` and `q̂ = cᴴr/‖c‖²`.
pub fn remove_interference_ls<T: Real>(r: &[Complex<T>], c: &[Complex<T>]) -> Result<(CVector<T>, Complex<T>)> {
    if r.len() != c.len() {
        return Err(Error::Dimension(format!("r has {} entries, c has {}", r.len(), c.len())));
    }
    let cc = norm_sqr(c);
    if cc <= T::zero() {
        return Err(Error::Domain("interference signature c is zero".into()));
    }
    let q = dot(c, r) / cc;
    Ok((r.iter().zip(c).map(|(r, c)| *r - *c * q).collect(), q))
}

/// Relative size below which the cleaned data are treated as empty.
const EMPTY_RESIDUAL: f64 = 1e-12;

fn clean_or_flat<T: Real>(r: &[Complex<T>], c: &[Complex<T>]) -> Result<Option<CVector<T>>> {
    let (clean, _) = remove_interference_ls(r, c)?;
    let scale = norm(r).max(T::min_positive_value());
    Ok((norm(&clean) > T::lit(EMPTY_RESIDUAL) * scale).then_some(clean))
}

fn check_shapes<T: Real>(r: &[Complex<T>], g: &Matrix<T>, dict: &Dictionary<T>) -> Result<()> {
    if g.rows() != r.len() || g.cols() != dict.atoms.rows() {
        return Err(Error::Dimension(format!(
            "G is {}x{}, r has {} entries, dictionary atoms have {}",
            g.rows(),
            g.cols(),
            r.len(),
            dict.atoms.rows()
        )));
    }
    if !all_finite(r) {
        return Err(Error::Numerical("non-finite received signal".into()));
    }
    Ok(())
}

/// Matched-filter spectrum `|bᴴ r_clean|² / ‖b‖²` on the grid, where `b` is
/// the atom `G·a(θ)` with its component along `c` removed.
///
/// The normalization keeps the spectrum from favouring atoms that `G` happens
/// to amplify; without it the noiseless peak can land off the true angle.
pub fn fft_doa<T: Real>(
    r: &[Complex<T>],
    g: &Matrix<T>,
    c: &[Complex<T>],
    dict: &Dictionary<T>,
    k: usize,
    opts: PeakOptions,
) -> Result<SpectrumResult<T>> {
    check_shapes(r, g, dict)?;
    let Some(clean) = clean_or_flat(r, c)? else {
        return Ok(SpectrumResult::flat(dict.grid, k));
    };
    let b = dict.through(g)?;
    let values: Vec<T> = (0..dict.len())
        .map(|j| {
            let (atom, _) = remove_interference_ls(&b.column(j), c)?;
            let energy = norm_sqr(&atom);
            Ok(if energy > T::zero() { dot(&atom, &clean).norm_sqr() / energy } else { T::zero() })
        })
        .collect::<Result<_>>()?;
    let smooth = values.clone();
    Ok(SpectrumResult::from_values(dict.grid, values, &smooth, k, opts))
}

/// Greedy selection of `k` measurement-domain atoms, projected off `c`, with
/// a least-squares refit after each pick.
///
/// `values` holds the normalized correlations of the first step; `peaks`
/// lists the selected angles in selection order.
pub fn omp_doa<T: Real>(r: &[Complex<T>], g: &Matrix<T>, c: &[Complex<T>], dict: &Dictionary<T>, k: usize) -> Result<OmpResult<T>> {
    check_shapes(r, g, dict)?;
    if k == 0 || k > dict.len() {
        return Err(Error::Parameter(format!("OMP needs 1 <= K <= {}, got {k}", dict.len())));
    }
    let Some(clean) = clean_or_flat(r, c)? else {
        return Ok(OmpResult { spectrum: SpectrumResult::flat(dict.grid, k), residual_norms: Vec::new() });
    };
    let b = dict.through(g)?;
    // Atoms live in the same c-free subspace as the cleaned data.
    let cols: Vec<CVector<T>> = (0..b.cols())
        .map(|j| remove_interference_ls(&b.column(j), c).map(|(a, _)| a))
        .collect::<Result<_>>()?;
    let col_norms: Vec<T> = cols.iter().map(|v| norm(v)).collect();

    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut excluded = vec![false; cols.len()];
    let mut residual = clean.clone();
    let mut residual_norms = vec![norm(&residual)];
    let mut first_values = Vec::new();
    let mut flagged = false;

    while selected.len() < k {
        let corr: Vec<T> = cols
            .iter()
            .zip(&col_norms)
            .map(|(col, &n)| if n > T::zero() { dot(col, &residual).norm() / n } else { T::zero() })
            .collect();
        if first_values.is_empty() {
            first_values = corr.clone();
        }
        let best = (0..cols.len())
            .filter(|&j| !excluded[j] && !selected.contains(&j))
            .max_by(|&a, &b| corr[a].partial_cmp(&corr[b]).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a)));
        let Some(best) = best else {
            flagged = true;
            break;
        };
        selected.push(best);
        let basis: Vec<CVector<T>> = selected.iter().map(|&j| cols[j].clone()).collect();
        match least_squares_residual(&basis, &clean) {
            Some(res) if norm(&res) < *residual_norms.last().expect("seeded") => {
                residual = res;
                residual_norms.push(norm(&residual));
            }
            _ => {
                // Collinear with the current set, or no progress.
                selected.pop();
                excluded[best] = true;
                flagged = true;
            }
        }
    }

    let peaks = selected.iter().map(|&j| dict.grid.angle(j)).collect();
    Ok(OmpResult {
        spectrum: SpectrumResult { grid: dict.grid, values: first_values, peak_indices: selected, peaks, flagged },
        residual_norms,
    })
}

/// OMP output plus the residual norm before the first and after every accepted pick.
#[derive(Debug, Clone)]
pub struct OmpResult<T: Real> {
    pub spectrum: SpectrumResult<T>,
    pub residual_norms: Vec<T>,
}

/// `y − B(BᴴB)⁻¹Bᴴy` for basis columns `B`, or `None` when `BᴴB` is singular.
fn least_squares_residual<T: Real>(basis: &[CVector<T>], y: &[Complex<T>]) -> Option<CVector<T>> {
    let k = basis.len();
    let gram = Matrix::from_fn(k, k, |i, j| dot(&basis[i], &basis[j]));
    let scale = (0..k).map(|i| gram[(i, i)].re).fold(T::zero(), T::max);
    let l = cholesky(&gram, T::lit(1e-10) * scale).ok()?;
    let rhs: CVector<T> = basis.iter().map(|b| dot(b, y)).collect();
    let coef = cholesky_solve(&l, &rhs);
    let mut res = y.to_vec();
    for (b, a) in basis.iter().zip(&coef) {
        for (r, v) in res.iter_mut().zip(b) {
            *r -= *v * *a;
        }
    }
    Some(res)
}

/// Settings for [`l1_doa`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct L1Options {
    pub iters: usize,
    /// Relative objective change in the final iteration above which the run
    /// is reported as not converged.
    pub tolerance: f64,
}

impl Default for L1Options {
    fn default() -> Self {
        Self { iters: 500, tolerance: 1e-6 }
    }
}

/// Output of [`l1_doa`].
#[derive(Debug, Clone)]
pub struct L1Result<T: Real> {
    /// `values` are `|α|` per grid angle.
    pub spectrum: SpectrumResult<T>,
    pub alpha: CVector<T>,
    pub q: Complex<T>,
    /// Objective after each iteration.
    pub objective: Vec<T>,
    pub converged: bool,
}

/// `min_{α,q} ‖r − G·D·α − c·q‖² + ρ‖α‖₁` by proximal gradient on `α`
/// alternated with the exact `q`. Peaks are the `k` largest local maxima of `|α|`.
pub fn l1_doa<T: Real>(
    r: &[Complex<T>],
    g: &Matrix<T>,
    c: &[Complex<T>],
    dict: &Dictionary<T>,
    k: usize,
    rho: T,
    opts: L1Options,
) -> Result<L1Result<T>> {
    check_shapes(r, g, dict)?;
    if opts.iters == 0 {
        return Err(Error::Parameter("l1 needs at least one iteration".into()));
    }
    if !(rho >= T::zero()) || !rho.is_finite() {
        return Err(Error::Parameter(format!("rho must be finite and >= 0, got {rho}")));
    }
    let cc = norm_sqr(c);
    if c.len() != r.len() || cc <= T::zero() {
        return Err(Error::Domain("interference signature c must be non-zero and match r".into()));
    }
    let b = dict.through(g)?;
    // Lipschitz constant of α ↦ Bᴴ(Bα − y): largest eigenvalue of BBᴴ.
    let lip = hermitian_eig(&b.matmul(&b.adjoint())?, true)?.eigenvalues[0];
    let n_atoms = b.cols();
    let mut alpha = vec![czero(); n_atoms];
    let mut q = czero();
    let mut objective = Vec::with_capacity(opts.iters);

    if lip > T::zero() {
        let step = T::one() / lip;
        let thresh = rho * T::lit(0.5) * step;
        let mut fit = vec![czero(); r.len()];
        for _ in 0..opts.iters {
            let unexplained: CVector<T> = r.iter().zip(&fit).map(|(r, f)| *r - *f).collect();
            q = dot(c, &unexplained) / cc;
            let resid: CVector<T> = fit.iter().zip(r).zip(c).map(|((f, r), c)| *f + *c * q - *r).collect();
            let grad = b.adjoint_mul_vec(&resid)?;
            for (a, gr) in alpha.iter_mut().zip(&grad) {
                *a = soft_threshold(*a - *gr * step, thresh);
            }
            fit = b.mul_vec(&alpha)?;
            objective.push(l1_objective(r, &fit, c, q, &alpha, rho));
        }
    } else {
        // B = 0: α stays zero, only q is fit.
        q = dot(c, r) / cc;
        objective.push(l1_objective(r, &vec![czero(); r.len()], c, q, &alpha, rho));
    }
    let converged = match objective.as_slice() {
        [.., prev, last] => (*prev - *last).abs() <= T::lit(opts.tolerance) * last.abs().max(T::min_positive_value()),
        _ => true,
    };

    let values: Vec<T> = alpha.iter().map(|a| a.norm()).collect();
    let idx = pick_peaks(&values, k, PeakOptions::on_grid().min_distance);
    let peaks = idx.iter().map(|&i| dict.grid.angle(i)).collect();
    let spectrum = SpectrumResult { grid: dict.grid, flagged: idx.len() < k || !converged, values, peak_indices: idx, peaks };
    Ok(L1Result { spectrum, alpha, q, objective, converged })
}

fn l1_objective<T: Real>(r: &[Complex<T>], fit: &[Complex<T>], c: &[Complex<T>], q: Complex<T>, alpha: &[Complex<T>], rho: T) -> T {
    let data: T = r.iter().zip(fit).zip(c).map(|((r, f), c)| (*r - *f - *c * q).norm_sqr()).sum();
    data + rho * alpha.iter().map(|a| a.norm()).sum::<T>()
}

/// Complex soft threshold: shrinks the modulus by `t`, keeps the phase.
pub fn soft_threshold<T: Real>(v: Complex<T>, t: T) -> Complex<T> {
    let m = v.norm();
    if m <= t {
        czero()
    } else {
        v * ((m - t) / m)
    }
}
