//! Dense Hermitian eigensolver.
//!
//! The input is reduced to a Hermitian tridiagonal matrix with Householder
//! reflectors, the complex off-diagonal is rotated onto the non-negative reals
//! by a diagonal unitary, and the resulting real symmetric tridiagonal is
//! diagonalized with implicit-shift QL iterations (Wilkinson-type shift).

use num_complex::Complex;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// Eigen-decomposition `A = U Λ Uᴴ` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigResult<T: Real> {
    /// Real eigenvalues, sorted descending.
    pub eigenvalues: Vec<T>,
    /// Unit-norm eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> EigResult<T> {
    /// `U diag(f(λ)) Uᴴ`, built to be exactly Hermitian.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let weights: Vec<(usize, T)> = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| (k, f(l)))
            .filter(|&(_, w)| w != T::zero())
            .collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = czero();
                for &(k, w) in &weights {
                    acc += (u[(i, k)] * u[(j, k)].conj()).scale(w);
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = T::zero();
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.reconstruct_with(|l| l)
    }
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Only the lower triangle is read unless `hermitize` is set, in which case
/// `(A + Aᴴ)/2` is decomposed instead.
pub fn hermitian_eig<T: Real>(a: &Matrix<T>, hermitize: bool) -> Result<EigResult<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::Numerical("non-finite entry in eigensolver input".into()));
    }
    let n = a.rows();
    let mut work = if hermitize { a.hermitized() } else { a.clone() };

    let (mut diag, mut off, q) = tridiagonalize(&mut work);
    // z holds eigenvectors of the tridiagonal as rows.
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    tridiagonal_ql(&mut diag, &mut off, &mut z, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut vectors = Matrix::zeros(n, n);
    for r in 0..n {
        let q_row = q.row(r);
        let out_row = vectors.row_mut(r);
        for (slot, &k) in order.iter().enumerate() {
            let z_row = &z[k * n..(k + 1) * n];
            let mut acc = czero();
            for (qv, &zv) in q_row.iter().zip(z_row) {
                acc += qv.scale(zv);
            }
            out_row[slot] = acc;
        }
    }
    Ok(EigResult {
        eigenvalues: order.iter().map(|&k| diag[k]).collect(),
        eigenvectors: vectors,
    })
}

/// Reduces the Hermitian `a` (lower triangle) to real symmetric tridiagonal
/// form. Returns the diagonal, the off-diagonal (`off[k]` couples `k` and
/// `k+1`, with a trailing zero) and the unitary `Q` with `A = Q T Qᴴ`.
fn tridiagonalize<T: Real>(a: &mut Matrix<T>) -> (Vec<T>, Vec<T>, Matrix<T>) {
    let n = a.rows();
    let mut reflectors: Vec<(Vec<Complex<T>>, T)> = Vec::with_capacity(n.saturating_sub(2));
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let alpha = a[(k + 1, k)];
        let sigma: T = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if sigma == T::zero() {
            reflectors.push((Vec::new(), T::zero()));
            continue;
        }
        let abs_alpha = alpha.norm();
        let norm = (abs_alpha * abs_alpha + sigma).sqrt();
        let phase = if abs_alpha == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            alpha.unscale(abs_alpha)
        };
        let mut v: Vec<Complex<T>> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        v[0] = phase.scale(abs_alpha + norm);
        let vnorm2 = (abs_alpha + norm) * (abs_alpha + norm) + sigma;
        let tau = two / vnorm2;

        // Trailing block: A22 <- H A22 H with H = I - tau v vᴴ.
        let mut p = vec![czero::<T>(); m];
        for i in 0..m {
            let row = a.row(k + 1 + i);
            let mut acc = czero();
            for j in 0..m {
                // Hermitian: use the lower triangle only.
                let aij = if j <= i { row[k + 1 + j] } else { a[(k + 1 + j, k + 1 + i)].conj() };
                acc += aij * v[j];
            }
            p[i] = acc.scale(tau);
        }
        let kappa = super::matrix::dot(&v, &p).re * tau * half;
        let w: Vec<Complex<T>> = p.iter().zip(&v).map(|(pi, vi)| pi - vi.scale(kappa)).collect();
        for i in 0..m {
            let row = a.row_mut(k + 1 + i);
            for j in 0..=i {
                row[k + 1 + j] -= v[i] * w[j].conj() + w[i] * v[j].conj();
            }
        }

        a[(k + 1, k)] = -phase.scale(norm);
        for i in k + 2..n {
            a[(i, k)] = czero();
        }
        reflectors.push((v, tau));
    }

    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let sub: Vec<Complex<T>> = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();

    // Q = H_0 H_1 ... accumulated backwards.
    let mut q = Matrix::identity(n);
    for (k, (v, tau)) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        let m = v.len();
        let mut s = vec![czero::<T>(); m];
        for (i, vi) in v.iter().enumerate() {
            let row = &q.row(k + 1 + i)[k + 1..];
            let vc = vi.conj();
            for (sj, &qij) in s.iter_mut().zip(row) {
                *sj += vc * qij;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let coeff = vi.scale(*tau);
            let row = &mut q.row_mut(k + 1 + i)[k + 1..];
            for (qij, &sj) in row.iter_mut().zip(&s) {
                *qij -= coeff * sj;
            }
        }
    }

    // Rotate the complex off-diagonal onto the non-negative reals.
    let mut off = vec![T::zero(); n];
    let mut phase = Complex::new(T::one(), T::zero());
    for k in 0..n {
        if k > 0 {
            let e = sub[k - 1];
            let mag = e.norm();
            off[k - 1] = mag;
            if mag > T::zero() {
                phase = phase * e.unscale(mag);
            }
            for r in 0..n {
                q[(r, k)] = q[(r, k)] * phase;
            }
        }
    }
    (diag, off, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `z` (row-major, one
/// eigenvector per row) is rotated in place.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], z: &mut [T], n: usize) -> Result<()> {
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let max_iters = 30 * n;
    let mut total_iters = 0usize;
    let mut shift_acc = T::zero();
    let mut tst1 = T::zero();

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                total_iters += 1;
                if total_iters > max_iters {
                    return Err(Error::Numerical(format!(
                        "tridiagonal QL did not converge within {max_iters} iterations"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                shift_acc += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (head, tail) = z.split_at_mut((i + 1) * n);
                    let zi = &mut head[i * n..];
                    let zi1 = &mut tail[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] += shift_acc;
        e[l] = T::zero();
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    Ok(())
}
