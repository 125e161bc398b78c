use num_complex::Complex;

use super::matrix::{CVector, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// Lower-triangular Cholesky factor `L` with `A = L Lᴴ` of a Hermitian
/// positive-definite matrix. Fails when a pivot drops to `min_pivot` or below.
pub fn cholesky<T: Real>(a: &Matrix<T>, min_pivot: T) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("cholesky of {}x{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag > min_pivot) {
            return Err(Error::Numerical(format!("non-positive pivot {diag} at column {j}")));
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex::new(ljj, T::zero());
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc.unscale(ljj);
        }
    }
    Ok(l)
}

/// Solves `L Lᴴ x = b` given the Cholesky factor.
pub fn cholesky_solve<T: Real>(l: &Matrix<T>, b: &[Complex<T>]) -> CVector<T> {
    let n = l.rows();
    let mut y = vec![czero(); n];
    for i in 0..n {
        let mut acc = b[i];
        for k in 0..i {
            acc -= l[(i, k)] * y[k];
        }
        y[i] = acc.unscale(l[(i, i)].re);
    }
    let mut x = vec![czero(); n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in i + 1..n {
            acc -= l[(k, i)].conj() * x[k];
        }
        x[i] = acc.unscale(l[(i, i)].re);
    }
    x
}

/// `(τ GᴴG + 2τ I)⁻¹`, the fixed matrix applied in every x-update.
pub fn regularized_gram_inverse<T: Real>(g: &Matrix<T>, tau: T) -> Result<Matrix<T>> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
    }
    let m = g.cols();
    let mut a = g.gram().scaled(tau);
    let shift = T::lit(2.0) * tau;
    for i in 0..m {
        a[(i, i)].re += shift;
    }
    let l = cholesky(&a, T::zero())?;
    let mut inv = Matrix::zeros(m, m);
    let mut e = vec![czero::<T>(); m];
    for j in 0..m {
        e.iter_mut().for_each(|v| *v = czero());
        e[j] = Complex::new(T::one(), T::zero());
        let col = cholesky_solve(&l, &e);
        inv.set_column(j, &col);
    }
    Ok(inv.hermitized())
}
