use num_complex::Complex;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// Hermitian Toeplitz matrix with first column `u`.
///
/// `u[0]` is taken as real (its imaginary part is dropped), so the result is
/// exactly Hermitian: `T[i,j] = u[i-j]` for `i >= j`, `T[j,i] = conj(T[i,j])`.
pub fn toeplitz_hermitian<T: Real>(u: &[Complex<T>]) -> Result<Matrix<T>> {
    if u.is_empty() {
        return Err(Error::Dimension("toeplitz generator must be non-empty".into()));
    }
    let n = u.len();
    let u0 = Complex::new(u[0].re, T::zero());
    Ok(Matrix::from_fn(n, n, |i, j| {
        if i == j {
            u0
        } else if i > j {
            u[i - j]
        } else {
            u[j - i].conj()
        }
    }))
}

/// Sum of the `m`-th sub-diagonal: `Σ_n A[n+m, n]`. `m = 0` is the trace.
pub fn offset_trace<T: Real>(a: &Matrix<T>, m: usize) -> Result<Complex<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("offset trace of {}x{} matrix", a.rows(), a.cols())));
    }
    if m >= a.rows() {
        return Err(Error::Index { index: m, limit: a.rows() });
    }
    let mut acc = czero();
    for n in 0..a.rows() - m {
        acc += a[(n + m, n)];
    }
    Ok(acc)
}
