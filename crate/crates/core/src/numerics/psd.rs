use super::eig::hermitian_eig;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nearest positive semidefinite matrix in Frobenius norm: eigenvalues of the
/// Hermitian part are clamped at zero.
pub fn project_psd<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("PSD projection of {}x{} matrix", a.rows(), a.cols())));
    }
    let eig = hermitian_eig(a, true)?;
    Ok(eig.reconstruct_with(|l| l.max(T::zero())))
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue<T: Real>(a: &Matrix<T>) -> Result<T> {
    let eig = hermitian_eig(a, true)?;
    Ok(*eig.eigenvalues.last().expect("non-empty"))
}
