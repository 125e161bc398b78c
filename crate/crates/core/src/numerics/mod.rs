//! Complex dense linear algebra used by the solver and the estimators.

mod cholesky;
mod eig;
mod matrix;
mod psd;
mod toeplitz;

pub use cholesky::{cholesky, cholesky_solve, regularized_gram_inverse};
pub use eig::{hermitian_eig, EigResult};
pub use matrix::{all_finite, axpy, dot, norm, norm_sqr, scale, sub, CVector, Matrix};
pub use psd::{min_eigenvalue, project_psd};
pub use toeplitz::{offset_trace, toeplitz_hermitian};
