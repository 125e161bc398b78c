//! Gridless direction-of-arrival estimation for passive sensing through a
//! reconfigurable intelligent surface (RIS), with joint removal of a known-
//! direction interference path.
//!
//! The core solver ([`admm::solve`]) runs ADMM on the semidefinite lift of an
//! atomic-norm regularized least-squares problem; [`spectrum`] turns the
//! recovered aperture vector into angles with single-snapshot Hankel MUSIC.
//! [`baselines`] holds the FFT, OMP and on-grid ℓ1 comparison estimators and
//! [`bench`] the Monte Carlo harness.
//!
//! The math is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! it to `f64`, which is what the harness and CLI use.

pub mod admm;
pub mod baselines;
pub mod bench;
pub mod error;
pub mod io;
pub mod numerics;
pub mod scalar;
pub mod signal;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex64;
pub type CMatrix = numerics::Matrix<f64>;
pub type CVector = numerics::CVector<f64>;
pub type AdmmConfig = admm::AdmmConfig<f64>;
pub type AdmmState = admm::AdmmState<f64>;
pub type Scene = signal::Scene<f64>;
pub type MeasurementSystem = signal::MeasurementSystem<f64>;
pub type SpectrumResult = spectrum::SpectrumResult<f64>;
