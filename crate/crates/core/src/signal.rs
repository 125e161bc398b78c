//! Steering vectors, the RIS measurement matrix and synthetic received
//! signals `r = G·A(θ)·s + c·q + w`.
//!
//! Angles are degrees at every public boundary and radians internally.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{norm_sqr, CVector, Matrix};
use crate::scalar::{cis, czero, Real};

/// Uniform linear array description: element count and spacing in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry<T: Real> {
    pub elements: usize,
    pub spacing: T,
}

impl<T: Real> ArrayGeometry<T> {
    pub fn new(elements: usize, spacing: T) -> Result<Self> {
        if elements < 2 {
            return Err(Error::Parameter(format!("array needs at least 2 elements, got {elements}")));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::Parameter(format!("element spacing must be positive, got {spacing}")));
        }
        Ok(Self { elements, spacing })
    }

    /// Half-wavelength array with `elements` elements.
    pub fn half_wavelength(elements: usize) -> Result<Self> {
        Self::new(elements, T::lit(0.5))
    }

    /// Default minimum target separation, `4/M` in sine units.
    pub fn default_min_separation(&self) -> T {
        T::lit(4.0) / T::from_count(self.elements)
    }
}

fn check_angle<T: Real>(theta_deg: T) -> Result<()> {
    let limit = T::lit(90.0);
    if !theta_deg.is_finite() || theta_deg < -limit || theta_deg > limit {
        return Err(Error::Domain(format!("angle {theta_deg}° outside [-90°, 90°]")));
    }
    Ok(())
}

/// Spatial frequency `d·sin θ` in cycles per element.
pub fn spatial_frequency<T: Real>(theta_deg: T, spacing: T) -> T {
    spacing * theta_deg.to_radians().sin()
}

/// `a(θ)[m] = exp(j·2π·m·d·sin θ)` for `m = 0..len`.
pub fn steering_vector_len<T: Real>(theta_deg: T, spacing: T, len: usize) -> Result<CVector<T>> {
    check_angle(theta_deg)?;
    let f = spatial_frequency(theta_deg, spacing);
    let two_pi = T::TAU();
    Ok((0..len).map(|m| cis(two_pi * T::from_count(m) * f)).collect())
}

/// Array response to a unit source at `theta_deg`.
pub fn steering_vector<T: Real>(theta_deg: T, geometry: &ArrayGeometry<T>) -> Result<CVector<T>> {
    steering_vector_len(theta_deg, geometry.spacing, geometry.elements)
}

/// `M×K` matrix whose `k`-th column is `a(θ_k)`.
pub fn steering_matrix<T: Real>(thetas_deg: &[T], geometry: &ArrayGeometry<T>) -> Result<Matrix<T>> {
    if thetas_deg.is_empty() {
        return Err(Error::Dimension("steering matrix needs at least one angle".into()));
    }
    let columns = thetas_deg
        .iter()
        .map(|&t| steering_vector(t, geometry))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(&columns)
}

/// `rows×cols` matrix of i.i.d. phases `e^{jφ}`, `φ ~ U[0, 2π)`, from a seeded
/// ChaCha stream. Same seed, same bits.
pub fn random_phase_matrix<T: Real>(rows: usize, cols: usize, seed: u64) -> Matrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_pi = std::f64::consts::TAU;
    Matrix::from_fn(rows, cols, |_, _| cis(T::lit(rng.random::<f64>() * two_pi)))
}

/// Random RIS measurement matrix: `n` time slots by `M` elements.
pub fn generate_ris_matrix<T: Real>(n: usize, geometry: &ArrayGeometry<T>, seed: u64) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::Parameter("need at least one measurement".into()));
    }
    Ok(random_phase_matrix(n, geometry.elements, seed))
}

/// `k` unit-modulus amplitudes with uniform random phase.
pub fn random_unit_amplitudes<T: Real, R: Rng>(k: usize, rng: &mut R) -> CVector<T> {
    (0..k).map(|_| cis(T::lit(rng.random::<f64>() * std::f64::consts::TAU))).collect()
}

/// RIS measurement matrix together with the interference signature
/// `c = G·a(ψ)`.
#[derive(Debug, Clone)]
pub struct MeasurementSystem<T: Real> {
    pub g: Matrix<T>,
    pub geometry: ArrayGeometry<T>,
    pub psi_deg: T,
    pub c: CVector<T>,
}

impl<T: Real> MeasurementSystem<T> {
    /// Tolerance on `|G[n,m]| = 1`.
    pub const MODULUS_TOL: f64 = 1e-9;

    pub fn new(g: Matrix<T>, geometry: ArrayGeometry<T>, psi_deg: T) -> Result<Self> {
        if g.rows() == 0 {
            return Err(Error::Dimension("measurement matrix has no rows".into()));
        }
        if g.cols() != geometry.elements {
            return Err(Error::Dimension(format!(
                "measurement matrix has {} columns but the array has {} elements",
                g.cols(),
                geometry.elements
            )));
        }
        let tol = T::lit(Self::MODULUS_TOL);
        if let Some(bad) = g.as_slice().iter().find(|v| (v.norm() - T::one()).abs() > tol) {
            return Err(Error::Domain(format!("measurement entry {bad} is not unit modulus")));
        }
        let c = g.mul_vec(&steering_vector(psi_deg, &geometry)?)?;
        Ok(Self { g, geometry, psi_deg, c })
    }

    pub fn measurements(&self) -> usize {
        self.g.rows()
    }

    pub fn elements(&self) -> usize {
        self.geometry.elements
    }

    /// Noise-free target component `G·A(θ)·s`.
    pub fn target_signal(&self, thetas_deg: &[T], s: &[Complex<T>]) -> Result<CVector<T>> {
        if thetas_deg.len() != s.len() {
            return Err(Error::Dimension(format!(
                "{} angles but {} amplitudes",
                thetas_deg.len(),
                s.len()
            )));
        }
        let a = steering_matrix(thetas_deg, &self.geometry)?;
        self.g.mul_vec(&a.mul_vec(s)?)
    }
}

/// Ground truth for one observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene<T: Real> {
    /// Target angles in degrees, ascending.
    pub thetas: Vec<T>,
    /// Reflected amplitudes, one per target.
    pub s: CVector<T>,
    /// Interference angle in degrees.
    pub psi: T,
    /// Interference amplitude.
    pub q: Complex<T>,
    /// Noise standard deviation (total complex variance `σ_w²`).
    pub sigma_w: T,
}

impl<T: Real> Scene<T> {
    /// Checks the scene invariants; `min_separation` is in sine units.
    pub fn validate(&self, min_separation: T) -> Result<()> {
        if self.thetas.is_empty() {
            return Err(Error::Domain("scene needs at least one target".into()));
        }
        if self.thetas.len() != self.s.len() {
            return Err(Error::Dimension(format!(
                "{} angles but {} amplitudes",
                self.thetas.len(),
                self.s.len()
            )));
        }
        for &t in self.thetas.iter().chain(std::iter::once(&self.psi)) {
            check_angle(t)?;
        }
        for w in self.thetas.windows(2) {
            if w[1] < w[0] {
                return Err(Error::Domain("target angles must be sorted ascending".into()));
            }
            let gap = w[1].to_radians().sin() - w[0].to_radians().sin();
            if gap < min_separation {
                return Err(Error::Domain(format!(
                    "targets {}° and {}° closer than {min_separation} in sine",
                    w[0], w[1]
                )));
            }
        }
        if !(self.sigma_w >= T::zero()) || !self.sigma_w.is_finite() {
            return Err(Error::Domain(format!("noise level must be finite and >= 0, got {}", self.sigma_w)));
        }
        Ok(())
    }
}

/// `r = G·A(θ)·s + c·q + w` with circular complex Gaussian `w` of total
/// variance `σ_w²`. With `σ_w = 0` no noise is drawn at all.
pub fn simulate_received<T: Real>(scene: &Scene<T>, system: &MeasurementSystem<T>, seed: u64) -> Result<CVector<T>> {
    let signal = system.target_signal(&scene.thetas, &scene.s)?;
    let mut r: CVector<T> = signal.iter().zip(&system.c).map(|(&x, &c)| x + c * scene.q).collect();
    if scene.sigma_w > T::zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = scene.sigma_w / T::lit(2.0).sqrt();
        for v in r.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *v += Complex::new(T::lit(re), T::lit(im)).scale(scale);
        }
    }
    Ok(r)
}

/// Mean per-sample power `‖x‖²/len`.
pub fn mean_power<T: Real>(x: &[Complex<T>]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    norm_sqr(x) / T::from_count(x.len())
}

/// Noise level giving `SNR = P_signal / σ_w²` of `snr_db`, where `P_signal`
/// is the mean per-sample power of `G·A(θ)·s`. `+∞` dB gives `σ_w = 0`.
pub fn calibrate_noise<T: Real>(snr_db: T, scene: &Scene<T>, system: &MeasurementSystem<T>) -> Result<T> {
    if snr_db.is_nan() || snr_db == T::neg_infinity() {
        return Err(Error::Domain(format!("SNR must be finite or +inf, got {snr_db}")));
    }
    let power = mean_power(&system.target_signal(&scene.thetas, &scene.s)?);
    if !(power > T::zero()) {
        return Err(Error::Domain("signal power is zero; SNR undefined".into()));
    }
    if snr_db == T::infinity() {
        return Ok(T::zero());
    }
    Ok((power / T::lit(10.0).powf(snr_db / T::lit(10.0))).sqrt())
}

/// Interference amplitude with modulus set by an interference-to-signal
/// power ratio, measured at the sensor: `|q|²·mean|c|² = ISR·P_signal`.
pub fn interference_amplitude<T: Real>(isr_db: T, signal_power: T, c: &[Complex<T>], phase: T) -> Result<Complex<T>> {
    let c_power = mean_power(c);
    if !(c_power > T::zero()) {
        return Err(Error::Domain("interference signature is zero".into()));
    }
    if isr_db == T::neg_infinity() {
        return Ok(czero());
    }
    let ratio = T::lit(10.0).powf(isr_db / T::lit(10.0));
    Ok(cis(phase).scale((ratio * signal_power / c_power).sqrt()))
}
