use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step applied to the multipliers: `P += s·(Y − Q)`, `w += ½·s·(Gx + cq − z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualStep {
    /// `s = ρ`, the atomic-norm weight.
    Rho,
    /// `s = 2τ`, the augmentation weight of the quadratic penalties.
    TwoTau,
    /// Explicit positive value.
    Fixed(f64),
}

impl DualStep {
    pub fn value<T: Real>(&self, rho: T, tau: T) -> T {
        match *self {
            DualStep::Rho => rho,
            DualStep::TwoTau => T::lit(2.0) * tau,
            DualStep::Fixed(v) => T::lit(v),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "rho" => Ok(DualStep::Rho),
            "2tau" => Ok(DualStep::TwoTau),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite())
                .map(DualStep::Fixed)
                .ok_or_else(|| Error::Config(format!("dual step must be \"rho\", \"2tau\" or a positive number, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for DualStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DualStep::Rho => f.write_str("rho"),
            DualStep::TwoTau => f.write_str("2tau"),
            DualStep::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for DualStep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DualStep::Fixed(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for DualStep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Value(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Name(s) => DualStep::parse(&s).map_err(serde::de::Error::custom),
            Repr::Value(v) => DualStep::parse(&v.to_string()).map_err(serde::de::Error::custom),
        }
    }
}

/// Which closed form updates the diagonal entry `u₀` of the Toeplitz block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalRule {
    /// Exact minimizer of the augmented Lagrangian in `u₀`:
    /// `u₀ = (Tr P₁ + 2τ Tr Y₁ − ρ/2) / (2τM)`.
    #[default]
    Stationary,
    /// `u₀ = (Tr P₁ − ρ) / (2τM)`, the form usually quoted for this algorithm.
    /// It drops the penalty pull toward `Tr Y₁`, so `u₀` is not a block
    /// minimizer; kept for comparison runs.
    Published,
}

impl DiagonalRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "stationary" => Ok(DiagonalRule::Stationary),
            "published" => Ok(DiagonalRule::Published),
            other => Err(Error::Config(format!("diagonal rule must be \"stationary\" or \"published\", got {other:?}"))),
        }
    }
}

/// Solver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct AdmmConfig<T: Real> {
    /// Atomic-norm weight ρ.
    pub rho: T,
    /// Penalty weight τ of the augmented Lagrangian.
    pub tau: T,
    pub dual_step: DualStep,
    pub max_iters: usize,
    pub record_residuals: bool,
    /// Stop early once both primal residuals fall below this value.
    pub stop_tolerance: Option<T>,
    pub diagonal_rule: DiagonalRule,
    /// Jointly estimate the interference amplitude `q`. When off, `q` is
    /// pinned to zero and the `c` term drops out of the model.
    pub estimate_interference: bool,
}

impl<T: Real> AdmmConfig<T> {
    pub const DEFAULT_TAU: f64 = 0.25;
    pub const DEFAULT_ITERS: usize = 100;

    pub fn new(rho: T) -> Self {
        Self {
            rho,
            tau: T::lit(Self::DEFAULT_TAU),
            dual_step: DualStep::TwoTau,
            max_iters: Self::DEFAULT_ITERS,
            record_residuals: true,
            stop_tolerance: None,
            diagonal_rule: DiagonalRule::Stationary,
            estimate_interference: true,
        }
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_iters(mut self, iters: usize) -> Self {
        self.max_iters = iters;
        self
    }

    pub fn with_dual_step(mut self, step: DualStep) -> Self {
        self.dual_step = step;
        self
    }

    pub fn with_diagonal_rule(mut self, rule: DiagonalRule) -> Self {
        self.diagonal_rule = rule;
        self
    }

    pub fn without_interference(mut self) -> Self {
        self.estimate_interference = false;
        self
    }

    pub fn dual_step_value(&self) -> T {
        self.dual_step.value(self.rho, self.tau)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.rho) {
            return Err(Error::Parameter(format!("rho must be positive, got {}", self.rho)));
        }
        if !positive(self.tau) {
            return Err(Error::Parameter(format!("tau must be positive, got {}", self.tau)));
        }
        if !positive(self.dual_step_value()) {
            return Err(Error::Parameter(format!("dual step must be positive, got {}", self.dual_step)));
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Floor used for ρ when the noise level is zero.
pub const RHO_FLOOR: f64 = 1e-3;

/// `ρ = σ_w·sqrt(M·ln M)`, or `floor` when `σ_w = 0`.
///
/// `m` is real so the formula can be evaluated off the integers.
pub fn default_rho_with_floor<T: Real>(sigma_w: T, m: T, floor: T) -> T {
    if sigma_w <= T::zero() {
        return floor;
    }
    sigma_w * (m * m.ln()).sqrt()
}

pub fn default_rho<T: Real>(sigma_w: T, elements: usize) -> T {
    default_rho_with_floor(sigma_w, T::from_count(elements), T::lit(RHO_FLOOR))
}
