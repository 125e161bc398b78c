use serde::{Deserialize, Serialize};

use crate::admm::{DiagonalRule, DualStep};
use crate::baselines::L1Options;
use crate::error::{Error, Result};

/// Estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ris-admm")]
    RisAdmm,
    /// The same solver with the interference term switched off.
    #[serde(rename = "ris-admm-no-c")]
    RisAdmmNoC,
    #[serde(rename = "fft")]
    Fft,
    #[serde(rename = "omp")]
    Omp,
    #[serde(rename = "l1")]
    L1,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::RisAdmm, Method::RisAdmmNoC, Method::Fft, Method::Omp, Method::L1];

    pub fn name(&self) -> &'static str {
        match self {
            Method::RisAdmm => "ris-admm",
            Method::RisAdmmNoC => "ris-admm-no-c",
            Method::Fft => "fft",
            Method::Omp => "omp",
            Method::L1 => "l1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "iters")]
    Iters,
    #[serde(rename = "M")]
    Elements,
    #[serde(rename = "N")]
    Measurements,
    #[serde(rename = "snr_db")]
    SnrDb,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Iters => "iters",
            SweepAxis::Elements => "M",
            SweepAxis::Measurements => "N",
            SweepAxis::SnrDb => "snr_db",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [SweepAxis::Iters, SweepAxis::Elements, SweepAxis::Measurements, SweepAxis::SnrDb]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep axis {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self { axis: SweepAxis::SnrDb, values: vec![20.0] }
    }
}

/// Solver knobs; `rho = None` picks `σ_w·sqrt(M ln M)` per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub rho: Option<f64>,
    pub rho_floor: f64,
    pub tau: f64,
    pub dual_step: DualStep,
    pub iters: usize,
    pub diagonal_rule: DiagonalRule,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let base = crate::admm::AdmmConfig::<f64>::new(1.0);
        Self {
            rho: None,
            rho_floor: crate::admm::RHO_FLOOR,
            tau: base.tau,
            dual_step: base.dual_step,
            iters: base.max_iters,
            diagonal_rule: base.diagonal_rule,
        }
    }
}

/// Everything a Monte Carlo run needs. Unset JSON fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// RIS elements `M`.
    pub elements: usize,
    /// Time-slot measurements `N`.
    pub measurements: usize,
    /// Targets `K`.
    pub sources: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
    pub snr_db: f64,
    pub interference: bool,
    pub psi_deg: f64,
    pub isr_db: f64,
    /// Target angles are drawn uniformly from this range (degrees).
    pub angle_range: [f64; 2],
    /// Use these angles in every trial instead of drawing them.
    pub fixed_angles: Option<Vec<f64>>,
    /// Minimum separation in sine units between targets and from the
    /// interference direction; `None` means `4/M`.
    pub min_separation: Option<f64>,
    pub seed: u64,
    pub n_mc: usize,
    pub solver: SolverSettings,
    pub music_grid_step: f64,
    pub baseline_grid_step: f64,
    pub l1: L1Options,
    pub sweep: Sweep,
    pub methods: Vec<Method>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            elements: 64,
            measurements: 32,
            sources: 3,
            spacing: 0.5,
            snr_db: 20.0,
            interference: true,
            psi_deg: 15.0,
            isr_db: 10.0,
            angle_range: [-60.0, 60.0],
            fixed_angles: None,
            min_separation: None,
            seed: 1,
            n_mc: 200,
            solver: SolverSettings::default(),
            music_grid_step: 0.05,
            baseline_grid_step: 1.0,
            l1: L1Options::default(),
            sweep: Sweep::default(),
            methods: vec![Method::RisAdmm, Method::Fft, Method::Omp, Method::L1],
        }
    }
}

fn as_count(v: f64, what: &str) -> Result<usize> {
    if v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::Config(format!("{what} sweep value must be a positive integer, got {v}")))
    }
}

impl ExperimentConfig {
    /// Copy with the sweep parameter set to `value`.
    pub fn at(&self, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match self.sweep.axis {
            SweepAxis::Iters => c.solver.iters = as_count(value, "iters")?,
            SweepAxis::Elements => c.elements = as_count(value, "M")?,
            SweepAxis::Measurements => c.measurements = as_count(value, "N")?,
            SweepAxis::SnrDb => {
                if value.is_nan() || value == f64::NEG_INFINITY {
                    return Err(Error::Config(format!("snr_db sweep value must be finite or +inf, got {value}")));
                }
                c.snr_db = value;
            }
        }
        Ok(c)
    }

    pub fn min_separation(&self) -> f64 {
        self.min_separation.unwrap_or(4.0 / self.elements as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_mc == 0 {
            return bad("n_mc must be at least 1".into());
        }
        if self.elements < 2 || self.measurements == 0 {
            return bad(format!("need M >= 2 and N >= 1, got M={}, N={}", self.elements, self.measurements));
        }
        if self.sources == 0 || self.elements < 2 * self.sources {
            return bad(format!("need 1 <= K <= M/2, got K={}, M={}", self.sources, self.elements));
        }
        if !(self.spacing > 0.0) {
            return bad(format!("spacing must be positive, got {}", self.spacing));
        }
        let [lo, hi] = self.angle_range;
        if !(lo < hi && lo >= -90.0 && hi <= 90.0) {
            return bad(format!("angle range [{lo}, {hi}] must be increasing within [-90, 90]"));
        }
        if let Some(fixed) = &self.fixed_angles {
            if fixed.len() != self.sources {
                return bad(format!("{} fixed angles for K={}", fixed.len(), self.sources));
            }
        }
        if !(self.min_separation() >= 0.0) {
            return bad("min_separation must be >= 0".into());
        }
        if !(self.music_grid_step > 0.0 && self.baseline_grid_step > 0.0) {
            return bad("grid steps must be positive".into());
        }
        if self.solver.iters == 0 || !(self.solver.tau > 0.0) || self.solver.rho.is_some_and(|r| !(r > 0.0)) {
            return bad("solver needs iters >= 1, tau > 0 and rho > 0 when set".into());
        }
        if self.l1.iters == 0 {
            return bad("l1 needs at least one iteration".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.sweep.values.is_empty() {
            return bad("sweep has no values".into());
        }
        for &v in &self.sweep.values {
            self.at(v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"elements": 32, "sweep": {"axis": "N", "values": [8, 16]}, "methods": ["fft", "l1"]}"#).unwrap();
        assert_eq!(c.elements, 32);
        assert_eq!(c.measurements, 32);
        assert_eq!(c.sweep.axis, SweepAxis::Measurements);
        assert_eq!(c.methods, vec![Method::Fft, Method::L1]);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"elemnts": 3}"#).is_err());
    }

    #[test]
    fn sweep_application() {
        let mut c = ExperimentConfig::default();
        c.sweep = Sweep { axis: SweepAxis::Elements, values: vec![16.0] };
        assert_eq!(c.at(16.0).unwrap().elements, 16);
        assert!(c.at(16.5).is_err());
        assert!(c.at(0.0).is_err());
        c.sweep.axis = SweepAxis::SnrDb;
        assert_eq!(c.at(-5.0).unwrap().snr_db, -5.0);
    }

    #[test]
    fn invalid_configs() {
        let mut c = ExperimentConfig { n_mc: 0, ..Default::default() };
        assert!(c.validate().is_err());
        c = ExperimentConfig { sources: 40, ..Default::default() };
        assert!(c.validate().is_err());
        c = ExperimentConfig { methods: vec![], ..Default::default() };
        assert!(c.validate().is_err());
        assert_eq!(Method::parse("omp").unwrap(), Method::Omp);
        assert!(Method::parse("sdp").is_err());
    }
}
