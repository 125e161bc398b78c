use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::admm::{default_rho_with_floor, solve_with_inputs, AdmmConfig, SolverInputs};
use crate::baselines::{fft_doa, l1_doa, omp_doa, Dictionary};
use crate::error::{Error, Result};
use crate::signal::{
    calibrate_noise, generate_ris_matrix, interference_amplitude, mean_power, random_unit_amplitudes, simulate_received,
    ArrayGeometry, MeasurementSystem, Scene,
};
use crate::spectrum::{music_doas, AngleGrid, PeakOptions};

/// Rejection-sampling budget for a separated angle set.
pub const MAX_DRAW_ATTEMPTS: usize = 10_000;

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`. Independent of the sweep value so
/// every sweep point sees the same angle draws.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    mix_seed(master, index as u64)
}

fn sine(deg: f64) -> f64 {
    deg.to_radians().sin()
}

/// `k` sorted angles uniform in `range`, pairwise at least `min_sep` apart in
/// sine and at least `min_sep` from `avoid` when given.
pub fn draw_angles<R: Rng>(rng: &mut R, k: usize, range: [f64; 2], min_sep: f64, avoid: Option<f64>) -> Result<Vec<f64>> {
    let [lo, hi] = range;
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let mut th: Vec<f64> = (0..k).map(|_| rng.random_range(lo..hi)).collect();
        th.sort_by(f64::total_cmp);
        let spread = th.windows(2).all(|w| sine(w[1]) - sine(w[0]) >= min_sep);
        let clear = avoid.is_none_or(|psi| th.iter().all(|&t| (sine(t) - sine(psi)).abs() >= min_sep));
        if spread && clear {
            return Ok(th);
        }
    }
    Err(Error::Config(format!(
        "could not place {k} targets in [{lo}, {hi}] with separation {min_sep} after {MAX_DRAW_ATTEMPTS} draws"
    )))
}

/// Scene, measurement system and received data for one trial.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub scene: Scene<f64>,
    pub system: MeasurementSystem<f64>,
    pub r: Vec<num_complex::Complex64>,
}

/// Draws everything random about a trial from `seed`: G, angles,
/// amplitudes, interference phase and noise.
pub fn draw_trial(config: &ExperimentConfig, seed: u64) -> Result<TrialData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g_seed = rng.next_u64();
    let noise_seed = rng.next_u64();
    let geometry = ArrayGeometry::new(config.elements, config.spacing)?;
    let g = generate_ris_matrix(config.measurements, &geometry, g_seed)?;
    let system = MeasurementSystem::new(g, geometry, config.psi_deg)?;

    let avoid = config.interference.then_some(config.psi_deg);
    let thetas = match &config.fixed_angles {
        Some(fixed) => {
            let mut t = fixed.clone();
            t.sort_by(f64::total_cmp);
            t
        }
        None => draw_angles(&mut rng, config.sources, config.angle_range, config.min_separation(), avoid)?,
    };
    let s = random_unit_amplitudes(config.sources, &mut rng);
    let q_phase = rng.random::<f64>() * std::f64::consts::TAU;

    let mut scene = Scene { thetas, s, psi: config.psi_deg, q: num_complex::Complex64::new(0.0, 0.0), sigma_w: 0.0 };
    if config.interference {
        let power = mean_power(&system.target_signal(&scene.thetas, &scene.s)?);
        scene.q = interference_amplitude(config.isr_db, power, &system.c, q_phase)?;
    }
    scene.sigma_w = calibrate_noise(config.snr_db, &scene, &system)?;
    let r = simulate_received(&scene, &system, noise_seed)?;
    Ok(TrialData { scene, system, r })
}

/// One method's result on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    /// Estimated angles in degrees, ascending. Empty on failure.
    pub estimates: Vec<f64>,
    pub runtime_s: f64,
    pub flagged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub truth: Vec<f64>,
    pub outcomes: Vec<MethodOutcome>,
}

/// Solver configuration for a trial with noise level `sigma_w`.
pub fn admm_config(config: &ExperimentConfig, sigma_w: f64) -> AdmmConfig<f64> {
    let s = &config.solver;
    let rho = s.rho.unwrap_or_else(|| default_rho_with_floor(sigma_w, config.elements as f64, s.rho_floor));
    let mut c = AdmmConfig::new(rho).with_tau(s.tau).with_iters(s.iters).with_dual_step(s.dual_step).with_diagonal_rule(s.diagonal_rule);
    c.record_residuals = false;
    c
}

fn run_method(method: Method, config: &ExperimentConfig, data: &TrialData) -> Result<(Vec<f64>, bool)> {
    let k = config.sources;
    let sys = &data.system;
    let rho_for_baseline = || {
        config
            .solver
            .rho
            .unwrap_or_else(|| default_rho_with_floor(data.scene.sigma_w, config.elements as f64, config.solver.rho_floor))
    };
    let baseline_dict = || Dictionary::new(AngleGrid::new(-90.0, 90.0, config.baseline_grid_step)?, &sys.geometry);
    let spectrum = match method {
        Method::RisAdmm | Method::RisAdmmNoC => {
            let mut cfg = admm_config(config, data.scene.sigma_w);
            if method == Method::RisAdmmNoC {
                cfg = cfg.without_interference();
            }
            let inputs = SolverInputs::new(data.r.clone(), sys.g.clone(), sys.c.clone(), cfg.tau)?;
            let sol = solve_with_inputs(&inputs, &cfg)?;
            music_doas(&sol.x, k, &AngleGrid::new(-90.0, 90.0, config.music_grid_step)?, &sys.geometry)?
        }
        Method::Fft => fft_doa(&data.r, &sys.g, &sys.c, &baseline_dict()?, k, PeakOptions::on_grid())?,
        Method::Omp => omp_doa(&data.r, &sys.g, &sys.c, &baseline_dict()?, k)?.spectrum,
        Method::L1 => l1_doa(&data.r, &sys.g, &sys.c, &baseline_dict()?, k, rho_for_baseline(), config.l1)?.spectrum,
    };
    Ok((spectrum.sorted_peaks(), spectrum.flagged))
}

/// Runs every configured method on the trial drawn from `seed`.
///
/// `config` must already have the sweep value applied (see
/// [`ExperimentConfig::at`]). Runtimes cover the estimator only, from the
/// received vector to the angle list.
pub fn run_trial(config: &ExperimentConfig, seed: u64) -> Result<TrialOutcome> {
    let data = draw_trial(config, seed)?;
    let outcomes = config
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let res = run_method(method, config, &data);
            let runtime_s = start.elapsed().as_secs_f64();
            match res {
                Ok((estimates, flagged)) => MethodOutcome { method, estimates, runtime_s, flagged, error: None },
                Err(e) => MethodOutcome { method, estimates: Vec::new(), runtime_s, flagged: true, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(TrialOutcome { seed, truth: data.scene.thetas, outcomes })
}
