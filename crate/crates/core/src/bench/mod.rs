//! Monte Carlo harness: scene draws, per-trial runs of every estimator,
//! RMSE aggregation over sweeps, and timing.

mod config;
mod sweep;
mod trial;

pub use config::{ExperimentConfig, Method, SolverSettings, Sweep, SweepAxis};
pub use sweep::{
    aggregate, read_trials_csv, run_sweep, run_timing, write_summary_csv, write_sweep_outputs, write_timing_csv,
    write_trials_csv, BenchRecord, SweepOutput, TimingRecord, TrialRow, SUMMARY_CSV, SUMMARY_JSON, TRIALS_CSV,
};
pub use trial::{
    admm_config, draw_angles, draw_trial, mix_seed, run_trial, trial_seed, MethodOutcome, TrialData, TrialOutcome,
    MAX_DRAW_ATTEMPTS,
};
