use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::trial::{admm_config, draw_trial, run_trial, trial_seed, TrialOutcome};
use crate::admm::{solve_with_inputs, SolverInputs};
use crate::baselines::{l1_doa, Dictionary};
use crate::error::{Error, Result};
use crate::spectrum::{aggregate_rmse, match_trial, AngleGrid, TrialMatch};

/// Aggregate for one (sweep value, method) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub sweep_axis: String,
    pub sweep_value: f64,
    pub method: Method,
    /// `NaN` when every trial failed.
    pub rmse_deg: f64,
    pub mean_runtime_s: f64,
    pub trials_used: usize,
    /// Trials where the method returned an error; excluded from the RMSE.
    pub failures: usize,
    /// Trials that returned fewer angles than targets (charged at 90°).
    pub flagged: usize,
}

/// One row of the per-trial dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    pub method: Method,
    pub truth: Vec<f64>,
    pub estimates: Vec<f64>,
    /// `None` when the method failed.
    pub squared_error: Option<f64>,
    pub count: usize,
    pub flagged: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub records: Vec<BenchRecord>,
    pub trials: Vec<TrialRow>,
}

fn rows_for(value: f64, index: usize, outcome: TrialOutcome) -> Result<Vec<TrialRow>> {
    outcome
        .outcomes
        .into_iter()
        .map(|o| {
            let scored: Option<TrialMatch<f64>> =
                if o.error.is_none() { Some(match_trial(&o.estimates, &outcome.truth)?) } else { None };
            Ok(TrialRow {
                sweep_value: value,
                trial: index,
                seed: outcome.seed,
                method: o.method,
                truth: outcome.truth.clone(),
                count: outcome.truth.len(),
                squared_error: scored.as_ref().map(|m| m.squared_error),
                flagged: o.flagged || scored.as_ref().is_some_and(|m| m.padded),
                estimates: o.estimates,
                error: o.error,
                runtime_s: o.runtime_s,
            })
        })
        .collect()
}

/// Summary records from per-trial rows; one per (sweep value, method) in
/// first-seen order.
pub fn aggregate(axis: &str, rows: &[TrialRow]) -> Vec<BenchRecord> {
    let mut keys: Vec<(f64, Method)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(v, m)| v.to_bits() == r.sweep_value.to_bits() && m == r.method) {
            keys.push((r.sweep_value, r.method));
        }
    }
    keys.into_iter()
        .map(|(value, method)| {
            let group: Vec<&TrialRow> =
                rows.iter().filter(|r| r.sweep_value.to_bits() == value.to_bits() && r.method == method).collect();
            let matches: Vec<TrialMatch<f64>> = group
                .iter()
                .filter_map(|r| {
                    r.squared_error.map(|e| TrialMatch { squared_error: e, count: r.count, padded: false, assignment: Vec::new() })
                })
                .collect();
            let runtime = group.iter().map(|r| r.runtime_s).sum::<f64>() / group.len() as f64;
            BenchRecord {
                sweep_axis: axis.to_string(),
                sweep_value: value,
                method,
                rmse_deg: aggregate_rmse(&matches).unwrap_or(f64::NAN),
                mean_runtime_s: runtime,
                trials_used: matches.len(),
                failures: group.len() - matches.len(),
                flagged: group.iter().filter(|r| r.flagged).count(),
            }
        })
        .collect()
}

/// Runs `n_mc` trials at every sweep value. Trials run in parallel; results
/// are merged in (sweep value, trial index) order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let mut rows = Vec::new();
    for &value in &config.sweep.values {
        let cfg = config.at(value)?;
        let outcomes: Vec<TrialOutcome> =
            (0..cfg.n_mc).into_par_iter().map(|i| run_trial(&cfg, trial_seed(cfg.seed, i))).collect::<Result<_>>()?;
        for (i, o) in outcomes.into_iter().enumerate() {
            rows.extend(rows_for(value, i, o)?);
        }
    }
    let records = aggregate(config.sweep.axis.name(), &rows);
    Ok(SweepOutput { records, trials: rows })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// `sweep_axis,sweep_value,method,rmse_deg,trials_used,failures,flagged`.
///
/// Runtimes are left out so that the file depends only on the seed.
pub fn write_summary_csv<W: Write>(w: W, records: &[BenchRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["sweep_axis", "sweep_value", "method", "rmse_deg", "trials_used", "failures", "flagged"])?;
    for r in records {
        out.write_record([
            r.sweep_axis.clone(),
            r.sweep_value.to_string(),
            r.method.to_string(),
            r.rmse_deg.to_string(),
            r.trials_used.to_string(),
            r.failures.to_string(),
            r.flagged.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Per-trial dump; angle lists are `;`-separated.
pub fn write_trials_csv<W: Write>(w: W, rows: &[TrialRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "sweep_value",
        "trial",
        "seed",
        "method",
        "truth_deg",
        "estimates_deg",
        "squared_error",
        "count",
        "flagged",
        "error",
    ])?;
    for r in rows {
        out.write_record([
            r.sweep_value.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.method.to_string(),
            join(&r.truth),
            join(&r.estimates),
            r.squared_error.map(|e| e.to_string()).unwrap_or_default(),
            r.count.to_string(),
            r.flagged.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a per-trial dump back. Runtimes are not stored and come back as 0.
pub fn read_trials_csv<R: std::io::Read>(r: R) -> Result<Vec<TrialRow>> {
    let parse_list = |s: &str| -> Result<Vec<f64>> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(';').map(|x| x.parse().map_err(|_| Error::Parse(format!("bad angle {x:?}")))).collect()
    };
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse(format!("trial row has no column {i}")));
        let num = |i: usize| -> Result<f64> { field(i)?.parse().map_err(|_| Error::Parse(format!("bad number in column {i}"))) };
        let int = |i: usize| -> Result<u64> { field(i)?.parse().map_err(|_| Error::Parse(format!("bad integer in column {i}"))) };
        let sq = field(6)?;
        rows.push(TrialRow {
            sweep_value: num(0)?,
            trial: int(1)? as usize,
            seed: int(2)?,
            method: Method::parse(field(3)?)?,
            truth: parse_list(field(4)?)?,
            estimates: parse_list(field(5)?)?,
            squared_error: if sq.is_empty() { None } else { Some(num(6)?) },
            count: int(7)? as usize,
            flagged: field(8)? == "true",
            error: Some(field(9)?.to_string()).filter(|s| !s.is_empty()),
            runtime_s: 0.0,
        });
    }
    Ok(rows)
}

/// Files written by [`write_sweep_outputs`].
pub const SUMMARY_CSV: &str = "summary.csv";
pub const TRIALS_CSV: &str = "trials.csv";
pub const SUMMARY_JSON: &str = "summary.json";

/// Writes `summary.csv`, `trials.csv` and `summary.json` (config plus
/// records with runtimes) into `dir`, creating it if needed.
pub fn write_sweep_outputs(dir: &Path, config: &ExperimentConfig, out: &SweepOutput) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let paths = [dir.join(SUMMARY_CSV), dir.join(TRIALS_CSV), dir.join(SUMMARY_JSON)];
    write_summary_csv(std::fs::File::create(&paths[0])?, &out.records)?;
    write_trials_csv(std::fs::File::create(&paths[1])?, &out.trials)?;
    let json = serde_json::json!({ "config": config, "records": out.records });
    std::fs::write(&paths[2], serde_json::to_string_pretty(&json)?)?;
    Ok(paths.to_vec())
}

/// Wall-clock measurements at one array size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub elements: usize,
    pub iters: usize,
    /// Median solver time divided by the iteration count.
    pub per_iter_s: f64,
    /// Median solver time, precomputation included.
    pub admm_solve_s: f64,
    /// Median ℓ1 baseline time.
    pub l1_s: f64,
    pub reps: usize,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times the solver and the ℓ1 baseline on one drawn scene per array size,
/// sequentially, taking the median of `reps` runs.
pub fn run_timing(config: &ExperimentConfig, m_list: &[usize], reps: usize) -> Result<Vec<TimingRecord>> {
    if reps == 0 || m_list.is_empty() {
        return Err(Error::Config("timing needs at least one size and one repetition".into()));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("timing sizes must be strictly ascending".into()));
    }
    m_list
        .iter()
        .map(|&m| {
            let cfg = ExperimentConfig { elements: m, ..config.clone() };
            cfg.validate()?;
            let data = draw_trial(&cfg, trial_seed(cfg.seed, 0))?;
            let admm = admm_config(&cfg, data.scene.sigma_w);
            let dict = Dictionary::new(AngleGrid::new(-90.0, 90.0, cfg.baseline_grid_step)?, &data.system.geometry)?;
            let rho = admm.rho;
            let mut solve_t = Vec::with_capacity(reps);
            let mut l1_t = Vec::with_capacity(reps);
            for _ in 0..reps {
                let start = Instant::now();
                let inputs = SolverInputs::new(data.r.clone(), data.system.g.clone(), data.system.c.clone(), admm.tau)?;
                solve_with_inputs(&inputs, &admm)?;
                solve_t.push(start.elapsed().as_secs_f64());

                let start = Instant::now();
                l1_doa(&data.r, &data.system.g, &data.system.c, &dict, cfg.sources, rho, cfg.l1)?;
                l1_t.push(start.elapsed().as_secs_f64());
            }
            let solve_s = median(solve_t);
            Ok(TimingRecord {
                elements: m,
                iters: admm.max_iters,
                per_iter_s: solve_s / admm.max_iters as f64,
                admm_solve_s: solve_s,
                l1_s: median(l1_t),
                reps,
            })
        })
        .collect()
}

/// `elements,iters,per_iter_s,admm_solve_s,l1_s,reps`.
pub fn write_timing_csv<W: Write>(w: W, records: &[TimingRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
