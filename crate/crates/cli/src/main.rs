use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use ris_admm::admm::{default_rho_with_floor, solve, AdmmConfig, DiagonalRule, DualStep, RHO_FLOOR};
use ris_admm::bench::{self, ExperimentConfig, Method, Sweep, SweepAxis};
use ris_admm::io;
use ris_admm::signal::{steering_vector, ArrayGeometry};
use ris_admm::spectrum::{music_doas, AngleGrid};
use ris_admm::{CMatrix, CVector, Error, Result};

/// Gridless DOA estimation through a reconfigurable intelligent surface.
#[derive(Parser, Debug)]
#[command(name = "ris-admm", version)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "RIS_ADMM_OUT", default_value = "ris-admm-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw one scene and write G, c, r and the ground truth.
    Simulate(SimulateArgs),
    /// Run the solver on stored G and r; write x, q and residuals.
    Solve(SolveArgs),
    /// Estimate angles from a stored aperture vector x.
    Spectrum(SpectrumArgs),
    /// Monte Carlo sweep over one parameter.
    Bench(ExperimentArgs),
    /// Solver and ℓ1 wall-clock times across array sizes.
    Timing(TimingArgs),
}

/// Flags mirroring the experiment configuration. A `--config` JSON file is
/// applied last and wins over flags.
#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// JSON experiment configuration; its fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "elements", short = 'M')]
    elements: Option<usize>,
    #[arg(long = "measurements", short = 'N')]
    measurements: Option<usize>,
    #[arg(long = "sources", short = 'K')]
    sources: Option<usize>,
    /// Element spacing in wavelengths.
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    isr_db: Option<f64>,
    /// Interference direction in degrees.
    #[arg(long, allow_hyphen_values = true)]
    psi: Option<f64>,
    #[arg(long)]
    no_interference: bool,
    /// Fixed target angles, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_mc: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    /// `rho`, `2tau` or a positive number.
    #[arg(long)]
    dual_step: Option<String>,
    /// `stationary` or `published`.
    #[arg(long)]
    diagonal_rule: Option<String>,
    /// Methods, comma separated: ris-admm, ris-admm-no-c, fft, omp, l1.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// One of iters, M, N, snr_db.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Measurement matrix (text format).
    #[arg(long)]
    g: PathBuf,
    /// Received vector (text format).
    #[arg(long)]
    r: PathBuf,
    /// Interference signature file; alternative to `--psi`.
    #[arg(long, conflicts_with = "psi")]
    c: Option<PathBuf>,
    /// Interference direction in degrees, used to form c = G·a(ψ).
    #[arg(long, allow_hyphen_values = true)]
    psi: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    /// Atomic-norm weight; defaults to σ_w·sqrt(M ln M).
    #[arg(long)]
    rho: Option<f64>,
    /// Noise level used for the default ρ.
    #[arg(long, default_value_t = 0.0)]
    sigma_w: f64,
    #[arg(long, default_value_t = AdmmConfig::<f64>::DEFAULT_TAU)]
    tau: f64,
    #[arg(long, default_value_t = AdmmConfig::<f64>::DEFAULT_ITERS)]
    iters: usize,
    #[arg(long, default_value = "2tau")]
    dual_step: String,
    #[arg(long, default_value = "stationary")]
    diagonal_rule: String,
    /// Pin q to zero.
    #[arg(long)]
    no_interference: bool,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Aperture vector x (text format).
    #[arg(long)]
    x: PathBuf,
    #[arg(long = "sources", short = 'K')]
    sources: usize,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
}

#[derive(Args, Debug)]
struct TimingArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Array sizes, ascending.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
}

/// Recursively overlays `patch` onto `base`.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::default();
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { c.$($field).+ = v; })*
            };
        }
        set!(elements => elements, measurements => measurements, sources => sources, spacing => spacing,
             snr_db => snr_db, isr_db => isr_db, psi => psi_deg, seed => seed, n_mc => n_mc,
             tau => solver.tau, iters => solver.iters);
        if self.no_interference {
            c.interference = false;
        }
        c.fixed_angles = self.angles.clone().or(c.fixed_angles);
        c.solver.rho = self.rho.or(c.solver.rho);
        if let Some(s) = &self.dual_step {
            c.solver.dual_step = DualStep::parse(s)?;
        }
        if let Some(s) = &self.diagonal_rule {
            c.solver.diagonal_rule = DiagonalRule::parse(s)?;
        }
        if let Some(ms) = &self.methods {
            c.methods = ms.iter().map(|m| Method::parse(m)).collect::<Result<_>>()?;
        }
        if let Some(axis) = &self.sweep {
            c.sweep.axis = SweepAxis::parse(axis)?;
        }
        if let Some(values) = &self.values {
            c.sweep.values = values.clone();
        } else if self.sweep.is_some() {
            c.sweep = Sweep { values: default_sweep_values(c.sweep.axis), ..c.sweep };
        }
        if let Some(path) = &self.config {
            let mut base = serde_json::to_value(&c)?;
            let patch: Value = serde_json::from_reader(BufReader::new(File::open(path)?))?;
            merge(&mut base, patch);
            c = serde_json::from_value(base)?;
        }
        c.validate()?;
        Ok(c)
    }
}

fn default_sweep_values(axis: SweepAxis) -> Vec<f64> {
    match axis {
        SweepAxis::Iters => vec![1.0, 10.0, 100.0, 1000.0],
        SweepAxis::Elements => vec![16.0, 32.0, 64.0],
        SweepAxis::Measurements => vec![8.0, 16.0, 32.0],
        SweepAxis::SnrDb => vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn fmt_angles(v: &[f64]) -> String {
    v.iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>().join(", ")
}

fn simulate(out: &Path, args: &SimulateArgs) -> Result<()> {
    let cfg = args.exp.resolve()?;
    let data = bench::draw_trial(&cfg, bench::trial_seed(cfg.seed, 0))?;
    io::write_matrix(create(out, "g.txt")?, &data.system.g)?;
    io::write_vector(create(out, "c.txt")?, &data.system.c)?;
    io::write_vector(create(out, "r.txt")?, &data.r)?;
    std::fs::write(out.join("scene.json"), io::to_json_pretty(&data.scene)?)?;
    println!("targets (deg): {}", fmt_angles(&data.scene.thetas));
    println!("sigma_w: {}", data.scene.sigma_w);
    println!("wrote g.txt, c.txt, r.txt, scene.json to {}", out.display());
    Ok(())
}

fn run_solve(out: &Path, args: &SolveArgs) -> Result<()> {
    let g: CMatrix = io::read_matrix(open(&args.g)?)?;
    let r: CVector = io::read_vector(open(&args.r)?)?;
    let c: CVector = match (&args.c, args.psi) {
        (Some(path), _) => io::read_vector(open(path)?)?,
        (None, Some(psi)) => g.mul_vec(&steering_vector(psi, &ArrayGeometry::new(g.cols(), args.spacing)?)?)?,
        (None, None) => return Err(Error::Config("solve needs --c or --psi".into())),
    };
    let rho = args.rho.unwrap_or_else(|| default_rho_with_floor(args.sigma_w, g.cols() as f64, RHO_FLOOR));
    let mut cfg = AdmmConfig::new(rho)
        .with_tau(args.tau)
        .with_iters(args.iters)
        .with_dual_step(DualStep::parse(&args.dual_step)?)
        .with_diagonal_rule(DiagonalRule::parse(&args.diagonal_rule)?);
    if args.no_interference {
        cfg = cfg.without_interference();
    }
    let sol = solve(&r, &g, &c, &cfg)?;
    io::write_vector(create(out, "x.txt")?, &sol.x)?;
    io::write_residuals_csv(create(out, "residuals.csv")?, &sol.trace)?;
    let summary = serde_json::json!({
        "q": [sol.q.re, sol.q.im],
        "iterations": sol.iterations(),
        "config": cfg,
        "final_primal_z": sol.trace.primal_z.last(),
        "final_primal_Y": sol.trace.primal_y.last(),
    });
    std::fs::write(out.join("solve.json"), serde_json::to_string_pretty(&summary)?)?;
    println!("q = {} {:+}j after {} iterations", sol.q.re, sol.q.im, sol.iterations());
    println!("wrote x.txt, residuals.csv, solve.json to {}", out.display());
    Ok(())
}

fn run_spectrum(out: &Path, args: &SpectrumArgs) -> Result<()> {
    let x: CVector = io::read_vector(open(&args.x)?)?;
    let geometry = ArrayGeometry::new(x.len(), args.spacing)?;
    let grid = AngleGrid::new(-90.0, 90.0, args.step)?;
    let res = music_doas(&x, args.sources, &grid, &geometry)?;
    io::write_spectrum_csv(create(out, "spectrum.csv")?, &res)?;
    let doas = serde_json::json!({ "doas_deg": res.sorted_peaks(), "flagged": res.flagged });
    std::fs::write(out.join("doas.json"), serde_json::to_string_pretty(&doas)?)?;
    println!("DOAs (deg): {}{}", fmt_angles(&res.sorted_peaks()), if res.flagged { " [flagged]" } else { "" });
    Ok(())
}

fn run_bench(out: &Path, args: &ExperimentArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let result = bench::run_sweep(&cfg)?;
    bench::write_sweep_outputs(out, &cfg, &result)?;
    println!("{:>10}  {:<14} {:>10} {:>12} {:>6}", cfg.sweep.axis.name(), "method", "rmse_deg", "runtime_s", "used");
    for r in &result.records {
        println!("{:>10}  {:<14} {:>10.4} {:>12.5} {:>6}", r.sweep_value, r.method.name(), r.rmse_deg, r.mean_runtime_s, r.trials_used);
    }
    println!("wrote {}, {}, {} to {}", bench::SUMMARY_CSV, bench::TRIALS_CSV, bench::SUMMARY_JSON, out.display());
    Ok(())
}

fn run_timing(out: &Path, args: &TimingArgs) -> Result<()> {
    let cfg = args.exp.resolve()?;
    let records = bench::run_timing(&cfg, &args.sizes, args.reps)?;
    bench::write_timing_csv(create(out, "timing.csv")?, &records)?;
    println!("{:>5} {:>14} {:>12} {:>12}", "M", "per_iter_s", "admm_s", "l1_s");
    for r in &records {
        println!("{:>5} {:>14.3e} {:>12.5} {:>12.5}", r.elements, r.per_iter_s, r.admm_solve_s, r.l1_s);
    }
    for w in records.windows(2) {
        println!("per-iteration ratio M={} -> M={}: {:.2}", w[0].elements, w[1].elements, w[1].per_iter_s / w[0].per_iter_s);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Simulate(a) => simulate(&cli.out, a),
        Command::Solve(a) => run_solve(&cli.out, a),
        Command::Spectrum(a) => run_spectrum(&cli.out, a),
        Command::Bench(a) => run_bench(&cli.out, a),
        Command::Timing(a) => run_timing(&cli.out, a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
