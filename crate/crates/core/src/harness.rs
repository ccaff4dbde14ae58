//! Experiment drivers: single trajectories, stabilizer sweeps and temporal
//! convergence ladders against the manufactured solution.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{steps_for, ExperimentConfig};
use crate::diagnostics::{trace_record, TraceRecord};
use crate::error::{Error, Result};
use crate::forcing::manufactured_solution;
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::initial::{self, CircleSpec};
use crate::io::{self, ConvergenceRow};
use crate::scheme::{Forcing, Integrator, SchemeParams, SimState, Stepper};

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    SevenCircles { circles: Vec<CircleSpec>, sharpness: f64 },
    Sinusoidal { amplitude: f64 },
    Random { seed: u64 },
    File { path: PathBuf },
}

impl InitialCondition {
    /// Grid samples of `u_0` (before projection).
    pub fn build(&self, grid: GridSpec) -> Result<RealField> {
        match self {
            InitialCondition::SevenCircles { circles, sharpness } => {
                initial::seven_circles(grid, circles, *sharpness)
            }
            InitialCondition::Sinusoidal { amplitude } => initial::sinusoidal(grid, *amplitude),
            InitialCondition::Random { seed } => initial::random_uniform(grid, *seed),
            InitialCondition::File { path } => initial::from_file(path, grid),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SchemeParams,
    pub grid: GridSpec,
    pub initial: InitialCondition,
    pub integrator: Integrator,
    pub steps: u64,
    pub trace_stride: u64,
    /// Steps at which a snapshot is kept.
    pub snapshot_steps: Vec<u64>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn final_time(&self) -> f64 {
        self.steps as f64 * self.params.tau
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub time: f64,
    pub field: RealField,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: Vec<TraceRecord>,
    pub snapshots: Vec<Snapshot>,
    /// Step that produced a non-finite state, if the run stopped early.
    pub failure: Option<u64>,
    pub final_state: SimState,
}

/// Steps the configured integrator from `u0 = Pi_N u_0`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let u0 = cfg.initial.build(cfg.grid)?;
    let stepper = Stepper::new(cfg.params.clone(), cfg.grid, cfg.integrator)?;
    let start = stepper.transform().forward(&u0)?;
    run_from(cfg, &stepper, start)
}

/// Like [`run`] but from an already projected initial state.
pub fn run_from(cfg: &RunConfig, stepper: &Stepper, start: SpectralField) -> Result<RunOutput> {
    if cfg.trace_stride == 0 {
        return Err(Error::Config("trace_stride must be positive".into()));
    }
    let nu = cfg.params.nu;
    let transform = stepper.transform();
    let mut state = SimState::initial(start);
    let mut trace = vec![trace_record(&state, nu, transform)];
    let mut snapshots = Vec::new();
    let keep_snapshot = |state: &SimState, snapshots: &mut Vec<Snapshot>| {
        if cfg.snapshot_steps.contains(&state.step) {
            snapshots.push(Snapshot {
                step: state.step,
                time: state.time,
                field: RealField::new(cfg.grid, transform.base_values(&state.field))
                    .expect("finite state has finite samples"),
            });
        }
    };
    keep_snapshot(&state, &mut snapshots);
    let mut failure = None;
    for _ in 0..cfg.steps {
        match stepper.advance(&state) {
            Ok(next) => state = next,
            Err(Error::NonFiniteState { step }) => {
                failure = Some(step);
                break;
            }
            Err(e) => return Err(e),
        }
        if state.step.is_multiple_of(cfg.trace_stride) {
            trace.push(trace_record(&state, nu, transform));
        }
        keep_snapshot(&state, &mut snapshots);
    }
    Ok(RunOutput {
        trace,
        snapshots,
        failure,
        final_state: state,
    })
}

/// Runs `base` once per stabilizer value, concurrently.
pub fn sweep_stabilizer(base: &RunConfig, s_values: &[f64]) -> Result<Vec<(f64, RunOutput)>> {
    s_values
        .par_iter()
        .map(|&s| {
            let mut cfg = base.clone();
            cfg.params.stabilizer = s;
            cfg.params.validate()?;
            Ok((s, run(&cfg)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceSpec {
    pub nu: f64,
    pub stabilizer: f64,
    pub grid: GridSpec,
    pub tau0: f64,
    /// Number of halvings; the ladder has `halvings + 1` rungs.
    pub halvings: u32,
    pub final_time: f64,
    pub dealias: bool,
}

impl ConvergenceSpec {
    pub fn taus(&self) -> Vec<f64> {
        (0..=self.halvings)
            .map(|k| self.tau0 / 2f64.powi(k as i32))
            .collect()
    }
}

/// Errors of the forced scheme against `u_e(T)` for `tau0 / 2^k`.
pub fn convergence_study(spec: &ConvergenceSpec) -> Result<Vec<ConvergenceRow>> {
    let taus = spec.taus();
    let steps: Vec<u64> = taus
        .iter()
        .map(|&tau| steps_for(spec.final_time, tau))
        .collect::<Result<_>>()?;
    let exact = manufactured_solution(spec.final_time, spec.grid)?;
    let errors: Vec<(f64, f64)> = taus
        .par_iter()
        .zip(&steps)
        .map(|(&tau, &n)| {
            let params = SchemeParams::new(spec.nu, tau, spec.stabilizer, spec.grid.modes())?
                .with_dealias(spec.dealias)
                .with_forcing(Some(Forcing::Manufactured));
            let stepper = Stepper::new(params, spec.grid, Integrator::ExponentialIntegrator)?;
            let t = stepper.transform();
            let mut state = SimState::initial(t.forward(&initial::sinusoidal(spec.grid, 0.5)?)?);
            for _ in 0..n {
                state = stepper.advance(&state)?;
            }
            relative_errors(&state.field, &exact, t)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(taus.len());
    for (i, (&tau, &(l2, linf))) in taus.iter().zip(&errors).enumerate() {
        let prev = i.checked_sub(1).map(|j| errors[j]);
        rows.push(ConvergenceRow {
            tau,
            l2_rel_err: l2,
            linf_rel_err: linf,
            l2_ratio: prev.map(|p| p.0 / l2),
            linf_ratio: prev.map(|p| p.1 / linf),
        });
    }
    Ok(rows)
}

/// Relative L2 and grid-L-infinity errors of `approx` against grid samples `exact`.
pub fn relative_errors(
    approx: &SpectralField,
    exact: &RealField,
    transform: &crate::transform::Transform,
) -> Result<(f64, f64)> {
    let exact_hat = transform.forward(exact)?;
    let diff = approx.difference(&exact_hat)?;
    let l2 = (diff.weighted_norm_sq(|_| 1.0) / exact_hat.weighted_norm_sq(|_| 1.0)).sqrt();
    let samples = transform.base_values(approx);
    let num = samples
        .iter()
        .zip(exact.values())
        .fold(0.0f64, |a, (u, e)| a.max((u - e).abs()));
    Ok((l2, num / exact.max_abs()))
}

/// Least-squares slope of `log(err)` against `log(tau)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fraction of grid samples with `lo <= |u| <= hi`.
pub fn phase_fraction(field: &RealField, lo: f64, hi: f64) -> f64 {
    let hits = field
        .values()
        .iter()
        .filter(|v| (lo..=hi).contains(&v.abs()))
        .count();
    hits as f64 / field.values().len() as f64
}

/// Writes `trace.csv` and one `.chf` + `.pgm` pair per snapshot into `dir`.
pub fn write_run_outputs(dir: &Path, out: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    io::write_trace_csv(BufWriter::new(File::create(dir.join("trace.csv"))?), &out.trace)?;
    for s in &out.snapshots {
        let stem = format!("snapshot_{:08}", s.step);
        io::write_snapshot_file(dir.join(format!("{stem}.chf")), &s.field, s.time)?;
        io::write_pgm_file(dir.join(format!("{stem}.pgm")), &s.field)?;
    }
    Ok(())
}

/// Writes `manifest.toml`: the full config plus the resolved run facts.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    facts: &[(&str, toml::Value)],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut run = toml::Table::new();
    run.insert("command".into(), command.into());
    run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    for (k, v) in facts {
        run.insert((*k).to_string(), v.clone());
    }
    let config = toml::Table::try_from(cfg).map_err(|e| Error::Config(e.to_string()))?;
    let mut root = toml::Table::new();
    root.insert("run".into(), toml::Value::Table(run));
    root.insert("config".into(), toml::Value::Table(config));
    fs::write(dir.join("manifest.toml"), root.to_string())?;
    Ok(())
}
