use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use ch_spectral::config::ExperimentConfig;
use ch_spectral::harness::{self, RunOutput};
use ch_spectral::io;
use ch_spectral::symbols::{
    certify_symbol_inequalities, default_sweep, random_sweep, DEFAULT_SWEEP_SEED,
};
use ch_spectral::{Error, Result, Transform};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use toml::Value;

mod overrides;

use overrides::{finish, Overrides};

/// Stabilized exponential-integrator Cahn-Hilliard experiments.
#[derive(Parser, Debug)]
#[command(name = "chspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one trajectory and write its trace, snapshots and manifest.
    Run(Overrides),
    /// Run the same experiment once per stabilizer in `s_values`.
    #[command(name = "sweep-s")]
    SweepS(Overrides),
    /// Temporal convergence ladder against the manufactured solution.
    Converge(Overrides),
    /// Check the multiplier symbol inequalities on a parameter sweep.
    Diagnose {
        /// `default`, or `random:<count>[:<seed>]`.
        #[arg(long, default_value = "default")]
        sweep: String,
    },
    /// Render an initial condition to a snapshot and a PGM preview.
    /// `nu` and `tau` default to 0.01 and 0.1 here.
    Ic(Overrides),
}

/// Failure classes with distinct exit codes.
enum Failure {
    Invalid(Error),
    Blowup(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.into())
    }
}

fn out_dir(cfg: &ExperimentConfig, fallback: &str) -> PathBuf {
    PathBuf::from(cfg.out_dir.as_deref().unwrap_or(fallback))
}

fn run_facts(rc: &harness::RunConfig, out: &RunOutput) -> Vec<(&'static str, Value)> {
    let mut facts = vec![
        ("stabilizer", Value::Float(rc.params.stabilizer)),
        ("N", Value::Integer(rc.grid.modes() as i64)),
        ("samples", Value::Integer(rc.grid.samples() as i64)),
        ("padded_samples", Value::Integer(rc.grid.padded_samples() as i64)),
        ("steps", Value::Integer(rc.steps as i64)),
        ("completed_steps", Value::Integer(out.final_state.step as i64)),
    ];
    if let Some(step) = out.failure {
        facts.push(("non_finite_step", Value::Integer(step as i64)));
    }
    facts
}

fn cmd_run(o: &Overrides) -> std::result::Result<(), Failure> {
    let cfg = o.resolve()?;
    let rc = cfg.run_config()?;
    let dir = out_dir(&cfg, "out/run");
    let out = harness::run(&rc)?;
    harness::write_run_outputs(&dir, &out)?;
    harness::write_manifest(&dir, "run", &cfg, &run_facts(&rc, &out))?;
    let last = out.trace.last().expect("trace holds the initial record");
    println!(
        "{} steps, S = {}, E {} -> {}, output in {}",
        out.final_state.step,
        rc.params.stabilizer,
        out.trace[0].energy,
        last.energy,
        dir.display()
    );
    match out.failure {
        Some(step) => Err(Failure::Blowup(format!("state became non-finite at step {step}"))),
        None => Ok(()),
    }
}

fn cmd_sweep(o: &Overrides) -> std::result::Result<(), Failure> {
    let cfg = o.resolve()?;
    let s_values = cfg
        .s_values
        .clone()
        .ok_or_else(|| Error::Config("sweep-s needs `s_values`".into()))?;
    if s_values.is_empty() {
        return Err(Error::Config("`s_values` is empty".into()).into());
    }
    // the stabilizer is swept, so any fixed S only has to be valid
    let mut base_cfg = cfg.clone();
    base_cfg.stabilizer = Some(s_values[0]);
    let base = base_cfg.run_config()?;
    let dir = out_dir(&cfg, "out/sweep_s");
    let runs = harness::sweep_stabilizer(&base, &s_values)?;
    for (s, out) in &runs {
        harness::write_run_outputs(&dir.join(format!("S_{s}")), out)?;
    }
    let traces: Vec<(f64, &[_])> = runs.iter().map(|(s, o)| (*s, o.trace.as_slice())).collect();
    io::write_sweep_csv(BufWriter::new(File::create(dir.join("sweep.csv"))?), &traces)?;
    let mut facts = vec![("samples", Value::Integer(base.grid.samples() as i64))];
    let failed: Vec<String> = runs
        .iter()
        .filter_map(|(s, o)| o.failure.map(|step| format!("S={s} at step {step}")))
        .collect();
    if !failed.is_empty() {
        facts.push((
            "non_finite",
            Value::Array(failed.iter().cloned().map(Value::String).collect()),
        ));
    }
    harness::write_manifest(&dir, "sweep-s", &cfg, &facts)?;
    for (s, out) in &runs {
        let increases = ch_spectral::diagnostics::energy_increases(&out.trace, 1e-10).len();
        println!(
            "S = {s}: {} steps, {increases} energy increases{}",
            out.final_state.step,
            out.failure.map(|n| format!(", non-finite at step {n}")).unwrap_or_default()
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Blowup(format!("non-finite state: {}", failed.join(", "))))
    }
}

fn cmd_converge(o: &Overrides) -> std::result::Result<(), Failure> {
    let mut table = o.table()?;
    if !table.contains_key("tau") {
        if let Some(t0) = table.get("tau0").cloned() {
            table.insert("tau".into(), t0);
        }
    }
    let cfg = finish(table)?;
    let spec = cfg.convergence_spec()?;
    let dir = out_dir(&cfg, "out/converge");
    let rows = match harness::convergence_study(&spec) {
        Err(Error::NonFiniteState { step }) => {
            return Err(Failure::Blowup(format!("state became non-finite at step {step}")))
        }
        r => r?,
    };
    fs::create_dir_all(&dir)?;
    io::write_convergence_csv(BufWriter::new(File::create(dir.join("convergence.csv"))?), &rows)?;
    io::write_convergence_csv(std::io::stdout().lock(), &rows)?;
    let facts = [
        ("samples", Value::Integer(spec.grid.samples() as i64)),
        ("stabilizer", Value::Float(spec.stabilizer)),
        ("initial", Value::String("0.5 sin x sin y (manufactured solution)".into())),
    ];
    harness::write_manifest(&dir, "converge", &cfg, &facts)?;
    Ok(())
}

fn parse_sweep(spec: &str) -> Result<Vec<(f64, f64, f64)>> {
    if spec == "default" {
        return Ok(default_sweep());
    }
    let bad = || Error::Config(format!("unknown sweep `{spec}`; use `default` or `random:<count>[:<seed>]`"));
    let rest = spec.strip_prefix("random:").ok_or_else(bad)?;
    let mut parts = rest.split(':');
    let count: usize = parts.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
    let seed = match parts.next() {
        Some(s) => s.parse().map_err(|_| bad())?,
        None => DEFAULT_SWEEP_SEED,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(random_sweep(count, seed))
}

fn cmd_diagnose(sweep: &str) -> std::result::Result<(), Failure> {
    let cert = certify_symbol_inequalities(parse_sweep(sweep)?);
    println!("checked {} tuples, {} violations", cert.checked, cert.violations.len());
    for v in cert.violations.iter().take(10) {
        println!(
            "  nu={} tau={} |k|^2={}: {:?}",
            v.nu, v.tau, v.kappa2, v.checks
        );
    }
    if cert.passed() {
        Ok(())
    } else {
        Err(Error::InvalidParams("symbol inequalities violated".into()).into())
    }
}

fn cmd_ic(o: &Overrides) -> std::result::Result<(), Failure> {
    let mut table = o.table()?;
    table.entry("nu").or_insert(Value::Float(0.01));
    table.entry("tau").or_insert(Value::Float(0.1));
    let cfg = finish(table)?;
    let grid = cfg.grid()?;
    let raw = cfg.initial_condition()?.build(grid)?;
    let transform = Transform::new(grid);
    let projected = ch_spectral::RealField::new(grid, transform.base_values(&transform.forward(&raw)?))?;
    let dir = out_dir(&cfg, "out/ic");
    fs::create_dir_all(&dir)?;
    io::write_snapshot_file(dir.join("ic.chf"), &raw, 0.0)?;
    io::write_pgm_file(dir.join("ic.pgm"), &projected)?;
    harness::write_manifest(&dir, "ic", &cfg, &[("samples", Value::Integer(grid.samples() as i64))])?;
    println!("wrote {} and {}", dir.join("ic.chf").display(), dir.join("ic.pgm").display());
    Ok(())
}

fn dispatch(cmd: &Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Run(o) => cmd_run(o),
        Command::SweepS(o) => cmd_sweep(o),
        Command::Converge(o) => cmd_converge(o),
        Command::Diagnose { sweep } => cmd_diagnose(sweep),
        Command::Ic(o) => cmd_ic(o),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Blowup(msg)) => {
            eprintln!("error: {msg}; trace written up to the last finite state");
            ExitCode::from(2)
        }
    }
}

