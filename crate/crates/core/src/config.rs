//! Experiment configuration files.
//!
//! Configs are TOML with a fixed key set; unknown keys are rejected. Example:
//!
//! ```toml
//! nu = 0.01
//! tau = 0.1
//! S = 0.1
//! samples = 128
//! steps = 500
//!
//! [ic]
//! kind = "seven_circles"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::harness::{ConvergenceSpec, InitialCondition, RunConfig};
use crate::initial::default_circles;
use crate::scheme::{recommended_stabilizer, Integrator, SchemeParams};
use crate::transform::Transform;

/// Per-axis samples used when neither `N` nor `samples` is given.
pub const DESK_SAMPLES: usize = 128;
/// Per-axis samples of the full-size experiments.
pub const FULL_SAMPLES: usize = 256;
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    #[default]
    SevenCircles,
    Sinusoidal,
    Random,
    File,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcConfig {
    #[serde(default)]
    pub kind: IcKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Decay constant of the circle bumps; defaults to `nu`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorKind {
    #[default]
    Ei,
    ForwardEuler,
}

impl From<IntegratorKind> for Integrator {
    fn from(k: IntegratorKind) -> Self {
        match k {
            IntegratorKind::Ei => Integrator::ExponentialIntegrator,
            IntegratorKind::ForwardEuler => Integrator::ForwardEuler,
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_stride() -> u64 {
    1
}

fn is_true(v: &bool) -> bool {
    *v
}

fn is_one(v: &u64) -> bool {
    *v == 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub nu: f64,
    pub tau: f64,
    /// Stabilizer; when absent it is derived from `beta` and the initial data.
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub stabilizer: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub dealias: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    #[serde(default = "default_stride", skip_serializing_if = "is_one")]
    pub trace_stride: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Stabilizer values for a sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_values: Option<Vec<f64>>,
    /// Largest time step of a convergence ladder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halvings: Option<u32>,
    /// Free text copied into the run manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    #[serde(default)]
    pub ic: IcConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Resolves `N` and `samples` against each other and the desk default.
    pub fn grid(&self) -> Result<GridSpec> {
        match (self.modes, self.samples) {
            (Some(n), Some(m)) => GridSpec::new(n, m),
            (Some(n), None) => GridSpec::with_modes(n),
            (None, Some(m)) => GridSpec::with_samples(m),
            (None, None) => GridSpec::with_samples(DESK_SAMPLES),
        }
    }

    pub fn initial_condition(&self) -> Result<InitialCondition> {
        let ic = &self.ic;
        Ok(match ic.kind {
            IcKind::SevenCircles => InitialCondition::SevenCircles {
                circles: default_circles().to_vec(),
                sharpness: ic.sharpness.unwrap_or(self.nu),
            },
            IcKind::Sinusoidal => InitialCondition::Sinusoidal {
                amplitude: ic.amplitude.unwrap_or(0.5),
            },
            IcKind::Random => InitialCondition::Random {
                seed: ic.seed.unwrap_or(0),
            },
            IcKind::File => InitialCondition::File {
                path: PathBuf::from(
                    ic.path
                        .clone()
                        .ok_or_else(|| Error::Config("ic.kind = \"file\" needs ic.path".into()))?,
                ),
            },
        })
    }

    /// Number of steps implied by `steps` and/or `T`.
    pub fn step_count(&self) -> Result<u64> {
        match (self.steps, self.final_time) {
            (Some(n), None) => Ok(n),
            (None, Some(t)) => steps_for(t, self.tau),
            (Some(n), Some(t)) => {
                if steps_for(t, self.tau)? != n {
                    return Err(Error::Config(format!(
                        "steps = {n} disagrees with T / tau = {t} / {}",
                        self.tau
                    )));
                }
                Ok(n)
            }
            (None, None) => Err(Error::Config("one of `steps` or `T` is required".into())),
        }
    }

    /// The stabilizer to use for initial data `initial` on `grid`.
    pub fn resolve_stabilizer(&self, grid: GridSpec, initial: &InitialCondition) -> Result<f64> {
        if let Some(s) = self.stabilizer {
            return Ok(s);
        }
        let transform = Transform::new(grid);
        let u0 = transform.forward(&initial.build(grid)?)?;
        Ok(recommended_stabilizer(
            &u0,
            self.nu,
            grid.modes(),
            self.beta.unwrap_or(DEFAULT_BETA),
        ))
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let grid = self.grid()?;
        let initial = self.initial_condition()?;
        let stabilizer = self.resolve_stabilizer(grid, &initial)?;
        let params = SchemeParams::new(self.nu, self.tau, stabilizer, grid.modes())?
            .with_dealias(self.dealias);
        let steps = self.step_count()?;
        if self.trace_stride == 0 {
            return Err(Error::Config("trace_stride must be positive".into()));
        }
        let mut snapshot_steps = Vec::with_capacity(self.snapshot_times.len());
        for &t in &self.snapshot_times {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Config(format!("snapshot time {t} is not a non-negative number")));
            }
            let n = (t / self.tau).round();
            if n > steps as f64 {
                return Err(Error::Config(format!("snapshot time {t} lies beyond the final step")));
            }
            snapshot_steps.push(n as u64);
        }
        Ok(RunConfig {
            params,
            grid,
            initial,
            integrator: self.integrator.unwrap_or_default().into(),
            steps,
            trace_stride: self.trace_stride,
            snapshot_steps,
            out_dir: self.out_dir.as_ref().map(PathBuf::from),
        })
    }

    /// Convergence-ladder settings; `tau0` falls back to `tau`.
    pub fn convergence_spec(&self) -> Result<ConvergenceSpec> {
        let final_time = self
            .final_time
            .ok_or_else(|| Error::Config("convergence study needs `T`".into()))?;
        let grid = self.grid()?;
        Ok(ConvergenceSpec {
            nu: self.nu,
            stabilizer: self.stabilizer.unwrap_or(0.0),
            grid,
            tau0: self.tau0.unwrap_or(self.tau),
            halvings: self.halvings.unwrap_or(0),
            final_time,
            dealias: self.dealias,
        })
    }
}

/// `T / tau` when it is an integer up to relative round-off.
pub fn steps_for(final_time: f64, tau: f64) -> Result<u64> {
    if !(final_time.is_finite() && final_time >= 0.0 && tau > 0.0) {
        return Err(Error::Config(format!("invalid T = {final_time} or tau = {tau}")));
    }
    let n = (final_time / tau).round();
    if (n * tau - final_time).abs() > 1e-9 * final_time.max(tau) {
        return Err(Error::Config(format!(
            "T = {final_time} is not a multiple of tau = {tau}"
        )));
    }
    Ok(n as u64)
}
