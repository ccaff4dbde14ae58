//! Trajectory observables: energy, mass and Sobolev-type norms.

use crate::error::Result;
use crate::grid::{RealField, SpectralField};
use crate::scheme::SimState;
use crate::transform::{double_well, Transform};

/// Observables recorded along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    pub time: f64,
    pub energy: f64,
    pub mass: f64,
    pub linf: f64,
    pub h1_seminorm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub l2: f64,
    /// Maximum over grid samples.
    pub linf: f64,
    pub h1_seminorm: f64,
    pub h_threehalves_seminorm: f64,
}

/// `E(u) = int nu/2 |grad u|^2 + F(u) dx`.
///
/// The gradient term is summed over Fourier coefficients; the potential is
/// integrated on the padded grid, which is exact for the quartic `F`.
pub fn energy(u: &SpectralField, nu: f64, transform: &Transform) -> f64 {
    let gradient = u.weighted_norm_sq(|k2| k2);
    let m = transform.padded_samples();
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let potential: f64 = transform
        .padded_values(u)
        .into_iter()
        .map(double_well)
        .sum::<f64>()
        * h
        * h;
    0.5 * nu * gradient + potential
}

/// Energy of grid samples, after projecting them onto the retained modes.
pub fn energy_of_samples(u: &RealField, nu: f64, transform: &Transform) -> Result<f64> {
    Ok(energy(&transform.forward(u)?, nu, transform))
}

pub fn norms(u: &SpectralField, transform: &Transform) -> Norms {
    let linf = transform
        .base_values(u)
        .into_iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    Norms {
        l2: u.weighted_norm_sq(|_| 1.0).sqrt(),
        linf,
        h1_seminorm: u.weighted_norm_sq(|k2| k2).sqrt(),
        h_threehalves_seminorm: u.weighted_norm_sq(|k2| k2 * k2.sqrt()).sqrt(),
    }
}

/// `||u||_{H^2}` with the weight `1 + |k|^4`.
pub fn h2_norm(u: &SpectralField) -> f64 {
    u.weighted_norm_sq(|k2| 1.0 + k2 * k2).sqrt()
}

pub fn trace_record(state: &SimState, nu: f64, transform: &Transform) -> TraceRecord {
    let n = norms(&state.field, transform);
    TraceRecord {
        step: state.step,
        time: state.time,
        energy: energy(&state.field, nu, transform),
        mass: state.field.mean(),
        linf: n.linf,
        h1_seminorm: n.h1_seminorm,
    }
}

/// Indices `n` where `E(u^{n+1}) > E(u^n) + slack (1 + |E(u^n)|)`.
pub fn energy_increases(trace: &[TraceRecord], slack: f64) -> Vec<u64> {
    trace
        .windows(2)
        .filter(|w| !(w[1].energy <= w[0].energy + slack * (1.0 + w[0].energy.abs())))
        .map(|w| w[0].step)
        .collect()
}

/// Largest relative deviation of the mass from its initial value.
pub fn mass_drift(trace: &[TraceRecord]) -> f64 {
    let Some(first) = trace.first() else {
        return 0.0;
    };
    let m0 = first.mass;
    trace
        .iter()
        .map(|r| {
            let d = (r.mass - m0).abs();
            if d == 0.0 {
                0.0
            } else if m0 == 0.0 {
                f64::INFINITY
            } else {
                d / m0.abs()
            }
        })
        .fold(0.0, f64::max)
}
