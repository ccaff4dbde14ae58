//! The stabilized exponential-integrator step and its forward-Euler baseline.
//!
//! In Fourier variables, with `x = nu tau |k|^4` and `s = S tau |k|^4`, the step is
//!
//! ```text
//! u'(k) = m1(k) u(k) + m2(k) [Pi_N f(u)](k) + m_g(k) [Pi_N g(t_n)](k)
//! m1 = (s + e^-x) / (1 + s)
//! m2 = -(1 - e^-x) / ((1 + s) nu |k|^2)
//! m_g = (1 - e^-x) / ((1 + s) nu |k|^4)
//! ```
//!
//! with the zero-mode limits `m1 = 1`, `m2 = 0`, `m_g = tau`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forcing::ManufacturedForcing;
use crate::grid::{GridSpec, SpectralField};
use crate::transform::{Nonlinearity, Transform};

/// Below this argument `1 - exp(-x)` is replaced by its two-term Taylor series.
pub const SMALL_ARGUMENT: f64 = 1e-12;

/// `1 - exp(-x)` without cancellation for small `x`.
#[inline]
pub fn one_minus_exp_neg(x: f64) -> f64 {
    if x < SMALL_ARGUMENT {
        x * (1.0 - 0.5 * x)
    } else {
        -(-x).exp_m1()
    }
}

/// Space-time source terms that can be added to the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forcing {
    /// Source for the manufactured solution `0.5 exp(-t) sin x sin y`.
    Manufactured,
}

/// Time integrator selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    ExponentialIntegrator,
    ForwardEuler,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub nu: f64,
    pub tau: f64,
    pub stabilizer: f64,
    pub modes: usize,
    pub dealias: bool,
    pub forcing: Option<Forcing>,
}

impl SchemeParams {
    pub fn new(nu: f64, tau: f64, stabilizer: f64, modes: usize) -> Result<Self> {
        let p = Self {
            nu,
            tau,
            stabilizer,
            modes,
            dealias: true,
            forcing: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_forcing(mut self, forcing: Option<Forcing>) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::InvalidParams(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidParams(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.stabilizer.is_finite() && self.stabilizer >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "S must be non-negative, got {}",
                self.stabilizer
            )));
        }
        if self.modes < 2 {
            return Err(Error::InvalidParams(format!("N must be at least 2, got {}", self.modes)));
        }
        if self.forcing.is_some() && self.modes < 3 {
            return Err(Error::InvalidParams("manufactured forcing needs N >= 3".into()));
        }
        Ok(())
    }
}

/// Per-mode step multipliers, laid out like [`SpectralField`] coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierSet {
    grid: GridSpec,
    m1: Vec<f64>,
    m2: Vec<f64>,
    mg: Vec<f64>,
}

impl MultiplierSet {
    pub fn build(params: &SchemeParams, grid: GridSpec) -> Result<Self> {
        params.validate()?;
        if grid.modes() != params.modes {
            return Err(Error::InvalidParams(format!(
                "grid keeps N={} modes but parameters ask for N={}",
                grid.modes(),
                params.modes
            )));
        }
        let n = grid.mode_count();
        let (mut m1, mut m2, mut mg) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let (a, b, c) = mode_multipliers(params.nu, params.tau, params.stabilizer, grid.kappa2(i));
            m1[i] = a;
            m2[i] = b;
            mg[i] = c;
        }
        Ok(Self { grid, m1, m2, mg })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn m1(&self) -> &[f64] {
        &self.m1
    }

    pub fn m2(&self) -> &[f64] {
        &self.m2
    }

    pub fn forcing_weight(&self) -> &[f64] {
        &self.mg
    }
}

/// `(m1, m2, m_g)` for a single mode with `|k|^2 = kappa2`.
pub fn mode_multipliers(nu: f64, tau: f64, stabilizer: f64, kappa2: f64) -> (f64, f64, f64) {
    if kappa2 == 0.0 {
        return (1.0, 0.0, tau);
    }
    let kappa4 = kappa2 * kappa2;
    let x = nu * tau * kappa4;
    let s = stabilizer * tau * kappa4;
    let decay = (-x).exp();
    let gap = one_minus_exp_neg(x);
    let denom = 1.0 + s;
    (
        (s + decay) / denom,
        -gap / (denom * nu * kappa2),
        gap / (denom * nu * kappa4),
    )
}

/// A point on a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub step: u64,
    pub time: f64,
    pub field: SpectralField,
}

impl SimState {
    pub fn initial(field: SpectralField) -> Self {
        Self {
            step: 0,
            time: 0.0,
            field,
        }
    }

    fn next(&self, field: SpectralField, tau: f64) -> Result<Self> {
        let step = self.step + 1;
        if !field.is_finite() {
            return Err(Error::NonFiniteState { step });
        }
        Ok(Self {
            step,
            time: step as f64 * tau,
            field,
        })
    }
}

/// One exponential-integrator step with the double-well nonlinearity.
pub fn step(
    state: &SimState,
    mult: &MultiplierSet,
    params: &SchemeParams,
    transform: &Transform,
) -> Result<SimState> {
    let forcing = match params.forcing {
        Some(Forcing::Manufactured) => {
            Some(ManufacturedForcing::new(transform, params.nu)?.at(state.time))
        }
        None => None,
    };
    step_with_map(state, mult, params, transform, Nonlinearity::DoubleWell, forcing.as_ref())
}

/// One exponential-integrator step with an explicit nonlinearity and an
/// already-evaluated source `Pi_N g(t_n)`.
pub fn step_with_map(
    state: &SimState,
    mult: &MultiplierSet,
    params: &SchemeParams,
    transform: &Transform,
    map: Nonlinearity,
    source: Option<&SpectralField>,
) -> Result<SimState> {
    let u = &state.field;
    let nonlinear = transform.apply_nonlinearity(u, map, params.dealias);
    let mut next = SpectralField::zeros(u.grid());
    {
        let out = next.coeffs_mut();
        let (uc, fc) = (u.coeffs(), nonlinear.coeffs());
        for i in 0..out.len() {
            out[i] = uc[i] * mult.m1[i] + fc[i] * mult.m2[i];
        }
        if let Some(g) = source {
            for (o, (gc, w)) in out.iter_mut().zip(g.coeffs().iter().zip(&mult.mg)) {
                *o += gc * *w;
            }
        }
    }
    state.next(next, params.tau)
}

/// Stabilized forward-Euler step,
/// `u' = [u + tau(-nu |k|^4 u - |k|^2 f(u) + g)] / (1 + S tau |k|^4)`.
pub fn step_forward_euler(
    state: &SimState,
    params: &SchemeParams,
    transform: &Transform,
) -> Result<SimState> {
    let forcing = match params.forcing {
        Some(Forcing::Manufactured) => {
            Some(ManufacturedForcing::new(transform, params.nu)?.at(state.time))
        }
        None => None,
    };
    forward_euler_with(state, params, transform, forcing.as_ref())
}

fn forward_euler_with(
    state: &SimState,
    params: &SchemeParams,
    transform: &Transform,
    source: Option<&SpectralField>,
) -> Result<SimState> {
    let u = &state.field;
    let grid = u.grid();
    let nonlinear = transform.apply_nonlinearity(u, Nonlinearity::DoubleWell, params.dealias);
    let (nu, tau, s) = (params.nu, params.tau, params.stabilizer);
    let mut next = SpectralField::zeros(grid);
    let out = next.coeffs_mut();
    for (i, o) in out.iter_mut().enumerate() {
        let k2 = grid.kappa2(i);
        let k4 = k2 * k2;
        let mut rhs = -nu * k4 * u.coeffs()[i] - k2 * nonlinear.coeffs()[i];
        if let Some(g) = source {
            rhs += g.coeffs()[i];
        }
        *o = (u.coeffs()[i] + rhs * tau) / (1.0 + s * tau * k4);
    }
    state.next(next, tau)
}

/// Stabilizer size from the energy-stability condition,
/// `beta (||u0||_{H^2}^2 + |ln nu| / nu + ln N / nu + nu)`.
pub fn recommended_stabilizer(u0: &SpectralField, nu: f64, modes: usize, beta: f64) -> f64 {
    let h2 = u0.weighted_norm_sq(|k2| 1.0 + k2 * k2);
    stabilizer_bound(h2, nu, (modes as f64).ln(), beta)
}

/// The same bound from its scalar ingredients (`log_modes` is `ln N`).
pub fn stabilizer_bound(h2_norm_sq: f64, nu: f64, log_modes: f64, beta: f64) -> f64 {
    beta * (h2_norm_sq + nu.ln().abs() / nu + log_modes / nu + nu)
}

/// Everything needed to advance a trajectory, built once per run.
#[derive(Clone, Debug)]
pub struct Stepper {
    params: SchemeParams,
    integrator: Integrator,
    transform: Transform,
    mult: MultiplierSet,
    forcing: Option<ManufacturedForcing>,
}

impl Stepper {
    pub fn new(params: SchemeParams, grid: GridSpec, integrator: Integrator) -> Result<Self> {
        let transform = Transform::new(grid);
        let mult = MultiplierSet::build(&params, grid)?;
        let forcing = match params.forcing {
            Some(Forcing::Manufactured) => Some(ManufacturedForcing::new(&transform, params.nu)?),
            None => None,
        };
        Ok(Self {
            params,
            integrator,
            transform,
            mult,
            forcing,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn multipliers(&self) -> &MultiplierSet {
        &self.mult
    }

    pub fn advance(&self, state: &SimState) -> Result<SimState> {
        let source = self.forcing.as_ref().map(|f| f.at(state.time));
        match self.integrator {
            Integrator::ExponentialIntegrator => step_with_map(
                state,
                &self.mult,
                &self.params,
                &self.transform,
                Nonlinearity::DoubleWell,
                source.as_ref(),
            ),
            Integrator::ForwardEuler => {
                forward_euler_with(state, &self.params, &self.transform, source.as_ref())
            }
        }
    }
}

/// Single-mode field `amplitude * exp(i k.x)` plus its conjugate partner.
pub fn single_mode(grid: GridSpec, k1: i64, k2: i64, amplitude: Complex64) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    f.set_coeff(k1, k2, amplitude);
    f.set_coeff(-k1, -k2, amplitude.conj());
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{RealField, CELL_AREA};

    #[test]
    fn zero_mode_limits() {
        for (nu, tau, s) in [(1.0, 0.1, 0.0), (0.01, 2.0, 5.0)] {
            assert_eq!(mode_multipliers(nu, tau, s, 0.0), (1.0, 0.0, tau));
        }
    }

    #[test]
    fn unit_mode_without_stabilizer() {
        let (m1, m2, _) = mode_multipliers(1.0, 0.1, 0.0, 1.0);
        assert!((m1 - 0.904_837_418_035_959_6).abs() < 1e-15);
        assert!((m2 + 0.095_162_581_964_040_43).abs() < 1e-15);
    }

    #[test]
    fn diagonal_mode_with_stabilizer() {
        let (m1, m2, _) = mode_multipliers(0.01, 0.1, 0.1, 2.0);
        assert!((m1 - 0.996_161_528_215_376_4).abs() < 1e-14, "{m1}");
        assert!((m2 + 0.191_923_589_231_179_2).abs() < 1e-14, "{m2}");
    }

    #[test]
    fn tiny_argument_uses_taylor_limit() {
        let (_, m2, mg) = mode_multipliers(1e-10, 1e-6, 0.0, 1.0);
        assert!((m2 + 1e-6).abs() < 1e-20);
        assert!((mg - 1e-6).abs() < 1e-20);
        assert_eq!(one_minus_exp_neg(0.0), 0.0);
    }

    #[test]
    fn build_rejects_mismatched_grid() {
        let p = SchemeParams::new(1.0, 0.1, 0.0, 4).unwrap();
        assert!(MultiplierSet::build(&p, GridSpec::with_modes(5).unwrap()).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SchemeParams::new(0.0, 0.1, 0.0, 4).is_err());
        assert!(SchemeParams::new(1.0, -0.1, 0.0, 4).is_err());
        assert!(SchemeParams::new(1.0, 0.1, -1.0, 4).is_err());
        assert!(SchemeParams::new(1.0, 0.1, 0.0, 1).is_err());
        let p = SchemeParams::new(1.0, 0.1, 0.0, 2).unwrap();
        assert!(p.with_forcing(Some(Forcing::Manufactured)).validate().is_err());
    }

    #[test]
    fn constant_state_is_fixed() {
        let g = GridSpec::with_modes(4).unwrap();
        let t = Transform::new(g);
        let u = t.forward(&RealField::constant(g, 0.4).unwrap()).unwrap();
        let p = SchemeParams::new(0.05, 0.3, 0.2, 4).unwrap();
        let m = MultiplierSet::build(&p, g).unwrap();
        let s0 = SimState::initial(u.clone());
        let s1 = step(&s0, &m, &p, &t).unwrap();
        assert_eq!(s1.field.coeff(0, 0), u.coeff(0, 0));
        assert!(s1.field.difference(&u).unwrap().weighted_norm_sq(|_| 1.0) < 1e-26 * CELL_AREA);
        assert_eq!(s1.step, 1);
        assert!((s1.time - 0.3).abs() < 1e-15);
        let e1 = step_forward_euler(&s0, &p, &t).unwrap();
        assert!(e1.field.difference(&u).unwrap().weighted_norm_sq(|_| 1.0) < 1e-26 * CELL_AREA);
    }

    #[test]
    fn linear_map_gives_scalar_recurrence() {
        let g = GridSpec::with_modes(6).unwrap();
        let t = Transform::new(g);
        let p = SchemeParams::new(0.02, 0.05, 0.1, 6).unwrap();
        let m = MultiplierSet::build(&p, g).unwrap();
        for (k1, k2) in [(1, 0), (2, -3), (5, 5)] {
            let a = Complex64::new(0.3, -0.2);
            let s0 = SimState::initial(single_mode(g, k1, k2, a));
            let s1 = step_with_map(&s0, &m, &p, &t, Nonlinearity::Negation, None).unwrap();
            let (m1, m2, _) = mode_multipliers(p.nu, p.tau, p.stabilizer, (k1 * k1 + k2 * k2) as f64);
            let expect = a * (m1 - m2);
            assert!((s1.field.coeff(k1, k2) - expect).norm() < 1e-13 * a.norm());
        }
    }

    #[test]
    fn non_finite_output_is_reported() {
        let g = GridSpec::with_modes(4).unwrap();
        let t = Transform::new(g);
        let p = SchemeParams::new(1.0, 0.1, 0.0, 4).unwrap();
        let m = MultiplierSet::build(&p, g).unwrap();
        let mut u = SpectralField::zeros(g);
        u.set_coeff(0, 0, Complex64::new(f64::INFINITY, 0.0));
        let s0 = SimState { step: 41, time: 4.1, field: u };
        assert!(matches!(step(&s0, &m, &p, &t), Err(Error::NonFiniteState { step: 42 })));
    }

    #[test]
    fn stabilizer_formula() {
        assert_eq!(stabilizer_bound(1.0, 1.0, 1.0, 1.0), 3.0);
        assert_eq!(stabilizer_bound(0.0, 1.0, 0.0, 1.0), 1.0);
        let g = GridSpec::with_modes(4).unwrap();
        // (2pi)^-2 |u_hat(0)|^2 = 1
        let mut u = SpectralField::zeros(g);
        u.set_coeff(0, 0, Complex64::new(CELL_AREA.sqrt(), 0.0));
        let got = recommended_stabilizer(&u, 0.5, 4, 2.0);
        let expect = 2.0 * (1.0 + 0.5f64.ln().abs() / 0.5 + 4f64.ln() / 0.5 + 0.5);
        assert!((got - expect).abs() < 1e-12);
    }
}
