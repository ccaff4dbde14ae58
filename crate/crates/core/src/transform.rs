//! Forward and inverse transforms between grid samples and truncated
//! Fourier coefficients, and dealiased evaluation of pointwise maps.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, SpectralField, CELL_AREA};

/// Relative tolerance on the imaginary residue accepted by [`Transform::inverse`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// Pointwise maps the solver knows how to evaluate spectrally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nonlinearity {
    /// `f(u) = u^3 - u`, the derivative of the double-well potential.
    DoubleWell,
    /// `u^3`.
    Cube,
    /// `-u`, the linear part of `f` alone.
    Negation,
}

impl Nonlinearity {
    #[inline]
    pub fn apply(self, u: f64) -> f64 {
        match self {
            Nonlinearity::DoubleWell => u * u * u - u,
            Nonlinearity::Cube => u * u * u,
            Nonlinearity::Negation => -u,
        }
    }
}

/// The double-well potential `F(u) = (u^2 - 1)^2 / 4`.
#[inline]
pub fn double_well(u: f64) -> f64 {
    let w = u * u - 1.0;
    0.25 * w * w
}

/// FFT plans for one square grid size.
#[derive(Clone)]
struct Plan {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plan {
    fn new(planner: &mut FftPlanner<f64>, m: usize) -> Self {
        Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    fn run(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(buf, &mut scratch);
        transpose_square(buf, m);
        fft.process_with_scratch(buf, &mut scratch);
        transpose_square(buf, m);
    }

    /// Unnormalized 2D sums `sum_x u(x) exp(-i q.x)` with the grid origin at `-pi`
    /// folded in, so `analyze(...) * h^2` is the integral-normalized coefficient.
    fn analyze(&self, samples: impl Iterator<Item = f64>, grid: GridSpec) -> SpectralField {
        let m = self.m;
        let mut buf: Vec<Complex64> = samples.map(|v| Complex64::new(v, 0.0)).collect();
        debug_assert_eq!(buf.len(), m * m);
        self.run(&mut buf, &self.forward);

        let h = 2.0 * std::f64::consts::PI / m as f64;
        let norm = h * h;
        let mut out = SpectralField::zeros(grid);
        let coeffs = out.coeffs_mut();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let (k1, k2) = grid.wavenumber(i);
            let q1 = k1.rem_euclid(m as i64) as usize;
            let q2 = k2.rem_euclid(m as i64) as usize;
            *c = buf[q2 * m + q1] * (norm * parity(k1 + k2));
        }
        // Symmetrize so transforms of real data are exactly Hermitian.
        let last = coeffs.len() - 1;
        for i in 0..coeffs.len() / 2 {
            let j = last - i;
            let a = coeffs[i];
            let b = coeffs[j];
            coeffs[i] = (a + b.conj()) * 0.5;
            coeffs[j] = coeffs[i].conj();
        }
        let mid = last / 2;
        coeffs[mid].im = 0.0;
        out
    }

    /// Complex samples of the trigonometric polynomial on this plan's grid.
    fn synthesize(&self, field: &SpectralField) -> Vec<Complex64> {
        let m = self.m;
        let grid = field.grid();
        let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
        let scale = 1.0 / CELL_AREA;
        for (i, c) in field.coeffs().iter().enumerate() {
            let (k1, k2) = grid.wavenumber(i);
            let q1 = k1.rem_euclid(m as i64) as usize;
            let q2 = k2.rem_euclid(m as i64) as usize;
            buf[q2 * m + q1] = c * (scale * parity(k1 + k2));
        }
        self.run(&mut buf, &self.inverse);
        buf
    }
}

#[inline]
fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn transpose_square(buf: &mut [Complex64], m: usize) {
    for r in 0..m {
        for c in (r + 1)..m {
            buf.swap(r * m + c, c * m + r);
        }
    }
}

/// Transform machinery bound to one [`GridSpec`]: plans for the base grid and
/// for the zero-padded grid used by nonlinear terms.
#[derive(Clone)]
pub struct Transform {
    grid: GridSpec,
    base: Plan,
    padded: Plan,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform")
            .field("grid", &self.grid)
            .field("padded_samples", &self.padded.m)
            .finish()
    }
}

impl Transform {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let base = Plan::new(&mut planner, grid.samples());
        let padded = Plan::new(&mut planner, grid.padded_samples());
        Self { grid, base, padded }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn padded_samples(&self) -> usize {
        self.padded.m
    }

    /// `Pi_N` of the quadrature Fourier transform of `f`.
    pub fn forward(&self, f: &RealField) -> Result<SpectralField> {
        self.check_grid(f.grid())?;
        if let Some(index) = f.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(self.base.analyze(f.values().iter().copied(), self.grid))
    }

    /// Samples of `F` on the base grid. Fails with `NonHermitianInput` when
    /// the imaginary part of the synthesis is not round-off.
    pub fn inverse(&self, spec: &SpectralField) -> Result<RealField> {
        self.check_grid(spec.grid())?;
        let buf = self.base.synthesize(spec);
        let re_max = buf.iter().fold(0.0f64, |a, z| a.max(z.re.abs()));
        let im_max = buf.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
        let tolerance = IMAG_RESIDUE_TOL * re_max;
        if im_max > tolerance && im_max > 0.0 {
            return Err(Error::NonHermitianInput {
                residue: im_max,
                tolerance,
            });
        }
        RealField::new(self.grid, buf.into_iter().map(|z| z.re).collect())
    }

    /// Real samples on the zero-padded grid (`padded_samples()` per axis).
    pub fn padded_values(&self, spec: &SpectralField) -> Vec<f64> {
        self.padded.synthesize(spec).into_iter().map(|z| z.re).collect()
    }

    /// Real samples on the base grid without the Hermitian check.
    pub fn base_values(&self, spec: &SpectralField) -> Vec<f64> {
        self.base.synthesize(spec).into_iter().map(|z| z.re).collect()
    }

    /// `Pi_N g(u)`. With `dealias` the map is evaluated on the padded grid,
    /// which is exact for cubic `g`; otherwise on the base grid (aliased).
    pub fn apply_nonlinearity(
        &self,
        u: &SpectralField,
        g: Nonlinearity,
        dealias: bool,
    ) -> SpectralField {
        let plan = if dealias { &self.padded } else { &self.base };
        let samples = plan.synthesize(u);
        plan.analyze(samples.into_iter().map(|z| g.apply(z.re)), self.grid)
    }

    fn check_grid(&self, grid: GridSpec) -> Result<()> {
        if grid != self.grid {
            return Err(Error::GridMismatch {
                expected_samples: self.grid.samples(),
                expected_modes: self.grid.modes(),
                found_samples: grid.samples(),
                found_modes: grid.modes(),
            });
        }
        Ok(())
    }
}

/// One-shot forward transform. Prefer [`Transform`] when transforming repeatedly.
pub fn forward_transform(f: &RealField) -> Result<SpectralField> {
    Transform::new(f.grid()).forward(f)
}

/// One-shot inverse transform.
pub fn inverse_transform(spec: &SpectralField) -> Result<RealField> {
    Transform::new(spec.grid()).inverse(spec)
}

/// One-shot `Pi_N g(u)`.
pub fn apply_nonlinearity_dealiased(
    u: &SpectralField,
    g: Nonlinearity,
    dealias: bool,
) -> SpectralField {
    Transform::new(u.grid()).apply_nonlinearity(u, g, dealias)
}
