//! Grid geometry and the two field representations.
//!
//! The domain is the square `[-pi, pi)^2` with periodic boundaries. Samples
//! are stored row-major with the `y` index as the row: `values[iy * M + ix]`.
//! Spectral coefficients are kept for `|k|_inf <= N` only, in a dense
//! `(2N+1) x (2N+1)` table indexed by `(k2 + N) * (2N+1) + (k1 + N)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Area of the periodic cell, `(2 pi)^2`.
pub const CELL_AREA: f64 = 4.0 * PI * PI;

/// Largest per-axis sample count accepted anywhere in the crate.
pub const MAX_SAMPLES: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    modes: usize,
    samples: usize,
}

impl GridSpec {
    /// A grid keeping modes `|k|_inf <= modes` sampled at `samples` points per axis.
    pub fn new(modes: usize, samples: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidGrid("modes per axis must be positive".into()));
        }
        if samples < 2 * modes + 2 {
            return Err(Error::InvalidGrid(format!(
                "samples per axis ({samples}) must be at least 2N+2 = {}",
                2 * modes + 2
            )));
        }
        if samples > MAX_SAMPLES {
            return Err(Error::InvalidGrid(format!(
                "samples per axis ({samples}) exceeds the limit {MAX_SAMPLES}"
            )));
        }
        Ok(Self { modes, samples })
    }

    /// Grid with the default sample count `2(N+1)`.
    pub fn with_modes(modes: usize) -> Result<Self> {
        Self::new(modes, 2 * (modes + 1))
    }

    /// Grid keeping the largest mode set a given sample count can hold, `N = M/2 - 1`.
    pub fn with_samples(samples: usize) -> Result<Self> {
        if samples < 4 {
            return Err(Error::InvalidGrid(format!(
                "samples per axis ({samples}) must be at least 4"
            )));
        }
        Self::new(samples / 2 - 1, samples)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Sample spacing `2 pi / M`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.samples as f64
    }

    /// Physical coordinate of sample `j` along either axis.
    pub fn coord(&self, j: usize) -> f64 {
        -PI + j as f64 * self.spacing()
    }

    /// Side length of the coefficient table, `2N+1`.
    pub fn side(&self) -> usize {
        2 * self.modes + 1
    }

    pub fn mode_count(&self) -> usize {
        self.side() * self.side()
    }

    pub fn sample_count(&self) -> usize {
        self.samples * self.samples
    }

    /// Table index of mode `(k1, k2)`, or `None` when it is not retained.
    pub fn mode_index(&self, k1: i64, k2: i64) -> Option<usize> {
        let n = self.modes as i64;
        if k1.abs() > n || k2.abs() > n {
            return None;
        }
        Some(((k2 + n) as usize) * self.side() + (k1 + n) as usize)
    }

    /// Wavenumber stored at table index `idx`.
    pub fn wavenumber(&self, idx: usize) -> (i64, i64) {
        let n = self.modes as i64;
        let side = self.side();
        ((idx % side) as i64 - n, (idx / side) as i64 - n)
    }

    /// `|k|^2` at table index `idx`.
    pub fn kappa2(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavenumber(idx);
        (k1 * k1 + k2 * k2) as f64
    }

    /// Per-axis sample count of the zero-padded grid used for polynomial
    /// nonlinearities: the smallest 5-smooth integer `>= 4N+1`, which keeps
    /// products up to quartic order alias-free on the retained modes.
    pub fn padded_samples(&self) -> usize {
        next_smooth(4 * self.modes + 1).max(self.samples)
    }
}

fn next_smooth(min: usize) -> usize {
    (min..)
        .find(|&n| {
            let mut m = n;
            for p in [2, 3, 5] {
                while m % p == 0 {
                    m /= p;
                }
            }
            m == 1
        })
        .expect("5-smooth numbers are unbounded")
}

/// Real samples of a field on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.sample_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.sample_count(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let m = grid.samples();
        let mut values = Vec::with_capacity(grid.sample_count());
        for iy in 0..m {
            let y = grid.coord(iy);
            for ix in 0..m {
                values.push(f(grid.coord(ix), y));
            }
        }
        Self::new(grid, values)
    }

    pub fn constant(grid: GridSpec, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.sample_count()])
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.samples() + ix]
    }

    /// Maximum absolute sample.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Truncated Fourier coefficients `u_hat(k)`, `|k|_inf <= N`, with the
/// integral normalization `u_hat(k) = int u(x) exp(-i k.x) dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.mode_count()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.mode_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.mode_count(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of mode `(k1, k2)`; zero for modes outside the table.
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.grid
            .mode_index(k1, k2)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, k1: i64, k2: i64, value: Complex64) {
        let i = self
            .grid
            .mode_index(k1, k2)
            .expect("mode outside the retained set");
        self.coeffs[i] = value;
    }

    /// Spatial mean, `u_hat(0) / (2 pi)^2`.
    pub fn mean(&self) -> f64 {
        self.coeff(0, 0).re / CELL_AREA
    }

    /// Zeroes every mode with `|k|_inf > modes`.
    pub fn truncated(&self, modes: usize) -> Self {
        let mut out = self.clone();
        let limit = modes as i64;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let (k1, k2) = self.grid.wavenumber(i);
            if k1.abs() > limit || k2.abs() > limit {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Largest `|u_hat(-k) - conj(u_hat(k))|`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let last = self.coeffs.len() - 1;
        let worst = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (self.coeffs[last - i] - c.conj()).norm())
            .fold(0.0f64, f64::max);
        worst / scale
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `(2 pi)^-2 sum_k w(|k|^2) |u_hat(k)|^2`, the squared Sobolev-type norm for weight `w`.
    pub fn weighted_norm_sq(&self, weight: impl Fn(f64) -> f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| weight(self.grid.kappa2(i)) * c.norm_sqr())
            .sum::<f64>()
            / CELL_AREA
    }

    /// Coefficient-wise `self - other` on a common grid.
    pub fn difference(&self, other: &SpectralField) -> Result<SpectralField> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SpectralField { grid: self.grid, coeffs })
    }
}
