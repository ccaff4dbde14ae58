//! Independent reference implementations used by the integration tests.
//! Nothing here calls the FFT path.
#![allow(dead_code)]

use std::f64::consts::PI;

use ch_spectral::grid::CELL_AREA;
use ch_spectral::{GridSpec, RealField, SpectralField};
use num_complex::Complex64;

/// `h^2 sum_j u(x_j) exp(-i k.x_j)` for every retained mode, by direct summation.
pub fn direct_dft(f: &RealField) -> Vec<Complex64> {
    let g = f.grid();
    let m = g.samples();
    let h = g.spacing();
    (0..g.mode_count())
        .map(|i| {
            let (k1, k2) = g.wavenumber(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for iy in 0..m {
                for ix in 0..m {
                    let phase = -(k1 as f64 * g.coord(ix) + k2 as f64 * g.coord(iy));
                    acc += f.at(ix, iy) * Complex64::from_polar(1.0, phase);
                }
            }
            acc * h * h
        })
        .collect()
}

/// `(2pi)^-2 sum_k c(k) exp(i k.x)` at every grid point of `grid`.
pub fn direct_synthesis(grid: GridSpec, modes: GridSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    let m = grid.samples();
    let mut out = Vec::with_capacity(m * m);
    for iy in 0..m {
        for ix in 0..m {
            let (x, y) = (grid.coord(ix), grid.coord(iy));
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, c) in coeffs.iter().enumerate() {
                let (k1, k2) = modes.wavenumber(i);
                acc += c * Complex64::from_polar(1.0, k1 as f64 * x + k2 as f64 * y);
            }
            out.push(acc / CELL_AREA);
        }
    }
    out
}

/// Dense coefficient table of width `2 * half + 1` centered on mode zero.
#[derive(Clone)]
pub struct Dense {
    pub half: i64,
    pub c: Vec<Complex64>,
}

impl Dense {
    pub fn from_field(f: &SpectralField) -> Self {
        let half = f.grid().modes() as i64;
        Self { half, c: f.coeffs().to_vec() }
    }

    fn side(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    pub fn get(&self, k1: i64, k2: i64) -> Complex64 {
        if k1.abs() > self.half || k2.abs() > self.half {
            return Complex64::new(0.0, 0.0);
        }
        self.c[((k2 + self.half) as usize) * self.side() + (k1 + self.half) as usize]
    }

    /// Coefficients of the pointwise product, `(2pi)^-2 sum_{p+q=k} a(p) b(q)`.
    pub fn product(&self, other: &Dense) -> Dense {
        let half = self.half + other.half;
        let side = (2 * half + 1) as usize;
        let mut c = vec![Complex64::new(0.0, 0.0); side * side];
        for p2 in -self.half..=self.half {
            for p1 in -self.half..=self.half {
                let a = self.get(p1, p2);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for q2 in -other.half..=other.half {
                    for q1 in -other.half..=other.half {
                        let idx = ((p2 + q2 + half) as usize) * side + (p1 + q1 + half) as usize;
                        c[idx] += a * other.get(q1, q2);
                    }
                }
            }
        }
        for v in &mut c {
            *v /= CELL_AREA;
        }
        Dense { half, c }
    }

    /// Restriction to `|k|_inf <= modes` as a field on `grid`.
    pub fn project(&self, grid: GridSpec) -> Vec<Complex64> {
        (0..grid.mode_count())
            .map(|i| {
                let (k1, k2) = grid.wavenumber(i);
                self.get(k1, k2)
            })
            .collect()
    }
}

/// `Pi_N (u^3 - u)` by coefficient convolution.
pub fn double_well_by_convolution(u: &SpectralField) -> Vec<Complex64> {
    let d = Dense::from_field(u);
    let cube = d.product(&d).product(&d).project(u.grid());
    cube.iter().zip(u.coeffs()).map(|(a, b)| a - b).collect()
}

/// Multipliers straight from the closed forms, with plain `exp`.
pub fn dense_multipliers(nu: f64, tau: f64, s: f64, kappa2: f64) -> (f64, f64) {
    if kappa2 == 0.0 {
        return (1.0, 0.0);
    }
    let k4 = kappa2 * kappa2;
    let e = (-nu * tau * k4).exp();
    let d = 1.0 + s * tau * k4;
    ((s * tau * k4 + e) / d, -(1.0 - e) / (d * nu * kappa2))
}

/// One exponential-integrator step computed densely.
pub fn dense_ei_step(u: &SpectralField, nu: f64, tau: f64, s: f64) -> Vec<Complex64> {
    let g = u.grid();
    let f = double_well_by_convolution(u);
    (0..g.mode_count())
        .map(|i| {
            let (m1, m2) = dense_multipliers(nu, tau, s, g.kappa2(i));
            u.coeffs()[i] * m1 + f[i] * m2
        })
        .collect()
}

/// Semi-discrete right-hand side `-nu |k|^4 u - |k|^2 Pi_N f(u)`.
pub fn semi_discrete_rhs(u: &SpectralField, nu: f64) -> Vec<Complex64> {
    let g = u.grid();
    let f = double_well_by_convolution(u);
    (0..g.mode_count())
        .map(|i| {
            let k2 = g.kappa2(i);
            -nu * k2 * k2 * u.coeffs()[i] - k2 * f[i]
        })
        .collect()
}

/// Classical RK4 on the semi-discrete system, `steps` steps of `dt`.
pub fn rk4(u: &SpectralField, nu: f64, dt: f64, steps: usize) -> SpectralField {
    let g = u.grid();
    let axpy = |base: &SpectralField, k: &[Complex64], a: f64| {
        let c = base.coeffs().iter().zip(k).map(|(b, k)| b + k * a).collect();
        SpectralField::from_coeffs(g, c).unwrap()
    };
    let mut cur = u.clone();
    for _ in 0..steps {
        let k1 = semi_discrete_rhs(&cur, nu);
        let k2 = semi_discrete_rhs(&axpy(&cur, &k1, dt / 2.0), nu);
        let k3 = semi_discrete_rhs(&axpy(&cur, &k2, dt / 2.0), nu);
        let k4 = semi_discrete_rhs(&axpy(&cur, &k3, dt), nu);
        let c = cur
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
            .collect();
        cur = SpectralField::from_coeffs(g, c).unwrap();
    }
    cur
}

/// Largest coefficient difference relative to the largest reference coefficient.
pub fn rel_max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    diff / scale
}

/// A smooth, zero-mean-free test state with a handful of low modes.
pub fn smooth_state(grid: GridSpec) -> RealField {
    RealField::from_fn(grid, |x, y| {
        0.1 + 0.5 * x.sin() * y.sin() + 0.2 * (2.0 * x).cos() - 0.15 * (x + 2.0 * y + 0.3).sin()
    })
    .unwrap()
}

/// Deterministic pseudo-random samples in `[-1, 1]` (splitmix64).
pub fn random_samples(grid: GridSpec, seed: u64) -> RealField {
    let mut state = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let values = (0..grid.sample_count())
        .map(|_| {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect();
    RealField::new(grid, values).unwrap()
}

pub const TWO_PI: f64 = 2.0 * PI;
