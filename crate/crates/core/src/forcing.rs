//! Manufactured solution `u_e = 0.5 exp(-t) sin x sin y` and the source term
//! `g = d_t u_e + nu lap^2 u_e - lap f(u_e)` that makes it an exact solution.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, SpectralField};
use crate::transform::Transform;

pub const MANUFACTURED_AMPLITUDE: f64 = 0.5;

/// Amplitude `a(t)` of `u_e = a(t) sin x sin y`.
pub fn manufactured_amplitude(t: f64) -> f64 {
    MANUFACTURED_AMPLITUDE * (-t).exp()
}

/// `u_e(., t)` sampled on the grid.
pub fn manufactured_solution(t: f64, grid: GridSpec) -> Result<RealField> {
    let a = manufactured_amplitude(t);
    RealField::from_fn(grid, |x, y| a * x.sin() * y.sin())
}

/// Precomputed spectra for the manufactured source. Since `d_t u_e = -u_e`,
/// `lap^2 u_e = 4 u_e` and `lap u_e = -2 u_e`, the source is
/// `g = (4 nu - 3) u_e - lap(u_e^3)`: a linear part scaling with `a(t)` and a
/// cubic part scaling with `a(t)^3`.
#[derive(Clone, Debug)]
pub struct ManufacturedForcing {
    nu: f64,
    unit_linear: SpectralField,
    unit_cubic: SpectralField,
}

impl ManufacturedForcing {
    pub fn new(transform: &Transform, nu: f64) -> Result<Self> {
        let grid = transform.grid();
        if grid.modes() < 3 {
            return Err(Error::InvalidParams(
                "manufactured forcing needs N >= 3 to represent u_e^3".into(),
            ));
        }
        let shape = RealField::from_fn(grid, |x, y| x.sin() * y.sin())?;
        let unit_linear = transform.forward(&shape)?;
        let cube = RealField::from_fn(grid, |x, y| (x.sin() * y.sin()).powi(3))?;
        // -lap(v) has symbol |k|^2
        let mut unit_cubic = transform.forward(&cube)?;
        for (i, c) in unit_cubic.coeffs_mut().iter_mut().enumerate() {
            *c *= grid.kappa2(i);
        }
        Ok(Self {
            nu,
            unit_linear,
            unit_cubic,
        })
    }

    /// `Pi_N g(., t)`.
    pub fn at(&self, t: f64) -> SpectralField {
        let a = manufactured_amplitude(t);
        let lin = (4.0 * self.nu - 3.0) * a;
        let cub = a * a * a;
        let mut out = self.unit_linear.clone();
        for (o, c) in out.coeffs_mut().iter_mut().zip(self.unit_cubic.coeffs()) {
            *o = *o * lin + c * cub;
        }
        out
    }
}

/// `Pi_N g(., t)` for the manufactured solution on `grid`.
pub fn manufactured_forcing(t: f64, grid: GridSpec, nu: f64) -> Result<SpectralField> {
    Ok(ManufacturedForcing::new(&Transform::new(grid), nu)?.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CELL_AREA;
    use crate::transform::Nonlinearity;
    use num_complex::Complex64;

    // Term-by-term expansion with sin^3 = (3 sin - sin 3)/4:
    // g = a(4nu - 3 + 9a^2/8) sxsy - (15a^3/8)(s3x sy + sx s3y) + (9a^3/8) s3x s3y.
    // The (p, q) mode of sin(px) sin(qy) carries -(2pi)^2/4.
    fn closed_form(a: f64, nu: f64) -> [(i64, i64, f64); 3] {
        let q = -CELL_AREA / 4.0;
        [
            (1, 1, q * a * (4.0 * nu - 3.0 + 9.0 * a * a / 8.0)),
            (3, 1, q * (-15.0 * a * a * a / 8.0)),
            (3, 3, q * (9.0 * a * a * a / 8.0)),
        ]
    }

    #[test]
    fn matches_symbolic_expansion() {
        let g = GridSpec::with_modes(5).unwrap();
        for (t, nu) in [(0.0, 1.0), (0.37, 0.01)] {
            let f = manufactured_forcing(t, g, nu).unwrap();
            for (k1, k2, v) in closed_form(manufactured_amplitude(t), nu) {
                let got = f.coeff(k1, k2);
                assert!((got - Complex64::new(v, 0.0)).norm() < 1e-12 * CELL_AREA, "{k1},{k2}: {got} vs {v}");
                assert!((f.coeff(k2, k1) - got).norm() < 1e-12 * CELL_AREA);
            }
            assert!(f.coeff(2, 1).norm() < 1e-12 * CELL_AREA);
        }
    }

    #[test]
    fn residual_of_exact_solution_vanishes() {
        let g = GridSpec::with_modes(6).unwrap();
        let tr = Transform::new(g);
        let nu = 0.3;
        let t = 0.8;
        let u = tr.forward(&manufactured_solution(t, g).unwrap()).unwrap();
        let fu = tr.apply_nonlinearity(&u, Nonlinearity::DoubleWell, true);
        let src = manufactured_forcing(t, g, nu).unwrap();
        let mut residual = SpectralField::zeros(g);
        for (i, r) in residual.coeffs_mut().iter_mut().enumerate() {
            let k2 = g.kappa2(i);
            // d_t u_e + nu lap^2 u_e - lap f(u_e) - g
            *r = -u.coeffs()[i] + nu * k2 * k2 * u.coeffs()[i] + k2 * fu.coeffs()[i]
                - src.coeffs()[i];
        }
        let worst = tr.base_values(&residual).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn time_scaling_of_linear_and_cubic_parts() {
        let g = GridSpec::with_modes(4).unwrap();
        let nu = 0.7;
        let f0 = manufactured_forcing(0.0, g, nu).unwrap();
        let f1 = manufactured_forcing(2f64.ln(), g, nu).unwrap();
        let r33 = f1.coeff(3, 3).re / f0.coeff(3, 3).re;
        assert!((r33 - 0.125).abs() < 1e-12);
        let a = MANUFACTURED_AMPLITUDE;
        let q = -CELL_AREA / 4.0;
        let expect = q * ((4.0 * nu - 3.0) * a / 2.0 + 9.0 * a * a * a / 64.0);
        assert!((f1.coeff(1, 1).re - expect).abs() < 1e-12 * CELL_AREA);
    }

    #[test]
    fn needs_three_modes() {
        assert!(manufactured_forcing(0.0, GridSpec::with_modes(2).unwrap(), 1.0).is_err());
    }
}
