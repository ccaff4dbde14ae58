//! Per-mode Fourier symbols of the operators used in the stability and error
//! analysis, and a randomized certification of the scalar inequalities they obey.
//!
//! With `x = nu tau |k|^4` and `phi(x) = x / (1 - e^-x)`:
//!
//! ```text
//! sqrt(A) = sqrt(nu |k|^2 / (1 - e^-x)) = sqrt(phi / (tau |k|^2))
//! sqrt(B) = sqrt(nu |k|^6 tau / (1 - e^-x)) = |k| sqrt(phi)
//! L       = sqrt(nu |k|^4 tau / (1 - e^-x)) = sqrt(phi)
//! M       = sqrt(nu |k|^8 tau / (1 - e^-x)) = |k|^2 sqrt(phi)
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scheme::one_minus_exp_neg;

/// Constant used for the upper bounds on `L` and `M`.
pub const SYMBOL_BOUND_CONSTANT: f64 = 2.0;

/// Seed of the named default sweep.
pub const DEFAULT_SWEEP_SEED: u64 = 0x005e_edc4;
pub const DEFAULT_SWEEP_LEN: usize = 100_000;

/// `phi(x) = x / (1 - e^-x)`, with `phi(0) = 1`.
pub fn phi(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    x / one_minus_exp_neg(x)
}

/// `x + e^-x - 1`, accurate for small `x`.
pub fn expm1_remainder(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        // sum_{j>=2} (-x)^j / j!, truncated after j = 9
        let mut term = 0.5 * x * x;
        let mut sum = term;
        for j in 3..=9 {
            term *= -x / j as f64;
            sum += term;
        }
        sum
    } else {
        x + (-x).exp_m1()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolValues {
    pub sqrt_a: f64,
    pub sqrt_b: f64,
    pub l: f64,
    pub m: f64,
}

/// Outcome of each scalar inequality for one `(nu, tau, |k|^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolChecks {
    /// `tau^-1/2 |k|^-1 <= sqrt(A)`
    pub inverse_gradient_bound: bool,
    /// `|k| <= sqrt(B)`
    pub gradient_bound: bool,
    /// `phi(x) >= 1`
    pub phi_at_least_one: bool,
    /// `phi` at `|k|^2 + 1` exceeds `phi` at `|k|^2`
    pub phi_increasing: bool,
    /// `1 <= L <= C (1 + sqrt(nu tau) |k|^2)`
    pub l_two_sided: bool,
    /// `|k|^2 <= M <= C (|k|^2 + sqrt(nu tau) |k|^4)`
    pub m_two_sided: bool,
    /// `0 < x + e^-x - 1 < x^2`
    pub remainder_bounds: bool,
}

impl SymbolChecks {
    pub fn all(&self) -> bool {
        self.inverse_gradient_bound
            && self.gradient_bound
            && self.phi_at_least_one
            && self.phi_increasing
            && self.l_two_sided
            && self.m_two_sided
            && self.remainder_bounds
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolReport {
    pub nu: f64,
    pub tau: f64,
    pub kappa2: f64,
    pub values: SymbolValues,
    pub checks: SymbolChecks,
}

impl SymbolReport {
    pub fn passed(&self) -> bool {
        self.checks.all()
    }
}

pub fn symbol_values(nu: f64, tau: f64, kappa2: f64) -> SymbolValues {
    let p = phi(nu * tau * kappa2 * kappa2);
    let l = p.sqrt();
    SymbolValues {
        sqrt_a: (p / (tau * kappa2)).sqrt(),
        sqrt_b: kappa2.sqrt() * l,
        l,
        m: kappa2 * l,
    }
}

/// Evaluates the symbols at one tuple and checks every inequality.
pub fn symbol_report(nu: f64, tau: f64, kappa2: f64) -> SymbolReport {
    let values = symbol_values(nu, tau, kappa2);
    let x = nu * tau * kappa2 * kappa2;
    let kappa = kappa2.sqrt();
    let root_nu_tau = (nu * tau).sqrt();
    let c = SYMBOL_BOUND_CONSTANT;
    let next = kappa2 + 1.0;
    let remainder = expm1_remainder(x);
    let checks = SymbolChecks {
        inverse_gradient_bound: tau.recip().sqrt() / kappa <= values.sqrt_a,
        gradient_bound: kappa <= values.sqrt_b,
        phi_at_least_one: phi(x) >= 1.0,
        phi_increasing: phi(nu * tau * next * next) > phi(x),
        l_two_sided: 1.0 <= values.l && values.l <= c * (1.0 + root_nu_tau * kappa2),
        m_two_sided: kappa2 <= values.m
            && values.m <= c * (kappa2 + root_nu_tau * kappa2 * kappa2),
        remainder_bounds: 0.0 < remainder && remainder < x * x,
    };
    SymbolReport {
        nu,
        tau,
        kappa2,
        values,
        checks,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Certification {
    pub checked: usize,
    pub violations: Vec<SymbolReport>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every tuple `(nu, tau, |k|^2)`, keeping the violating reports.
pub fn certify_symbol_inequalities(
    tuples: impl IntoIterator<Item = (f64, f64, f64)>,
) -> Certification {
    let mut out = Certification::default();
    for (nu, tau, kappa2) in tuples {
        out.checked += 1;
        let r = symbol_report(nu, tau, kappa2);
        if !r.passed() {
            out.violations.push(r);
        }
    }
    out
}

/// `count` tuples with `nu, tau` log-uniform in `(1e-4, 1e2)` and `|k|^2`
/// uniform in `{1, ..., 10^4}`, from a seeded ChaCha8 stream.
pub fn random_sweep(count: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let nu = 10f64.powf(rng.random_range(-4.0..2.0));
            let tau = 10f64.powf(rng.random_range(-4.0..2.0));
            let kappa2 = rng.random_range(1..=10_000u32) as f64;
            (nu, tau, kappa2)
        })
        .collect()
}

/// The named default sweep.
pub fn default_sweep() -> Vec<(f64, f64, f64)> {
    random_sweep(DEFAULT_SWEEP_LEN, DEFAULT_SWEEP_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_small_argument_limit() {
        assert_eq!(phi(0.0), 1.0);
        assert!((phi(1e-14) - 1.0).abs() < 1e-13);
        assert!((symbol_values(1e-7, 1e-7, 1.0).l - 1.0).abs() < 1e-13);
    }

    #[test]
    fn unit_parameters() {
        let v = symbol_values(1.0, 1.0, 1.0);
        // mpmath: sqrt(1 / (1 - e^-1))
        assert!((v.sqrt_a - 1.257_766_554_997_121_2).abs() < 1e-15);
        assert_eq!(v.sqrt_a, v.l);
    }

    #[test]
    fn m_over_l_is_kappa_squared() {
        for (nu, tau, k2) in [(1.0, 0.1, 7.0), (1e-3, 30.0, 1e4), (50.0, 1e-4, 2.0)] {
            let v = symbol_values(nu, tau, k2);
            assert!((v.m / v.l - k2).abs() <= 1e-15 * k2);
        }
    }

    #[test]
    fn reference_tuple_passes() {
        let r = symbol_report(1.0, 0.1, 1.0);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn remainder_is_half_square_for_tiny_argument() {
        let x = 1e-8;
        let r = expm1_remainder(x);
        assert!((r / (x * x) - 0.5).abs() < 1e-8);
        assert!(0.0 < r && r < x * x);
        // mpmath references on both sides of the series cutoff
        assert!((expm1_remainder(0.5) - 0.106_530_659_712_633_42).abs() < 1e-16);
        assert!((expm1_remainder(0.009) / 4.037_877_288_366_216_5e-5 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn violations_are_reported() {
        // a negative nu breaks phi >= 1
        let c = certify_symbol_inequalities([(1.0, 0.1, 1.0), (-1.0, 0.1, 1.0)]);
        assert_eq!(c.checked, 2);
        assert_eq!(c.violations.len(), 1);
        assert_eq!(c.violations[0].nu, -1.0);
    }

    #[test]
    fn sweep_is_deterministic_and_in_range() {
        let a = random_sweep(1000, 3);
        assert_eq!(a, random_sweep(1000, 3));
        for (nu, tau, k2) in a {
            assert!((1e-4..1e2).contains(&nu) && (1e-4..1e2).contains(&tau));
            assert!((1.0..=1e4).contains(&k2) && k2.fract() == 0.0);
        }
    }
}
