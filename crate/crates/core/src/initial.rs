//! Initial conditions.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{GridSpec, RealField};
use crate::io;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

impl CircleSpec {
    pub const fn new(x: f64, y: f64, radius: f64) -> Self {
        Self { x, y, radius }
    }
}

/// The seven reference circles.
pub fn default_circles() -> [CircleSpec; 7] {
    [
        CircleSpec::new(-PI / 2.0, -PI / 2.0, PI / 5.0),
        CircleSpec::new(-3.0 * PI / 4.0, -PI / 4.0, 2.0 * PI / 15.0),
        CircleSpec::new(-PI / 2.0, PI / 4.0, 2.0 * PI / 15.0),
        CircleSpec::new(0.0, -3.0 * PI / 4.0, PI / 10.0),
        CircleSpec::new(PI / 2.0, -3.0 * PI / 4.0, PI / 10.0),
        CircleSpec::new(0.0, 0.0, PI / 4.0),
        CircleSpec::new(PI / 2.0, PI / 2.0, PI / 4.0),
    ]
}

/// Smooth bump `2 exp(-sharpness / s^2)` for `s < 0`, zero otherwise.
pub fn bump(s: f64, sharpness: f64) -> f64 {
    if s < 0.0 {
        2.0 * (-sharpness / (s * s)).exp()
    } else {
        0.0
    }
}

/// `-1 + sum_i bump(|x - c_i| - r_i)` with Euclidean, non-wrapped distance.
///
/// The sum runs over the circles in a canonical order, so any permutation of
/// `circles` gives bit-identical samples.
pub fn seven_circles(grid: GridSpec, circles: &[CircleSpec], sharpness: f64) -> Result<RealField> {
    let mut ordered = circles.to_vec();
    ordered.sort_by(|a, b| {
        a.x.total_cmp(&b.x)
            .then(a.y.total_cmp(&b.y))
            .then(a.radius.total_cmp(&b.radius))
    });
    RealField::from_fn(grid, |x, y| {
        ordered.iter().fold(-1.0, |acc, c| {
            let d = ((x - c.x).powi(2) + (y - c.y).powi(2)).sqrt();
            acc + bump(d - c.radius, sharpness)
        })
    })
}

/// `amplitude * sin x sin y`.
pub fn sinusoidal(grid: GridSpec, amplitude: f64) -> Result<RealField> {
    RealField::from_fn(grid, |x, y| amplitude * x.sin() * y.sin())
}

/// I.i.d. uniform samples in `[-1, 1]` from ChaCha8 seeded with `seed`.
///
/// The samples are raw; the forward transform applies `Pi_N` when the
/// field becomes a solver state.
pub fn random_uniform(grid: GridSpec, seed: u64) -> Result<RealField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.sample_count())
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    RealField::new(grid, values)
}

/// Loads a snapshot and checks it lives on `grid`.
pub fn from_file(path: impl AsRef<Path>, grid: GridSpec) -> Result<RealField> {
    io::read_snapshot_file(path)?.into_field(grid)
}
