//! Fourier pseudo-spectral solver for the periodic 2D Cahn-Hilliard equation
//!
//! ```text
//! du/dt = lap(-nu lap u + f(u)),   f(u) = u^3 - u,
//! ```
//!
//! on `[-pi, pi)^2`, advanced by a stabilized first-order exponential
//! integrator. The crate also carries the observables (energy, mass, norms),
//! per-mode symbol certification, initial-data constructors and the
//! experiment drivers used by the `chspec` command-line tool.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod forcing;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod io;
pub mod scheme;
pub mod symbols;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{GridSpec, RealField, SpectralField};
pub use scheme::{Integrator, MultiplierSet, SchemeParams, SimState, Stepper};
pub use transform::{Nonlinearity, Transform};
