//! Acceptance checks for `ch-spectral` live in `tests/acceptance.rs`.
