//! Simulation and optimization of frequency-diverse reconfigurable intelligent
//! surfaces: surfaces whose reflection phases are switched periodically so the
//! incident carrier is spread into harmonics, giving distance- as well as
//! angle-dependent beam control.
//!
//! The crate is organised bottom-up:
//!
//! - [`signal`]: square-wave time coding, Fourier coefficients, per-element
//!   harmonic content and equivalent reflection coefficients.
//! - [`geometry`]: array layout, far-field path offsets, path loss, equivalent
//!   channels and the cascaded gain.
//! - [`scenario`]: a compiled instance that maps `(codes, f0)` to an
//!   achievable rate.
//! - [`ceo`]: the cross-entropy optimizer; [`ga`]: the genetic baseline.
//! - [`pattern`]: beam patterns, the exact quantized static-surface optimum and
//!   rate helpers.
//! - [`config`] and [`harness`]: JSON scenario files, run records, and the
//!   optimize / pattern / sweep experiments behind the `fdris` binary.

pub mod ceo;
pub mod config;
pub mod error;
pub mod ga;
pub mod geometry;
pub mod harness;
pub mod pattern;
pub mod scenario;
pub mod signal;

pub use error::{Error, Result};
pub use scenario::{Candidate, EvalMode, Scenario};
