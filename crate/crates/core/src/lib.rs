//! Simulation and analysis toolkit for dual-resonator optomechanical sensing.
//!
//! A two-mirror Fabry-Perot cavity reads out its length with a probe beam.
//! Radiation pressure from intensity noise pushes both mirrors apart; when the
//! two mirrors' mechanical responses are out of phase, the resulting length
//! noise partially cancels. The crate provides:
//!
//! - [`physics`]: mechanical susceptibilities, cavity optics and beams,
//! - [`budget`]: shot-noise, back-action, thermal and force-sensing limits,
//!   optimal power and the anti-resonance search,
//! - [`synth`]: seeded spectrum-analyzer campaigns in the frequency domain,
//! - [`fit`]: double-Lorentzian thermal fits and dip measurements,
//! - [`config`] and [`app`]: the TOML configuration, presets and the
//!   `budget` / `campaign` / `fit` workflows behind the `dualres` binary.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod budget;
pub mod config;
pub mod constants;
mod error;
pub mod fit;
pub mod physics;
pub mod synth;
mod units;

pub use error::{Error, Result};
pub use units::AsdUnit;
