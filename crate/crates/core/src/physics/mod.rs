//! Mirror mechanics and cavity optics of the dual-resonator sensor.
//!
//! Frequencies are angular (rad/s) throughout unless a name carries a `_hz`
//! suffix. Optical powers are stored in watts and turned into photon fluxes
//! only inside the optical formulas.

mod mechanics;
mod optics;

pub use mechanics::{
    pair_susceptibility, susceptibility, MechanicalMode, MirrorLabel, MirrorModel, Response,
};
pub use optics::{
    frequency_modulation_to_length, homodyne_readout_gain, intracavity_force_coupling,
    photon_flux, readout_frequency_warning, BeamSet, CavityParams, IntensityDrive, NoiseBeam,
    SignalSpec, SignalTarget, BANDWIDTH_TOLERANCE, BUILDUP_PER_FINESSE,
};

use std::f64::consts::PI;

/// Converts a frequency in Hz to an angular frequency in rad/s.
#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

/// Converts an angular frequency in rad/s to Hz.
#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}
