//! Sensitivity limits of the dual-resonator length and force measurement.
//!
//! All spectral densities are single-sided amplitude spectral densities per
//! √Hz; arguments named `omega` are angular frequencies.

mod anti_resonance;
mod curve;

pub use anti_resonance::{find_anti_resonance, suppression_factor, AntiResonanceReport, COARSE_STEP_HZ, REFINED_TOLERANCE_HZ};
pub use curve::{sensitivity_curve, CurveMetadata, SensitivityCurve};

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{Error, Result};
use crate::physics::{
    intracavity_force_coupling, pair_susceptibility, photon_flux, CavityParams, IntensityDrive,
    MirrorLabel, MirrorModel, Response,
};

/// Default temperature of the mirrors, K.
pub const ROOM_TEMPERATURE: f64 = 300.0;

/// Shot-noise-limited length sensitivity λ/(16F√I), independent of frequency
/// well inside the cavity bandwidth.
pub fn shot_noise_floor(cavity: &CavityParams, probe_power_w: f64) -> Result<f64> {
    crate::physics::homodyne_readout_gain(cavity, probe_power_w).map(|g| 1.0 / g)
}

/// Back-action length noise |χ_e + χ_f| · F_rad for a given incident
/// intensity fluctuation density.
pub fn back_action_from_fluctuation(
    cavity: &CavityParams,
    incident_intensity_fluct: f64,
    front: &MirrorModel,
    end: &MirrorModel,
    omega: f64,
) -> f64 {
    pair_susceptibility(front, end, omega).norm()
        * intracavity_force_coupling(cavity, incident_intensity_fluct)
}

/// Back-action length noise |χ_e + χ_f| (4ħkF/π) √I · r, where `r` is the
/// drive's intensity noise relative to shot noise (1 for the probe itself).
pub fn back_action_noise(
    cavity: &CavityParams,
    drive: &IntensityDrive,
    front: &MirrorModel,
    end: &MirrorModel,
    omega: f64,
) -> f64 {
    back_action_from_fluctuation(cavity, drive.fluctuation(cavity), front, end, omega)
}

/// √(ħ |χ_e + χ_f|): the best length sensitivity reachable by trading shot
/// noise against back-action at this frequency.
pub fn quantum_optimal_sensitivity(front: &MirrorModel, end: &MirrorModel, omega: f64) -> f64 {
    (HBAR * pair_susceptibility(front, end, omega).norm()).sqrt()
}

/// Incident probe power (W) at which shot noise equals quantum back-action at
/// `omega`: I_opt = πλ / (64 ħ k F² |χ_e + χ_f|).
pub fn optimal_power(
    cavity: &CavityParams,
    front: &MirrorModel,
    end: &MirrorModel,
    omega: f64,
) -> Result<f64> {
    let chi = pair_susceptibility(front, end, omega).norm();
    if chi == 0.0 || !chi.is_finite() {
        return Err(Error::SingularSusceptibility { omega });
    }
    let hbar = cavity.constants().hbar;
    let flux = std::f64::consts::PI * cavity.wavelength()
        / (64.0 * hbar * cavity.wavevector() * cavity.finesse().powi(2) * chi);
    Ok(flux * cavity.photon_energy())
}

/// Thermal displacement noise √(4 k_B T Im χ(Ω)/Ω) from the
/// fluctuation-dissipation theorem.
pub fn thermal_noise_asd<R: Response + ?Sized>(response: &R, temperature: f64, omega: f64) -> Result<f64> {
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::invalid(
            "temperature_k",
            format!("must be non-negative, got {temperature}"),
        ));
    }
    if !response.is_passive() {
        return Err(Error::invalid(
            "background_susceptibility",
            "imaginary part must be non-negative to derive thermal noise",
        ));
    }
    if !(omega >= 0.0) {
        return Err(Error::invalid("omega", "must be non-negative"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let psd = 4.0 * BOLTZMANN * temperature * response.dissipation_over_omega(omega);
    if !psd.is_finite() {
        return Err(Error::invalid("omega", "dissipative background diverges at zero frequency"));
    }
    Ok(psd.max(0.0).sqrt())
}

/// Thermal noise of the cavity length: the two mirrors' independent
/// contributions summed in quadrature.
pub fn thermal_noise_pair(
    front: &MirrorModel,
    end: &MirrorModel,
    temperature: f64,
    omega: f64,
) -> Result<f64> {
    Ok(thermal_noise_asd(front, temperature, omega)?.hypot(thermal_noise_asd(end, temperature, omega)?))
}

/// Standard quantum limit for a force acting on a resonator, √(ħ/|χ|).
pub fn force_sql<R: Response + ?Sized>(response: &R, omega: f64) -> Result<f64> {
    let chi = response.susceptibility(omega).norm();
    if !(chi > 0.0) {
        return Err(Error::SingularSusceptibility { omega });
    }
    Ok((HBAR / chi).sqrt())
}

/// Force sensitivity of one mirror used as sensor inside the cavity, with the
/// other mirror cancelling back-action: √(ħ|χ_e + χ_f|) / |χ_sensor|.
pub fn force_min_with_cancellation(
    front: &MirrorModel,
    end: &MirrorModel,
    sensor: MirrorLabel,
    omega: f64,
) -> Result<f64> {
    let chi_sensor = match sensor {
        MirrorLabel::Front => front.susceptibility(omega),
        MirrorLabel::End => end.susceptibility(omega),
    }
    .norm();
    if chi_sensor == 0.0 || !chi_sensor.is_finite() {
        return Err(Error::SingularSusceptibility { omega });
    }
    Ok(quantum_optimal_sensitivity(front, end, omega) / chi_sensor)
}

/// Shot-noise photon flux helper for callers that work in photons/s.
pub fn probe_flux(cavity: &CavityParams, probe_power_w: f64) -> f64 {
    photon_flux(cavity, probe_power_w)
}
