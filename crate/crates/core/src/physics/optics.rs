use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Relative tolerance between a user-supplied cavity bandwidth and the one
/// derived from finesse and length.
pub const BANDWIDTH_TOLERANCE: f64 = 0.05;

/// Intracavity intensity per unit incident intensity, divided by the finesse,
/// for a lossless single-port cavity at resonance (buildup = 2F/π).
pub const BUILDUP_PER_FINESSE: f64 = 2.0 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    wavelength: f64,
    finesse: f64,
    length: f64,
    #[serde(skip)]
    constants: PhysicalConstants,
}

impl CavityParams {
    pub fn new(wavelength: f64, finesse: f64, length: f64) -> Result<Self> {
        for (field, v) in [
            ("cavity.wavelength_m", wavelength),
            ("cavity.finesse", finesse),
            ("cavity.length_m", length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            wavelength,
            finesse,
            length,
            constants: PhysicalConstants::CODATA,
        })
    }

    /// Like [`CavityParams::new`] but also checks a quoted bandwidth (Hz, half
    /// width) against the derived one.
    pub fn with_bandwidth_check(
        wavelength: f64,
        finesse: f64,
        length: f64,
        supplied_bandwidth_hz: f64,
    ) -> Result<Self> {
        let cavity = Self::new(wavelength, finesse, length)?;
        let derived = cavity.bandwidth_hz();
        let relative = (derived - supplied_bandwidth_hz).abs() / derived;
        if !(relative <= BANDWIDTH_TOLERANCE) {
            return Err(Error::BandwidthMismatch {
                derived_hz: derived,
                supplied_hz: supplied_bandwidth_hz,
                relative,
            });
        }
        Ok(cavity)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn finesse(&self) -> f64 {
        self.finesse
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// k = 2π/λ.
    pub fn wavevector(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Cavity half-width Ω_c/2π = c/(4FL), in Hz.
    pub fn bandwidth_hz(&self) -> f64 {
        self.constants.c / (4.0 * self.finesse * self.length)
    }

    /// Cavity half-width Ω_c in rad/s.
    pub fn bandwidth(&self) -> f64 {
        2.0 * PI * self.bandwidth_hz()
    }

    /// Optical carrier frequency ν = c/λ in Hz.
    pub fn optical_frequency_hz(&self) -> f64 {
        self.constants.c / self.wavelength
    }

    pub fn photon_energy(&self) -> f64 {
        self.constants.hbar * 2.0 * PI * self.optical_frequency_hz()
    }
}

/// Photon flux (photons/s) carried by `power_w` at the cavity wavelength.
pub fn photon_flux(cavity: &CavityParams, power_w: f64) -> f64 {
    power_w / cavity.photon_energy()
}

/// Incident intensity fluctuations of one beam: its mean power and its
/// intensity-noise amplitude relative to the shot noise of that power
/// (1 for a coherent state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityDrive {
    pub power_w: f64,
    pub relative_noise: f64,
}

impl IntensityDrive {
    pub fn coherent(power_w: f64) -> Self {
        Self {
            power_w,
            relative_noise: 1.0,
        }
    }

    /// Intensity-fluctuation amplitude spectral density, √(photons/s)/√Hz.
    pub fn fluctuation(&self, cavity: &CavityParams) -> f64 {
        self.relative_noise * photon_flux(cavity, self.power_w).sqrt()
    }
}

/// Radiation-pressure force amplitude density on each mirror for a given
/// incident intensity fluctuation: 2ħk · (2F/π) · δI_in.
pub fn intracavity_force_coupling(cavity: &CavityParams, incident_intensity_fluct: f64) -> f64 {
    2.0 * cavity.constants.hbar
        * cavity.wavevector()
        * BUILDUP_PER_FINESSE
        * cavity.finesse
        * incident_intensity_fluct
}

/// Phase-quadrature output per metre of cavity length change, 16F√I/λ.
pub fn homodyne_readout_gain(cavity: &CavityParams, probe_power_w: f64) -> Result<f64> {
    if !(probe_power_w.is_finite() && probe_power_w > 0.0) {
        return Err(Error::invalid(
            "beams.probe_power_w",
            format!("must be positive, got {probe_power_w}"),
        ));
    }
    let flux = photon_flux(cavity, probe_power_w);
    Ok(16.0 * cavity.finesse * flux.sqrt() / cavity.wavelength)
}

/// Warning text when `omega` is too close to the cavity bandwidth for the
/// low-frequency readout formulas to hold.
pub fn readout_frequency_warning(cavity: &CavityParams, omega: f64) -> Option<String> {
    let limit = cavity.bandwidth() / 3.0;
    (omega > limit).then(|| {
        format!(
            "analysis frequency {:.4e} Hz exceeds one third of the cavity bandwidth ({:.4e} Hz); \
             cavity filtering is not modeled",
            omega / (2.0 * PI),
            limit / (2.0 * PI)
        )
    })
}

/// Apparent cavity length change for a laser frequency modulation δν (Hz):
/// δL = L·δν/ν.
pub fn frequency_modulation_to_length(cavity: &CavityParams, delta_nu_hz: f64) -> f64 {
    cavity.length * delta_nu_hz / cavity.optical_frequency_hz()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalTarget {
    CavityLength,
    ForceOnFront,
    ForceOnEnd,
}

/// A monochromatic signal. `amplitude` is an RMS value: metres for a length
/// signal, newtons for a force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub target: SignalTarget,
    pub amplitude: f64,
    /// Angular frequency, rad/s.
    pub frequency: f64,
}

impl SignalSpec {
    /// RMS radiation-pressure force of a signal beam of `power_w` whose
    /// intensity is modulated with RMS depth `modulation_depth`, reflected at
    /// normal incidence: 2·P·m/c.
    pub fn beam_force(power_w: f64, modulation_depth: f64, constants: &PhysicalConstants) -> f64 {
        2.0 * power_w * modulation_depth / constants.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBeam {
    pub power_w: f64,
    /// Intensity-noise amplitude relative to the beam's own shot noise.
    pub intensity_noise_level: f64,
}

impl NoiseBeam {
    pub const OFF: NoiseBeam = NoiseBeam {
        power_w: 0.0,
        intensity_noise_level: 0.0,
    };

    pub fn drive(&self) -> IntensityDrive {
        IntensityDrive {
            power_w: self.power_w,
            relative_noise: self.intensity_noise_level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSet {
    pub probe_power_w: f64,
    pub noise_beam: NoiseBeam,
    pub signal: Option<SignalSpec>,
}

impl BeamSet {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("beams.probe_power_w", self.probe_power_w),
            ("beams.noise.power_w", self.noise_beam.power_w),
            ("beams.noise.intensity_noise_level", self.noise_beam.intensity_noise_level),
        ];
        for (field, v) in checks {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be non-negative, got {v}")));
            }
        }
        if let Some(sig) = &self.signal {
            if !(sig.amplitude.is_finite() && sig.amplitude >= 0.0) {
                return Err(Error::invalid("beams.signal.amplitude", "must be non-negative"));
            }
            if !(sig.frequency.is_finite() && sig.frequency > 0.0) {
                return Err(Error::invalid("beams.signal.freq_hz", "must be positive"));
            }
        }
        Ok(())
    }

    /// Total incident intensity-fluctuation density driving radiation
    /// pressure: the probe's quantum noise plus the noise beam, added in
    /// quadrature.
    pub fn back_action_fluctuation(&self, cavity: &CavityParams) -> f64 {
        let probe = IntensityDrive::coherent(self.probe_power_w).fluctuation(cavity);
        let noise = self.noise_beam.drive().fluctuation(cavity);
        probe.hypot(noise)
    }
}
