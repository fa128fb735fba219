use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single Lorentzian resonance with a constant out-of-resonance background.
///
/// χ(Ω) = 1 / (M (Ω₀² − Ω² − i Ω Ω₀ / Q)) + χ⁽⁰⁾
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    resonance: f64,
    mass: f64,
    quality: f64,
    background: Complex64,
}

impl MechanicalMode {
    pub fn new(resonance: f64, mass: f64, quality: f64, background: Complex64) -> Result<Self> {
        positive_finite("resonance_angular_frequency", resonance)?;
        positive_finite("effective_mass", mass)?;
        positive_finite("quality_factor", quality)?;
        if !(background.re.is_finite() && background.im.is_finite()) {
            return Err(Error::invalid("background_susceptibility", "must be finite"));
        }
        Ok(Self {
            resonance,
            mass,
            quality,
            background,
        })
    }

    /// Mode without background response.
    pub fn lorentzian(resonance: f64, mass: f64, quality: f64) -> Result<Self> {
        Self::new(resonance, mass, quality, Complex64::new(0.0, 0.0))
    }

    pub fn resonance(&self) -> f64 {
        self.resonance
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn quality(&self) -> f64 {
        self.quality
    }

    pub fn background(&self) -> Complex64 {
        self.background
    }

    pub fn with_background(mut self, background: Complex64) -> Self {
        self.background = background;
        self
    }

    /// Resonant term only, without the background.
    pub fn lorentzian_part(&self, omega: f64) -> Complex64 {
        let w0 = self.resonance;
        let denom = Complex64::new(w0 * w0 - omega * omega, -omega * w0 / self.quality);
        1.0 / (self.mass * denom)
    }
}

fn positive_finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

/// Mechanical susceptibility of one mode in m/N.
///
/// Defined for every real `omega`; for negative frequencies the background's
/// imaginary part flips sign so that χ(−Ω) = χ(Ω)*.
pub fn susceptibility(mode: &MechanicalMode, omega: f64) -> Complex64 {
    let bg = if omega < 0.0 {
        mode.background.conj()
    } else {
        mode.background
    };
    mode.lorentzian_part(omega) + bg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MirrorLabel {
    Front,
    End,
}

impl MirrorLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MirrorLabel::Front => "front",
            MirrorLabel::End => "end",
        }
    }
}

/// One cavity mirror: the modes that respond in the analysis band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorModel {
    label: MirrorLabel,
    modes: Vec<MechanicalMode>,
}

impl MirrorModel {
    pub fn new(label: MirrorLabel, modes: Vec<MechanicalMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid(
                format!("mirrors.{}.modes", label.as_str()),
                "at least one mode is required",
            ));
        }
        if modes.windows(2).any(|w| w[1].resonance <= w[0].resonance) {
            return Err(Error::UnorderedModes {
                mirror: label.as_str(),
            });
        }
        Ok(Self { label, modes })
    }

    pub fn single(label: MirrorLabel, mode: MechanicalMode) -> Self {
        Self {
            label,
            modes: vec![mode],
        }
    }

    pub fn label(&self) -> MirrorLabel {
        self.label
    }

    pub fn modes(&self) -> &[MechanicalMode] {
        &self.modes
    }

    /// Lowest resonance of the mirror, the one used as "the" sensor resonance.
    pub fn fundamental(&self) -> &MechanicalMode {
        &self.modes[0]
    }
}

/// Anything with a linear displacement response to force.
pub trait Response {
    fn susceptibility(&self, omega: f64) -> Complex64;

    /// Im χ(Ω)/Ω, the quantity the fluctuation-dissipation theorem needs.
    /// Finite at Ω = 0 for the resonant part.
    fn dissipation_over_omega(&self, omega: f64) -> f64 {
        self.susceptibility(omega).im / omega
    }

    /// True when no background has a negative (active) imaginary part.
    fn is_passive(&self) -> bool;
}

impl Response for MechanicalMode {
    fn susceptibility(&self, omega: f64) -> Complex64 {
        susceptibility(self, omega)
    }

    fn dissipation_over_omega(&self, omega: f64) -> f64 {
        let w0 = self.resonance;
        let gamma = w0 / self.quality;
        let detuning = w0 * w0 - omega * omega;
        let resonant = gamma / (self.mass * (detuning * detuning + (omega * gamma).powi(2)));
        if self.background.im == 0.0 {
            resonant
        } else {
            resonant + self.background.im / omega.abs()
        }
    }

    fn is_passive(&self) -> bool {
        self.background.im >= 0.0
    }
}

impl Response for MirrorModel {
    fn susceptibility(&self, omega: f64) -> Complex64 {
        self.modes.iter().map(|m| susceptibility(m, omega)).sum()
    }

    fn dissipation_over_omega(&self, omega: f64) -> f64 {
        self.modes.iter().map(|m| m.dissipation_over_omega(omega)).sum()
    }

    fn is_passive(&self) -> bool {
        self.modes.iter().all(Response::is_passive)
    }
}

/// χ_e + χ_f: the response of the cavity length to the radiation-pressure
/// force, which pushes the two mirrors in opposite directions.
pub fn pair_susceptibility(front: &MirrorModel, end: &MirrorModel, omega: f64) -> Complex64 {
    front.susceptibility(omega) + end.susceptibility(omega)
}
