use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{back_action_from_fluctuation, shot_noise_floor, thermal_noise_asd};
use crate::error::{Error, Result};
use crate::physics::{
    readout_frequency_warning, BeamSet, CavityParams, MirrorLabel, MirrorModel, NoiseBeam, Response,
};
use crate::units::AsdUnit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub probe_power_w: f64,
    pub noise_beam: NoiseBeam,
    pub temperature_k: f64,
    pub warnings: Vec<String>,
}

/// Noise budget on a frequency grid. The total is the quadrature sum of the
/// four channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCurve {
    /// Angular frequencies, rad/s, strictly increasing.
    pub omega: Vec<f64>,
    pub shot: Vec<f64>,
    pub back_action: Vec<f64>,
    pub thermal_front: Vec<f64>,
    pub thermal_end: Vec<f64>,
    pub total: Vec<f64>,
    pub unit: AsdUnit,
    pub metadata: CurveMetadata,
}

/// Evaluates every noise channel on `omega_grid`. Back-action is driven by
/// the probe's quantum intensity noise plus the noise beam.
pub fn sensitivity_curve(
    cavity: &CavityParams,
    front: &MirrorModel,
    end: &MirrorModel,
    beams: &BeamSet,
    temperature: f64,
    omega_grid: &[f64],
) -> Result<SensitivityCurve> {
    beams.validate()?;
    if omega_grid.is_empty() {
        return Err(Error::invalid("grid", "empty frequency grid"));
    }
    if omega_grid.iter().any(|w| !(w.is_finite() && *w > 0.0))
        || omega_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::invalid("grid", "frequencies must be positive and strictly increasing"));
    }
    let shot = shot_noise_floor(cavity, beams.probe_power_w)?;
    let fluct = beams.back_action_fluctuation(cavity);

    let rows: Vec<[f64; 4]> = omega_grid
        .par_iter()
        .map(|&w| {
            Ok([
                shot,
                back_action_from_fluctuation(cavity, fluct, front, end, w),
                thermal_noise_asd(front, temperature, w)?,
                thermal_noise_asd(end, temperature, w)?,
            ])
        })
        .collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    if let Some(w) = readout_frequency_warning(cavity, *omega_grid.last().unwrap()) {
        warnings.push(w);
    }
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    Ok(SensitivityCurve {
        omega: omega_grid.to_vec(),
        shot: column(0),
        back_action: column(1),
        thermal_front: column(2),
        thermal_end: column(3),
        total: rows
            .iter()
            .map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]).sqrt())
            .collect(),
        unit: AsdUnit::MetrePerRootHz,
        metadata: CurveMetadata {
            probe_power_w: beams.probe_power_w,
            noise_beam: beams.noise_beam,
            temperature_k: temperature,
            warnings,
        },
    })
}

impl SensitivityCurve {
    /// Refers every channel to a force on `sensor` by dividing by |χ_sensor|.
    pub fn referred_to_force(&self, front: &MirrorModel, end: &MirrorModel, sensor: MirrorLabel) -> Self {
        let mirror = match sensor {
            MirrorLabel::Front => front,
            MirrorLabel::End => end,
        };
        let gain: Vec<f64> = self.omega.iter().map(|&w| mirror.susceptibility(w).norm()).collect();
        let scale = |v: &[f64]| v.iter().zip(&gain).map(|(x, g)| x / g).collect::<Vec<_>>();
        Self {
            omega: self.omega.clone(),
            shot: scale(&self.shot),
            back_action: scale(&self.back_action),
            thermal_front: scale(&self.thermal_front),
            thermal_end: scale(&self.thermal_end),
            total: scale(&self.total),
            unit: AsdUnit::NewtonPerRootHz,
            metadata: self.metadata.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}
