//! TOML run configuration and the bundled presets.
//!
//! Every physical quantity carries its unit in the key name (`length_m`,
//! `power_w`, `freq_hz`, ...). Relative settings (noise level above thermal,
//! signal below back-action, signal placed at a dip) are resolved into plain
//! numbers by [`RunConfig::campaign`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::budget::find_anti_resonance;
use crate::error::{Error, Result};
use crate::fit::FitOptions;
use crate::physics::{
    hz_to_rad, BeamSet, CavityParams, MechanicalMode, MirrorLabel, MirrorModel, NoiseBeam,
    SignalSpec, SignalTarget,
};
use crate::synth::{force_below_back_action, noise_level_above_thermal, CampaignConfig, DEFAULT_OVERSAMPLE};

pub const PRESET_NAMES: [&str; 3] = ["paper_defaults", "fig2b", "fig3c"];

/// Source text of a bundled preset.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "paper_defaults" => Some(include_str!("../presets/paper_defaults.toml")),
        "fig2b" => Some(include_str!("../presets/fig2b.toml")),
        "fig3c" => Some(include_str!("../presets/fig3c.toml")),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub wavelength_m: f64,
    pub finesse: f64,
    pub length_m: f64,
    pub bandwidth_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub freq_hz: f64,
    pub mass_kg: f64,
    pub quality_factor: f64,
    #[serde(default)]
    pub background_re_m_per_n: f64,
    #[serde(default)]
    pub background_im_m_per_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorsSection {
    pub front: Vec<ModeSection>,
    pub end: Vec<ModeSection>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub power_w: f64,
    /// Intensity noise relative to the beam's shot noise.
    pub intensity_noise_level: Option<f64>,
    /// Alternative: back-action this many dB above thermal noise everywhere
    /// in the campaign span.
    pub above_thermal_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub target: SignalTarget,
    /// RMS amplitude, m for `cavity_length`, N for forces.
    pub amplitude: Option<f64>,
    /// Alternative for forces: this many dB below the back-action noise at the
    /// target mirror's resonance, in one resolution bin.
    pub below_back_action_db: Option<f64>,
    pub freq_hz: Option<f64>,
    /// Alternative: place the signal at the anti-resonance in this bracket.
    pub at_dip_bracket_hz: Option<[f64; 2]>,
    /// Also run the campaign with the signal at the target mirror's resonance.
    #[serde(default)]
    pub compare_at_resonance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsSection {
    pub probe_power_w: f64,
    #[serde(default)]
    pub noise: NoiseSection,
    pub signal: Option<SignalSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub span_hz: [f64; 2],
    pub step_hz: f64,
    #[serde(default = "room_temperature")]
    pub temperature_k: f64,
    #[serde(default)]
    pub dip_brackets_hz: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    #[serde(default = "room_temperature")]
    pub temperature_k: f64,
    pub span_hz: [f64; 2],
    pub rbw_hz: f64,
    #[serde(default = "default_drive_bandwidth")]
    pub drive_bandwidth_hz: f64,
    pub averages: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    pub leakage_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuessSource {
    /// Peaks read off the trace.
    #[default]
    Auto,
    /// The configured mirror modes.
    Mirrors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default = "room_temperature")]
    pub temperature_k: f64,
    #[serde(default)]
    pub guess: GuessSource,
    #[serde(default)]
    pub mask_hz: Vec<[f64; 2]>,
    pub residual_threshold: Option<f64>,
    pub max_iterations: Option<usize>,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            temperature_k: room_temperature(),
            guess: GuessSource::Auto,
            mask_hz: Vec::new(),
            residual_threshold: None,
            max_iterations: None,
        }
    }
}

fn room_temperature() -> f64 {
    crate::budget::ROOM_TEMPERATURE
}

fn default_drive_bandwidth() -> f64 {
    600.0
}

fn default_oversample() -> usize {
    DEFAULT_OVERSAMPLE
}

/// The whole configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cavity: CavitySection,
    pub mirrors: MirrorsSection,
    pub beams: BeamsSection,
    pub budget: Option<BudgetSection>,
    pub campaign: Option<CampaignSection>,
    #[serde(default)]
    pub fit: FitSection,
}

/// Configuration failures: `Parse` for malformed text, `Invalid` for values
/// that parse but fail validation.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// Signal placement that the campaign runner needs to know about.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedCampaign {
    pub config: CampaignConfig,
    /// Same campaign with the signal moved to the target mirror's resonance.
    pub at_resonance: Option<CampaignConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn cavity(&self) -> Result<CavityParams> {
        let c = &self.cavity;
        match c.bandwidth_hz {
            Some(bw) => CavityParams::with_bandwidth_check(c.wavelength_m, c.finesse, c.length_m, bw),
            None => CavityParams::new(c.wavelength_m, c.finesse, c.length_m),
        }
    }

    pub fn mirrors(&self) -> Result<(MirrorModel, MirrorModel)> {
        Ok((
            mirror(MirrorLabel::Front, &self.mirrors.front)?,
            mirror(MirrorLabel::End, &self.mirrors.end)?,
        ))
    }

    /// Beams with an explicit noise level only; relative settings are left
    /// for [`RunConfig::campaign`].
    pub fn beams(&self) -> Result<BeamSet> {
        let noise = &self.beams.noise;
        if noise.intensity_noise_level.is_some() && noise.above_thermal_db.is_some() {
            return Err(Error::invalid(
                "beams.noise",
                "set either intensity_noise_level or above_thermal_db, not both",
            ));
        }
        let beams = BeamSet {
            probe_power_w: self.beams.probe_power_w,
            noise_beam: NoiseBeam {
                power_w: noise.power_w,
                intensity_noise_level: noise.intensity_noise_level.unwrap_or(0.0),
            },
            signal: None,
        };
        beams.validate()?;
        if beams.probe_power_w <= 0.0 {
            return Err(Error::invalid("beams.probe_power_w", "must be positive"));
        }
        Ok(beams)
    }

    pub fn fit_options(&self) -> FitOptions {
        let mut o = FitOptions {
            mask_hz: self.fit.mask_hz.clone(),
            ..FitOptions::default()
        };
        if let Some(t) = self.fit.residual_threshold {
            o.residual_threshold = t;
        }
        if let Some(n) = self.fit.max_iterations {
            o.max_iterations = n;
        }
        o
    }

    /// Validates everything that does not depend on a particular command.
    pub fn validate(&self) -> Result<()> {
        self.cavity()?;
        self.mirrors()?;
        self.beams()?;
        if let Some(b) = &self.budget {
            if !(b.step_hz > 0.0) {
                return Err(Error::invalid("budget.step_hz", "must be positive"));
            }
            if !(b.span_hz[0] > 0.0 && b.span_hz[0] < b.span_hz[1]) {
                return Err(Error::invalid("budget.span_hz", "need 0 < lo < hi"));
            }
        }
        if let Some(sig) = &self.beams.signal {
            if sig.amplitude.is_some() == sig.below_back_action_db.is_some() {
                return Err(Error::invalid(
                    "beams.signal",
                    "set exactly one of amplitude or below_back_action_db",
                ));
            }
            if sig.freq_hz.is_some() == sig.at_dip_bracket_hz.is_some() {
                return Err(Error::invalid(
                    "beams.signal",
                    "set exactly one of freq_hz or at_dip_bracket_hz",
                ));
            }
            if sig.below_back_action_db.is_some() && sig.target == SignalTarget::CavityLength {
                return Err(Error::invalid(
                    "beams.signal.below_back_action_db",
                    "only applies to force signals",
                ));
            }
        }
        Ok(())
    }

    /// Builds the campaign with every relative setting resolved, with
    /// `seed_override` replacing the configured seed.
    pub fn campaign(&self, seed_override: Option<u64>) -> Result<ResolvedCampaign> {
        self.validate()?;
        let section = self
            .campaign
            .as_ref()
            .ok_or_else(|| Error::invalid("campaign", "section is missing"))?;
        let (front, end) = self.mirrors()?;
        let mut config = CampaignConfig {
            cavity: self.cavity()?,
            front,
            end,
            beams: self.beams()?,
            temperature_k: section.temperature_k,
            span_hz: section.span_hz,
            rbw_hz: section.rbw_hz,
            drive_bandwidth_hz: section.drive_bandwidth_hz,
            averages: section.averages,
            seed: seed_override.unwrap_or(section.seed),
            oversample: section.oversample,
            leakage_db: section.leakage_db,
        };
        config.validate()?;
        if let Some(db) = self.beams.noise.above_thermal_db {
            config.beams.noise_beam.intensity_noise_level = noise_level_above_thermal(&config, db)?;
        }

        let Some(sig) = &self.beams.signal else {
            return Ok(ResolvedCampaign {
                config,
                at_resonance: None,
            });
        };
        let frequency = match (sig.freq_hz, sig.at_dip_bracket_hz) {
            (Some(f), _) => hz_to_rad(f),
            (None, Some(bracket)) => find_anti_resonance(&config.front, &config.end, bracket)?.dip_omega,
            (None, None) => unreachable!("checked in validate"),
        };
        let target_mirror = match sig.target {
            SignalTarget::CavityLength => None,
            SignalTarget::ForceOnFront => Some(MirrorLabel::Front),
            SignalTarget::ForceOnEnd => Some(MirrorLabel::End),
        };
        let amplitude = match (sig.amplitude, sig.below_back_action_db, target_mirror) {
            (Some(a), _, _) => a,
            (None, Some(db), Some(label)) => force_below_back_action(&config, label, db),
            _ => unreachable!("checked in validate"),
        };
        config.beams.signal = Some(SignalSpec {
            target: sig.target,
            amplitude,
            frequency,
        });
        config.validate()?;

        let at_resonance = if sig.compare_at_resonance {
            let label = target_mirror.ok_or_else(|| {
                Error::invalid("beams.signal.compare_at_resonance", "only applies to force signals")
            })?;
            let mirror = match label {
                MirrorLabel::Front => &config.front,
                MirrorLabel::End => &config.end,
            };
            let mut other = config.clone();
            other.beams.signal = Some(SignalSpec {
                frequency: mirror.fundamental().resonance(),
                ..config.beams.signal.unwrap()
            });
            Some(other)
        } else {
            None
        };
        Ok(ResolvedCampaign { config, at_resonance })
    }
}

fn mirror(label: MirrorLabel, modes: &[ModeSection]) -> Result<MirrorModel> {
    let name = label.as_str();
    let modes = modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            MechanicalMode::new(
                hz_to_rad(m.freq_hz),
                m.mass_kg,
                m.quality_factor,
                Complex64::new(m.background_re_m_per_n, m.background_im_m_per_n),
            )
            .map_err(|e| match e {
                Error::InvalidParameter { field, reason } => {
                    let key = match field.as_str() {
                        "resonance_angular_frequency" => "freq_hz",
                        "effective_mass" => "mass_kg",
                        "quality_factor" => "quality_factor",
                        _ => "background_re_m_per_n",
                    };
                    Error::invalid(format!("mirrors.{name}[{i}].{key}"), reason)
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MirrorModel::new(label, modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_validate() {
        for name in PRESET_NAMES {
            let cfg = RunConfig::parse(preset(name).unwrap()).unwrap();
            cfg.validate().unwrap();
            cfg.campaign(None).unwrap();
        }
    }

    #[test]
    fn zero_finesse_names_field() {
        let text = preset("paper_defaults").unwrap().replace("finesse = 230000.0", "finesse = 0.0");
        let err = RunConfig::parse(&text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("cavity.finesse"), "{err}");
    }

    #[test]
    fn parse_errors_carry_location() {
        let text = preset("paper_defaults").unwrap().replace("length_m = 0.25e-3", "length_m = \"short\"");
        match RunConfig::parse(&text) {
            Err(ConfigError::Parse(msg)) => assert!(msg.contains("line"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let text = preset("paper_defaults").unwrap().replace("length_m", "lenght_m");
        assert!(matches!(RunConfig::parse(&text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn bad_mode_names_its_index() {
        let text = preset("paper_defaults").unwrap().replace("mass_kg = 0.84e-3", "mass_kg = -1.0");
        let err = RunConfig::parse(&text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("mirrors.end[0].mass_kg"), "{err}");
    }

    #[test]
    fn bandwidth_mismatch_is_physics() {
        let text = preset("paper_defaults").unwrap().replace("bandwidth_hz = 1.3e6", "bandwidth_hz = 2.0e6");
        let err = RunConfig::parse(&text).unwrap().validate().unwrap_err();
        assert!(err.is_physics_violation());
    }

    #[test]
    fn fig3c_resolves_signal_at_dip() {
        let cfg = RunConfig::parse(preset("fig3c").unwrap()).unwrap();
        let resolved = cfg.campaign(Some(9)).unwrap();
        assert_eq!(resolved.config.seed, 9);
        let sig = resolved.config.beams.signal.unwrap();
        let f = sig.frequency / (2.0 * std::f64::consts::PI);
        assert!(f > 710.1e3 && f < 710.9e3);
        assert!(sig.amplitude > 0.0);
        let at_res = resolved.at_resonance.unwrap().beams.signal.unwrap();
        assert_eq!(at_res.frequency, resolved.config.front.fundamental().resonance());
        assert!(resolved.config.beams.noise_beam.intensity_noise_level > 1.0);
    }
}
