#![allow(dead_code)]

use dualres::physics::{hz_to_rad, BeamSet, CavityParams, MechanicalMode, MirrorLabel, MirrorModel, NoiseBeam};
use dualres::synth::{CampaignConfig, DEFAULT_OVERSAMPLE};
use num_complex::Complex64;

pub const FRONT_HZ: f64 = 710.1e3;
pub const END_HZ: f64 = 710.9e3;
pub const FRONT_MASS: f64 = 0.64e-3;
pub const END_MASS: f64 = 0.84e-3;
pub const FRONT_Q: f64 = 10500.0;
pub const END_Q: f64 = 21500.0;
pub const BACKGROUND: f64 = 2.0e-8;

pub fn cavity() -> CavityParams {
    CavityParams::new(810e-9, 230_000.0, 0.25e-3).unwrap()
}

pub fn mirror(label: MirrorLabel, f_hz: f64, mass: f64, q: f64, background: f64) -> MirrorModel {
    let mode = MechanicalMode::new(hz_to_rad(f_hz), mass, q, Complex64::new(background, 0.0)).unwrap();
    MirrorModel::single(label, mode)
}

pub fn doublet(background: f64) -> (MirrorModel, MirrorModel) {
    (
        mirror(MirrorLabel::Front, FRONT_HZ, FRONT_MASS, FRONT_Q, background),
        mirror(MirrorLabel::End, END_HZ, END_MASS, END_Q, background),
    )
}

pub fn beams(noise_power_w: f64, level: f64) -> BeamSet {
    BeamSet {
        probe_power_w: 50e-6,
        noise_beam: NoiseBeam {
            power_w: noise_power_w,
            intensity_noise_level: level,
        },
        signal: None,
    }
}

/// Thermal-dominated campaign over 709–712 kHz at 10 Hz RBW.
pub fn thermal_campaign(front: MirrorModel, end: MirrorModel, averages: usize, seed: u64) -> CampaignConfig {
    CampaignConfig {
        cavity: cavity(),
        front,
        end,
        beams: beams(0.0, 0.0),
        temperature_k: 300.0,
        span_hz: [709.0e3, 712.0e3],
        rbw_hz: 10.0,
        drive_bandwidth_hz: 600.0,
        averages,
        seed,
        oversample: DEFAULT_OVERSAMPLE,
        leakage_db: None,
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
