//! Length-noise budget across the mechanical doublet at 50 µW.

use dualres::budget::{optimal_power, sensitivity_curve};
use dualres::physics::{hz_to_rad, BeamSet, CavityParams, MechanicalMode, MirrorLabel, MirrorModel, NoiseBeam};

fn main() -> dualres::Result<()> {
    let cavity = CavityParams::new(810e-9, 230_000.0, 0.25e-3)?;
    let front = MirrorModel::single(MirrorLabel::Front, MechanicalMode::lorentzian(hz_to_rad(710.1e3), 0.64e-3, 10_500.0)?);
    let end = MirrorModel::single(MirrorLabel::End, MechanicalMode::lorentzian(hz_to_rad(710.9e3), 0.84e-3, 21_500.0)?);
    let beams = BeamSet {
        probe_power_w: 50e-6,
        noise_beam: NoiseBeam::OFF,
        signal: None,
    };

    let freq: Vec<f64> = (0..=40).map(|i| 709e3 + 100.0 * i as f64).collect();
    let omega: Vec<f64> = freq.iter().map(|&f| hz_to_rad(f)).collect();
    let curve = sensitivity_curve(&cavity, &front, &end, &beams, 300.0, &omega)?;

    println!("bandwidth {:.4e} Hz", cavity.bandwidth_hz());
    println!("{:>10} {:>11} {:>11} {:>11} {:>11}", "f (Hz)", "shot", "back-act", "thermal", "total");
    for (i, f) in freq.iter().enumerate() {
        println!(
            "{:>10.0} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}",
            f,
            curve.shot[i],
            curve.back_action[i],
            curve.thermal_front[i].hypot(curve.thermal_end[i]),
            curve.total[i]
        );
    }
    let p = optimal_power(&cavity, &front, &end, hz_to_rad(705e3))?;
    println!("optimal probe power at 705 kHz: {p:.3e} W");
    Ok(())
}
