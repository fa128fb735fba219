mod common;

use common::*;
use dualres::physics::{hz_to_rad, MirrorLabel, Response};
use dualres::synth::{expected_campaign, inject_force_signal, inject_length_signal, run_campaign, CampaignConfig};
use dualres::Error;

fn noisy_config(averages: usize, seed: u64) -> CampaignConfig {
    let (front, end) = doublet(BACKGROUND);
    let mut c = thermal_campaign(front, end, averages, seed);
    c.beams = beams(300e-6, 2000.0);
    c.span_hz = [709.5e3, 712.0e3];
    c
}

#[test]
fn ensemble_mean_converges_to_expectation() {
    let config = noisy_config(400, 11);
    let run = run_campaign(&config).unwrap();
    let mean = expected_campaign(&config).unwrap();
    // each bin averages oversample × averages exponential variates
    let sigma = 1.0 / ((config.oversample * config.averages) as f64).sqrt();
    for (got, want) in [
        (&run.measured, &mean.measured),
        (&run.thermal_only, &mean.thermal_only),
        (&run.back_action_only, &mean.back_action_only),
    ] {
        let ratios: Vec<f64> = got.asd.iter().zip(&want.asd).map(|(g, w)| (g / w).powi(2)).collect();
        let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((avg - 1.0).abs() < 5.0 * sigma / (ratios.len() as f64).sqrt() + 1e-3, "mean ratio {avg}");
        assert!(ratios.iter().all(|r| (r - 1.0).abs() < 6.0 * sigma), "bin outside 6 sigma");
    }
}

#[test]
fn expected_channels_add_in_power() {
    let config = noisy_config(1, 0);
    let c = expected_campaign(&config).unwrap();
    let shot = c.metadata.shot_floor;
    for k in 0..c.measured.len() {
        let sum = c.thermal_only.asd[k].powi(2) + c.back_action_only.asd[k].powi(2) + shot * shot;
        assert!(rel(c.measured.asd[k].powi(2), sum) < 1e-12);
        assert_eq!(c.signal_only.asd[k], 0.0);
    }
    assert!(c.metadata.analytic);
}

#[test]
fn identical_seed_is_bit_identical_across_thread_counts() {
    let config = noisy_config(40, 5);
    let a = run_campaign(&config).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| run_campaign(&config).unwrap());
    assert_eq!(a, b);
    let other = CampaignConfig { seed: 6, ..config };
    assert_ne!(a.measured.asd, run_campaign(&other).unwrap().measured.asd);
}

#[test]
fn zero_amplitude_signal_changes_nothing() {
    let config = noisy_config(20, 3);
    let plain = run_campaign(&config).unwrap();
    let with = run_campaign(&inject_force_signal(&config, MirrorLabel::End, 0.0, hz_to_rad(711e3)).unwrap()).unwrap();
    for (a, b) in plain.channels().iter().zip(with.channels()) {
        assert_eq!(a.asd, b.asd);
    }
}

#[test]
fn end_mirror_force_appears_in_its_bin() {
    let config = noisy_config(4, 8);
    let f_hz = 711_203.0;
    let w = hz_to_rad(f_hz);
    let force = 1e-13;
    let c = run_campaign(&inject_force_signal(&config, MirrorLabel::End, force, w).unwrap()).unwrap();
    let k = c.signal_only.bin_of(f_hz).unwrap();
    let peak = c.signal_only.asd.iter().cloned().fold(0.0, f64::max);
    assert_eq!(c.signal_only.asd[k], peak);
    let line_power = c.signal_only.asd[k].powi(2) * c.signal_only.bin_width_hz;
    let expected = (force * config.end.susceptibility(w).norm()).powi(2);
    assert!(rel(line_power, expected) < 1e-9, "{line_power} vs {expected}");
    assert_eq!(c.signal_only.total_power(), line_power);
}

#[test]
fn length_signal_is_independent_of_mechanics() {
    let config = noisy_config(2, 1);
    let c = expected_campaign(&inject_length_signal(&config, 1e-18, hz_to_rad(710.0e3)).unwrap()).unwrap();
    assert!(rel(c.signal_only.total_power(), 1e-36) < 1e-9);
}

#[test]
fn span_beyond_bandwidth_is_rejected() {
    let mut config = noisy_config(2, 1);
    config.span_hz = [1.0e6, 1.4e6];
    assert!(matches!(run_campaign(&config), Err(Error::SpanOutsideBand { .. })));
}
