mod common;

use common::*;
use dualres::budget::find_anti_resonance;
use dualres::fit::{auto_guess, fit_thermal_doublet, measure_dip, DoubletGuess, FitOptions, FitResult, ModeGuess};
use dualres::physics::MirrorLabel;
use dualres::synth::{expected_campaign, SpectrumTrace};
use dualres::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn thermal_trace(f: [f64; 2], m: [f64; 2], q: [f64; 2], span: [f64; 2], rbw: f64) -> SpectrumTrace {
    let front = mirror(MirrorLabel::Front, f[0], m[0], q[0], 0.0);
    let end = mirror(MirrorLabel::End, f[1], m[1], q[1], 0.0);
    let mut config = thermal_campaign(front, end, 1, 0);
    config.span_hz = span;
    config.rbw_hz = rbw;
    expected_campaign(&config).unwrap().thermal_only
}

fn reference_trace() -> SpectrumTrace {
    thermal_trace([FRONT_HZ, END_HZ], [FRONT_MASS, END_MASS], [FRONT_Q, END_Q], [709.0e3, 712.0e3], 10.0)
}

fn fit(trace: &SpectrumTrace) -> FitResult {
    let guess = auto_guess(trace, 300.0).unwrap();
    fit_thermal_doublet(trace, 300.0, &guess, &FitOptions::default()).unwrap()
}

fn worst_error(r: &FitResult, f: [f64; 2], m: [f64; 2], q: [f64; 2]) -> f64 {
    [
        rel(r.front.freq_hz, f[0]),
        rel(r.end.freq_hz, f[1]),
        rel(r.front.mass_kg, m[0]),
        rel(r.end.mass_kg, m[1]),
        rel(r.front.quality, q[0]),
        rel(r.end.quality, q[1]),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

const F: [f64; 2] = [FRONT_HZ, END_HZ];
const M: [f64; 2] = [FRONT_MASS, END_MASS];
const Q: [f64; 2] = [FRONT_Q, END_Q];

#[test]
fn noiseless_trace_recovers_parameters() {
    let r = fit(&reference_trace());
    assert!(r.converged);
    assert!(worst_error(&r, F, M, Q) < 1e-3, "{r:?}");
}

#[test]
fn swapped_guess_gives_same_labels() {
    let trace = reference_trace();
    let g = auto_guess(&trace, 300.0).unwrap();
    let swapped = DoubletGuess {
        modes: [g.modes[1], g.modes[0]],
        floor: g.floor,
    };
    let a = fit_thermal_doublet(&trace, 300.0, &g, &FitOptions::default()).unwrap();
    let b = fit_thermal_doublet(&trace, 300.0, &swapped, &FitOptions::default()).unwrap();
    assert!(worst_error(&b, F, M, Q) < 1e-3);
    assert!(rel(a.front.freq_hz, b.front.freq_hz) < 1e-9);
    assert!(rel(a.end.quality, b.end.quality) < 1e-6);
}

/// Average of `averages` copies of `clean`, each with independent
/// multiplicative noise of relative size `level` on the ASD.
fn noisy(clean: &SpectrumTrace, level: f64, averages: usize, seed: u64) -> SpectrumTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psd = vec![0.0; clean.len()];
    for _ in 0..averages {
        for (acc, v) in psd.iter_mut().zip(&clean.asd) {
            let n: f64 = StandardNormal.sample(&mut rng);
            *acc += (v * (1.0 + level * n)).powi(2);
        }
    }
    let mut out = clean.clone();
    out.asd = psd.iter().map(|p| (p / averages as f64).sqrt()).collect();
    out
}

#[test]
fn five_percent_noise_stays_within_three_percent() {
    let clean = reference_trace();
    for seed in 0..20u64 {
        let r = fit(&noisy(&clean, 0.05, 100, seed));
        let err = worst_error(&r, F, M, Q);
        assert!(err < 0.03, "seed {seed}: worst relative error {err}");
    }
}

#[test]
fn single_peak_is_not_identifiable() {
    let trace = thermal_trace([FRONT_HZ, END_HZ], [FRONT_MASS, 1e3], Q, [709.0e3, 712.0e3], 10.0);
    let mode = ModeGuess {
        freq_hz: FRONT_HZ,
        mass_kg: 1.3e-3,
        quality: 10000.0,
    };
    let guess = DoubletGuess {
        modes: [mode, mode],
        floor: None,
    };
    let r = fit_thermal_doublet(&trace, 300.0, &guess, &FitOptions::default());
    assert!(matches!(r, Err(Error::NonIdentifiable { .. })), "{r:?}");
}

#[test]
fn randomized_parameter_sets_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut u = move || 1.0 + 0.3 * (2.0 * rand::Rng::random::<f64>(&mut rng) - 1.0);
    let mean = 0.5 * (FRONT_HZ + END_HZ);
    let split = END_HZ - FRONT_HZ;
    for set in 0..50 {
        let (c, s) = (mean * u(), split * u());
        let f = [c - 0.5 * s, c + 0.5 * s];
        let m = [FRONT_MASS * u(), END_MASS * u()];
        let q = [FRONT_Q * u(), END_Q * u()];
        let trace = thermal_trace(f, m, q, [f[0] - 1.2e3, f[1] + 1.2e3], 10.0);
        let r = fit(&trace);
        let err = worst_error(&r, f, m, q);
        assert!(err < 1e-3, "set {set}: f={f:?} m={m:?} q={q:?} err={err}");
    }
}

#[test]
fn residual_is_invariant_under_grid_refinement() {
    let (front, end) = doublet(BACKGROUND);
    let mut config = thermal_campaign(front, end, 1, 0);
    config.beams = beams(300e-6, 2000.0);
    let coarse = expected_campaign(&config).unwrap().measured;
    config.rbw_hz = 5.0;
    let fine = expected_campaign(&config).unwrap().measured;
    let (a, b) = (fit(&coarse), fit(&fine));
    assert!(a.residual_norm > 1e-2, "{}", a.residual_norm);
    assert!(rel(b.residual_norm, a.residual_norm) < 0.05, "{} vs {}", a.residual_norm, b.residual_norm);
}

#[test]
fn identical_mirrors_flag_edge() {
    let (front, _) = doublet(0.0);
    let end = mirror(MirrorLabel::End, FRONT_HZ, FRONT_MASS, FRONT_Q, 0.0);
    let mut config = thermal_campaign(front, end, 1, 0);
    config.beams = beams(300e-6, 1000.0);
    let c = expected_campaign(&config).unwrap();
    let dip = measure_dip(&c.back_action_only, &c.individual_front, &c.individual_end).unwrap();
    assert!(dip.at_edge);
    assert!((dip.suppression - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn measured_dip_matches_closed_form(
        f0 in 700e3..720e3f64,
        split in 300.0..3000.0f64,
        m in prop::array::uniform2(0.2e-3..2e-3f64),
        q in prop::array::uniform2(3e3..5e4f64),
    ) {
        let front = mirror(MirrorLabel::Front, f0, m[0], q[0], 0.0);
        let end = mirror(MirrorLabel::End, f0 + split, m[1], q[1], 0.0);
        let closed = find_anti_resonance(&front, &end, [f0, f0 + split]).unwrap();
        let mut config = thermal_campaign(front, end, 1, 0);
        config.span_hz = [f0 - 1e3, f0 + split + 1e3];
        config.beams = beams(300e-6, 100.0);
        let c = expected_campaign(&config).unwrap();
        let dip = measure_dip(&c.back_action_only, &c.individual_front, &c.individual_end).unwrap();
        prop_assert!(!dip.at_edge);
        prop_assert!((dip.dip_hz - closed.dip_hz).abs() <= c.back_action_only.bin_width_hz);
    }
}
