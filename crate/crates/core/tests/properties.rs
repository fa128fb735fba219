mod common;

use common::*;
use dualres::budget::{
    back_action_noise, force_min_with_cancellation, force_sql, optimal_power, quantum_optimal_sensitivity,
    shot_noise_floor, suppression_factor, thermal_noise_asd, thermal_noise_pair,
};
use dualres::physics::{
    hz_to_rad, pair_susceptibility, susceptibility, CavityParams, IntensityDrive, MechanicalMode, MirrorLabel,
    MirrorModel, Response,
};
use dualres::synth::{rbw_binning, Channel, RawPsd};
use dualres::AsdUnit;
use num_complex::Complex64;
use proptest::prelude::*;

fn mode_strategy() -> impl Strategy<Value = MechanicalMode> {
    (1e3..2e6f64, 1e-5..1e-1f64, 10.0..1e6f64, -1e-7..1e-7f64, 0.0..1e-8f64).prop_map(|(f, m, q, re, im)| {
        MechanicalMode::new(hz_to_rad(f), m, q, Complex64::new(re, im)).unwrap()
    })
}

fn pair_strategy() -> impl Strategy<Value = (MirrorModel, MirrorModel)> {
    (mode_strategy(), mode_strategy()).prop_map(|(a, b)| {
        (MirrorModel::single(MirrorLabel::Front, a), MirrorModel::single(MirrorLabel::End, b))
    })
}

proptest! {
    #[test]
    fn susceptibility_reality_condition(mode in mode_strategy(), f in 1.0..3e6f64) {
        let w = hz_to_rad(f);
        let plus = susceptibility(&mode, w);
        let minus = susceptibility(&mode, -w);
        prop_assert!((minus - plus.conj()).norm() <= 1e-12 * plus.norm());
    }

    #[test]
    fn passive_modes_dissipate(mode in mode_strategy(), f in 1.0..3e6f64) {
        let chi = susceptibility(&mode, hz_to_rad(f));
        prop_assert!(chi.im >= 0.0);
        prop_assert!(mode.is_passive());
    }

    #[test]
    fn pair_response_is_additive((front, end) in pair_strategy(), f in 1.0..3e6f64) {
        let w = hz_to_rad(f);
        let sum = front.susceptibility(w) + end.susceptibility(w);
        prop_assert_eq!(pair_susceptibility(&front, &end, w), sum);
        let pair = thermal_noise_pair(&front, &end, 300.0, w).unwrap();
        let parts = thermal_noise_asd(&front, 300.0, w).unwrap().hypot(thermal_noise_asd(&end, 300.0, w).unwrap());
        prop_assert!((pair - parts).abs() <= 1e-14 * parts);
    }

    #[test]
    fn sql_identity_holds_at_any_power(
        (front, end) in pair_strategy(),
        f in 1e3..3e6f64,
        power in 1e-9..1.0f64,
        finesse in 1e2..1e6f64,
    ) {
        let cavity = CavityParams::new(1064e-9, finesse, 1e-3).unwrap();
        let w = hz_to_rad(f);
        let shot = shot_noise_floor(&cavity, power).unwrap();
        let ba = back_action_noise(&cavity, &IntensityDrive::coherent(power), &front, &end, w);
        let min = quantum_optimal_sensitivity(&front, &end, w);
        prop_assert!(((2.0 * shot * ba).sqrt() - min).abs() <= 1e-12 * min);
    }

    #[test]
    fn optimal_power_balances_noise((front, end) in pair_strategy(), f in 1e3..3e6f64) {
        let cavity = cavity();
        let w = hz_to_rad(f);
        let p = optimal_power(&cavity, &front, &end, w).unwrap();
        let shot = shot_noise_floor(&cavity, p).unwrap();
        let ba = back_action_noise(&cavity, &IntensityDrive::coherent(p), &front, &end, w);
        prop_assert!((shot - ba).abs() <= 1e-9 * shot);
        prop_assert!((shot.hypot(ba) - quantum_optimal_sensitivity(&front, &end, w)).abs() <= 1e-9 * shot);
    }

    #[test]
    fn suppression_bounds((front, end) in pair_strategy(), f in 1.0..3e6f64) {
        let w = hz_to_rad(f);
        let s = suppression_factor(&front, &end, w);
        prop_assert!(s >= std::f64::consts::FRAC_1_SQRT_2 * (1.0 - 1e-12));
        let (a, b) = (front.susceptibility(w), end.susceptibility(w));
        if (a * b.conj()).re <= 0.0 {
            prop_assert!(s >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn identical_mirrors_force_ratio(mode in mode_strategy(), f in 1e3..3e6f64) {
        let front = MirrorModel::single(MirrorLabel::Front, mode);
        let end = MirrorModel::single(MirrorLabel::End, mode);
        let w = hz_to_rad(f);
        let ratio = force_min_with_cancellation(&front, &end, MirrorLabel::End, w).unwrap()
            / force_sql(&end, w).unwrap();
        prop_assert!((ratio - std::f64::consts::SQRT_2).abs() <= 1e-12);
    }

    #[test]
    fn binning_conserves_power(psd in prop::collection::vec(0.0..1e-30f64, 8..400), group in 1usize..8) {
        let raw = RawPsd { start_hz: 1e3, spacing_hz: 0.5, psd, unit: AsdUnit::MetrePerRootHz, channel: Channel::Measured };
        let used = raw.psd.len() / group * group;
        prop_assume!(used > 0);
        let trace = rbw_binning(&raw, 0.5 * group as f64).unwrap();
        let expected: f64 = raw.psd[..used].iter().sum::<f64>() * 0.5;
        prop_assert!((trace.total_power() - expected).abs() <= 1e-12 * expected.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn bandwidth_check_tolerance(scale in 0.5..1.5f64) {
        let derived = cavity().bandwidth_hz();
        let r = CavityParams::with_bandwidth_check(810e-9, 230_000.0, 0.25e-3, derived * scale);
        let relative = (1.0 - scale).abs();
        prop_assert_eq!(r.is_ok(), relative <= 0.05);
    }
}
