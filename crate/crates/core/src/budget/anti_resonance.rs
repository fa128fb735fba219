use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{hz_to_rad, pair_susceptibility, rad_to_hz, MirrorModel, Response};

/// Step of the coarse grid scan.
pub const COARSE_STEP_HZ: f64 = 1.0;
/// Width of the final golden-section bracket.
pub const REFINED_TOLERANCE_HZ: f64 = 1e-3;

/// Location and depth of a back-action cancellation dip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntiResonanceReport {
    /// Ω*, rad/s.
    pub dip_omega: f64,
    pub dip_hz: f64,
    /// |χ_e + χ_f| at the dip, m/N.
    pub residual: f64,
    /// √(|χ_e|² + |χ_f|²) / |χ_e + χ_f| at the dip: the coherent response
    /// compared with the quadrature sum of the individual responses.
    pub suppression: f64,
    /// max(|χ_e|, |χ_f|) / |χ_e + χ_f| at the dip: the coherent response
    /// compared with the larger individual response alone.
    pub suppression_vs_strongest: f64,
    /// |χ_f| and |χ_e| at the dip.
    pub individual_front: f64,
    pub individual_end: f64,
    pub bracket_hz: [f64; 2],
}

/// √(|χ_e|² + |χ_f|²) / |χ_e + χ_f| at `omega`.
///
/// Bounded below by 1/√2; at least 1 wherever Re(χ_e χ_f*) ≤ 0, i.e. where the
/// two mirrors respond more than 90° out of phase.
pub fn suppression_factor(front: &MirrorModel, end: &MirrorModel, omega: f64) -> f64 {
    let cf = front.susceptibility(omega);
    let ce = end.susceptibility(omega);
    cf.norm().hypot(ce.norm()) / (cf + ce).norm()
}

/// Finds the minimum of |χ_e + χ_f| inside `bracket_hz`: a coarse scan on a
/// 1 Hz grid followed by golden-section refinement down to 1 mHz.
pub fn find_anti_resonance(
    front: &MirrorModel,
    end: &MirrorModel,
    bracket_hz: [f64; 2],
) -> Result<AntiResonanceReport> {
    let [lo, hi] = bracket_hz;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(Error::invalid(
            "bracket_hz",
            format!("need 0 <= lo < hi, got [{lo}, {hi}]"),
        ));
    }
    let modulus = |f_hz: f64| pair_susceptibility(front, end, hz_to_rad(f_hz)).norm();

    let steps = ((hi - lo) / COARSE_STEP_HZ).ceil().max(2.0) as usize;
    let step = (hi - lo) / steps as f64;
    let (best, _) = (0..=steps)
        .map(|i| (i, modulus(lo + i as f64 * step)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if best == 0 || best == steps {
        return Err(Error::NoInteriorMinimum {
            lo_hz: lo,
            hi_hz: hi,
            edge: if best == 0 { "lower" } else { "upper" },
        });
    }

    let dip_hz = golden_section(
        modulus,
        lo + (best - 1) as f64 * step,
        lo + (best + 1) as f64 * step,
        REFINED_TOLERANCE_HZ,
    );
    let omega = hz_to_rad(dip_hz);
    let cf = front.susceptibility(omega).norm();
    let ce = end.susceptibility(omega).norm();
    let residual = pair_susceptibility(front, end, omega).norm();
    Ok(AntiResonanceReport {
        dip_omega: omega,
        dip_hz: rad_to_hz(omega),
        residual,
        suppression: cf.hypot(ce) / residual,
        suppression_vs_strongest: cf.max(ce) / residual,
        individual_front: cf,
        individual_end: ce,
        bracket_hz,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{MechanicalMode, MirrorLabel};
    use num_complex::Complex64;

    fn doublet(background: f64) -> (MirrorModel, MirrorModel) {
        let bg = Complex64::new(background, 0.0);
        let f = MechanicalMode::new(hz_to_rad(710.1e3), 0.64e-3, 10_500.0, bg).unwrap();
        let e = MechanicalMode::new(hz_to_rad(710.9e3), 0.84e-3, 21_500.0, bg).unwrap();
        (
            MirrorModel::single(MirrorLabel::Front, f),
            MirrorModel::single(MirrorLabel::End, e),
        )
    }

    #[test]
    fn locates_doublet_dip() {
        let (f, e) = doublet(0.0);
        let r = find_anti_resonance(&f, &e, [710.1e3, 710.9e3]).unwrap();
        let mean = ((0.64e-3 * 710.1e3f64.powi(2) + 0.84e-3 * 710.9e3f64.powi(2)) / 1.48e-3).sqrt();
        assert!((r.dip_hz - mean).abs() < 1.0, "{} vs {}", r.dip_hz, mean);
        assert!(r.suppression > 1.0);
        assert!(r.suppression_vs_strongest <= r.suppression);
    }

    #[test]
    fn second_dip_with_in_phase_background() {
        let (f, e) = doublet(2e-8);
        let r = find_anti_resonance(&f, &e, [710.95e3, 714e3]).unwrap();
        assert!(r.dip_hz > 710.9e3);
        // frozen from a 10 mHz grid scan in an independent script
        assert!((r.dip_hz - 711_798.3).abs() < 0.5, "{}", r.dip_hz);
    }

    #[test]
    fn identical_mirrors_have_no_interior_dip() {
        let (f, _) = doublet(0.0);
        let twin = MirrorModel::single(MirrorLabel::End, *f.fundamental());
        let err = find_anti_resonance(&f, &twin, [709.5e3, 710.9e3]).unwrap_err();
        assert!(matches!(err, Error::NoInteriorMinimum { .. }));
    }

    #[test]
    fn rejects_inverted_bracket() {
        let (f, e) = doublet(0.0);
        assert!(find_anti_resonance(&f, &e, [711e3, 710e3]).is_err());
    }
}
