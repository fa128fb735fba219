//! Locates the cancellation dips of the doublet with and without a
//! background compliance from higher-order modes.

use dualres::budget::find_anti_resonance;
use dualres::physics::{hz_to_rad, MechanicalMode, MirrorLabel, MirrorModel};
use num_complex::Complex64;

fn pair(background: f64) -> dualres::Result<(MirrorModel, MirrorModel)> {
    let bg = Complex64::new(background, 0.0);
    Ok((
        MirrorModel::single(MirrorLabel::Front, MechanicalMode::new(hz_to_rad(710.1e3), 0.64e-3, 10_500.0, bg)?),
        MirrorModel::single(MirrorLabel::End, MechanicalMode::new(hz_to_rad(710.9e3), 0.84e-3, 21_500.0, bg)?),
    ))
}

fn main() -> dualres::Result<()> {
    let (front, end) = pair(0.0)?;
    let dip = find_anti_resonance(&front, &end, [710.1e3, 710.9e3])?;
    println!("no background: dip at {:.2} Hz, suppression {:.2}", dip.dip_hz, dip.suppression);

    let (front, end) = pair(2e-8)?;
    for bracket in [[710.1e3, 710.9e3], [710.95e3, 713e3]] {
        let dip = find_anti_resonance(&front, &end, bracket)?;
        println!(
            "2e-8 m/N background: dip at {:.2} Hz, |chi| {:.3e} m/N, suppression {:.2}",
            dip.dip_hz, dip.residual, dip.suppression
        );
    }

    // in-phase mirrors leave nothing to cancel
    let (front, _) = pair(0.0)?;
    let twin = MirrorModel::single(MirrorLabel::End, *front.fundamental());
    match find_anti_resonance(&front, &twin, [709e3, 711e3]) {
        Ok(d) => println!("identical mirrors: {:.2} Hz", d.dip_hz),
        Err(e) => println!("identical mirrors: {e}"),
    }
    Ok(())
}
