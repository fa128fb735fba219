//! Force sensitivity of one mirror with and without the other cancelling
//! back-action, across the doublet.

use dualres::budget::{force_min_with_cancellation, force_sql, suppression_factor};
use dualres::physics::{hz_to_rad, MechanicalMode, MirrorLabel, MirrorModel};

fn main() -> dualres::Result<()> {
    let front = MirrorModel::single(MirrorLabel::Front, MechanicalMode::lorentzian(hz_to_rad(710.1e3), 0.64e-3, 10_500.0)?);
    let end = MirrorModel::single(MirrorLabel::End, MechanicalMode::lorentzian(hz_to_rad(710.9e3), 0.84e-3, 21_500.0)?);
    println!("{:>8} {:>12} {:>12} {:>8} {:>6}", "f (Hz)", "F_SQL end", "F_min end", "gain", "S");
    for i in 0..=16 {
        let f = 710.0e3 + 62.5 * i as f64;
        let w = hz_to_rad(f);
        let sql = force_sql(&end, w)?;
        let min = force_min_with_cancellation(&front, &end, MirrorLabel::End, w)?;
        println!(
            "{f:>8.1} {sql:>12.3e} {min:>12.3e} {:>8.3} {:>6.2}",
            sql / min,
            suppression_factor(&front, &end, w)
        );
    }
    Ok(())
}
