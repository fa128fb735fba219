//! A force on the front mirror, buried under back-action at its own
//! resonance, becomes visible at the cancellation dip.

use dualres::budget::find_anti_resonance;
use dualres::config::{preset, RunConfig};
use dualres::physics::{rad_to_hz, MirrorLabel};
use dualres::synth::{force_below_back_action, inject_force_signal, run_campaign};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = RunConfig::parse(preset("fig2b").unwrap())?.campaign(None)?.config;
    let force = force_below_back_action(&base, MirrorLabel::Front, 5.0);
    let dip = find_anti_resonance(&base.front, &base.end, [710.1e3, 710.9e3])?.dip_omega;
    let resonance = base.front.fundamental().resonance();
    println!("force {force:.3e} N rms, 5 dB under back-action at the front resonance");
    for (label, w) in [("dip", dip), ("resonance", resonance)] {
        let c = run_campaign(&inject_force_signal(&base, MirrorLabel::Front, force, w)?)?;
        let snr = c.snr_at(rad_to_hz(w)).unwrap();
        println!("{label:>9} {:.0} Hz: SNR {snr:.2}", rad_to_hz(w));
    }
    Ok(())
}
