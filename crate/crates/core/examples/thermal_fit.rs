//! Fits the two mirror modes back out of a simulated thermal-noise spectrum.

use dualres::config::{preset, RunConfig};
use dualres::fit::{auto_guess, fit_thermal_doublet, FitOptions};
use dualres::synth::run_campaign;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::parse(preset("paper_defaults").unwrap())?.campaign(Some(17))?.config;
    let trace = run_campaign(&config)?.measured;

    let guess = auto_guess(&trace, 300.0)?;
    let fit = fit_thermal_doublet(&trace, 300.0, &guess, &FitOptions::default())?;
    println!("converged {} after {} iterations, residual {:.4}", fit.converged, fit.iterations, fit.residual_norm);
    for (name, m, e) in [("front", &fit.front, fit.relative_errors.front), ("end", &fit.end, fit.relative_errors.end)] {
        println!(
            "{name:>5}: {:.2} Hz  M {:.4} g (±{:.1}%)  Q {:.0} (±{:.1}%)",
            m.freq_hz,
            m.mass_kg * 1e3,
            100.0 * e[1],
            m.quality,
            100.0 * e[2]
        );
    }
    Ok(())
}
