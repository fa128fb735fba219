//! Parameter recovery from spectra: double-Lorentzian thermal fits and
//! cancellation-dip measurements.

mod dip;
mod doublet;
mod lm;

pub use dip::{measure_dip, DipMeasurement};
pub use doublet::{
    auto_guess, fit_thermal_doublet, DoubletGuess, FitOptions, FitResult, ModeEstimate, ModeGuess,
    RelativeErrors, MAX_CONDITION,
};
