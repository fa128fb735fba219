use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::SpectrumTrace;

/// Cancellation dip read off measured traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipMeasurement {
    pub dip_hz: f64,
    pub bin: usize,
    /// Measured ASD at the dip.
    pub measured: f64,
    pub individual_front: f64,
    pub individual_end: f64,
    /// Quadrature sum of the individual traces over the measured value.
    pub suppression: f64,
    /// Larger individual trace over the measured value.
    pub suppression_vs_strongest: f64,
    /// The minimum sits next to a peak or at the end of the searched range,
    /// so it is not a resolved interior dip.
    pub at_edge: bool,
}

/// Locates the minimum of `measured` strictly between the peaks of the two
/// individual-response traces and compares it with them.
pub fn measure_dip(
    measured: &SpectrumTrace,
    individual_front: &SpectrumTrace,
    individual_end: &SpectrumTrace,
) -> Result<DipMeasurement> {
    if !(measured.same_grid(individual_front) && measured.same_grid(individual_end)) {
        return Err(Error::GridMismatch);
    }
    if measured.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
            .0
    };
    let pf = argmax(&individual_front.asd);
    let pe = argmax(&individual_end.asd);
    let (lo, hi) = (pf.min(pe), pf.max(pe));

    let (range, interior) = if hi > lo + 1 {
        (lo + 1..hi, true)
    } else {
        (0..measured.len(), false)
    };
    let first = range.start;
    let last = range.end - 1;
    let bin = range
        .min_by(|&a, &b| measured.asd[a].total_cmp(&measured.asd[b]))
        .unwrap();
    let at_edge = !interior || bin == first || bin == last;

    let m = measured.asd[bin];
    let f = individual_front.asd[bin];
    let e = individual_end.asd[bin];
    Ok(DipMeasurement {
        dip_hz: measured.freq_hz[bin],
        bin,
        measured: m,
        individual_front: f,
        individual_end: e,
        suppression: f.hypot(e) / m,
        suppression_vs_strongest: f.max(e) / m,
        at_edge,
    })
}
