use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::AsdUnit;

/// What a trace isolates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Measured,
    ThermalOnly,
    BackActionOnly,
    SignalOnly,
    IndividualFront,
    IndividualEnd,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::Measured,
        Channel::ThermalOnly,
        Channel::BackActionOnly,
        Channel::SignalOnly,
        Channel::IndividualFront,
        Channel::IndividualEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Measured => "measured",
            Channel::ThermalOnly => "thermal_only",
            Channel::BackActionOnly => "back_action_only",
            Channel::SignalOnly => "signal_only",
            Channel::IndividualFront => "individual_front",
            Channel::IndividualEnd => "individual_end",
        }
    }
}

/// A power spectral density estimate on a uniform grid of bins, before
/// resolution-bandwidth binning. Bin `j` covers
/// `[start_hz + j·spacing_hz, start_hz + (j+1)·spacing_hz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPsd {
    pub start_hz: f64,
    pub spacing_hz: f64,
    pub psd: Vec<f64>,
    pub unit: AsdUnit,
    pub channel: Channel,
}

impl RawPsd {
    pub fn center_hz(&self, j: usize) -> f64 {
        self.start_hz + (j as f64 + 0.5) * self.spacing_hz
    }
}

/// Single-sided amplitude spectral density sampled in resolution-bandwidth bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    /// Bin centers, Hz, strictly increasing.
    pub freq_hz: Vec<f64>,
    pub asd: Vec<f64>,
    pub bin_width_hz: f64,
    pub unit: AsdUnit,
    pub channel: Channel,
}

impl SpectrumTrace {
    pub fn new(
        freq_hz: Vec<f64>,
        asd: Vec<f64>,
        bin_width_hz: f64,
        unit: AsdUnit,
        channel: Channel,
    ) -> Result<Self> {
        if freq_hz.is_empty() {
            return Err(Error::EmptyTrace);
        }
        if freq_hz.len() != asd.len() {
            return Err(Error::invalid("trace", "frequency and value columns differ in length"));
        }
        if freq_hz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("trace.freq_hz", "bins must be strictly increasing"));
        }
        if asd.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("trace.asd", "values must be finite and non-negative"));
        }
        if !(bin_width_hz.is_finite() && bin_width_hz > 0.0) {
            return Err(Error::invalid("trace.bin_width_hz", "must be positive"));
        }
        Ok(Self {
            freq_hz,
            asd,
            bin_width_hz,
            unit,
            channel,
        })
    }

    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }

    /// Index of the bin whose span contains `f_hz`.
    pub fn bin_of(&self, f_hz: f64) -> Option<usize> {
        let half = 0.5 * self.bin_width_hz;
        let first = self.freq_hz[0] - half;
        let last = self.freq_hz[self.len() - 1] + half;
        if f_hz < first || f_hz >= last {
            return None;
        }
        let i = self.freq_hz.partition_point(|&c| c + half <= f_hz);
        Some(i.min(self.len() - 1))
    }

    pub fn same_grid(&self, other: &SpectrumTrace) -> bool {
        self.freq_hz == other.freq_hz
    }

    /// Σ PSD · bin width.
    pub fn total_power(&self) -> f64 {
        self.asd.iter().map(|a| a * a).sum::<f64>() * self.bin_width_hz
    }
}

/// Boxcar-averages a PSD estimate into bins of `rbw_hz` and takes the square
/// root. Each output bin holds `round(rbw_hz / spacing)` raw bins, so power is
/// conserved exactly; a trailing partial group is dropped.
pub fn rbw_binning(raw: &RawPsd, rbw_hz: f64) -> Result<SpectrumTrace> {
    if !(rbw_hz.is_finite() && rbw_hz > 0.0) {
        return Err(Error::invalid("campaign.rbw_hz", "must be positive"));
    }
    if rbw_hz < raw.spacing_hz * (1.0 - 1e-9) {
        return Err(Error::invalid(
            "campaign.rbw_hz",
            format!("{rbw_hz} Hz is finer than the raw grid spacing {} Hz", raw.spacing_hz),
        ));
    }
    let per_bin = ((rbw_hz / raw.spacing_hz).round() as usize).max(1);
    let bins = raw.psd.len() / per_bin;
    if bins == 0 {
        return Err(Error::EmptyTrace);
    }
    let width = per_bin as f64 * raw.spacing_hz;
    let (freq, asd) = raw
        .psd
        .chunks_exact(per_bin)
        .enumerate()
        .map(|(k, chunk)| {
            let mean = chunk.iter().sum::<f64>() / per_bin as f64;
            (raw.start_hz + (k as f64 + 0.5) * width, mean.max(0.0).sqrt())
        })
        .unzip();
    SpectrumTrace::new(freq, asd, width, raw.unit, raw.channel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn raw(psd: Vec<f64>, spacing: f64) -> RawPsd {
        RawPsd {
            start_hz: 1000.0,
            spacing_hz: spacing,
            psd,
            unit: AsdUnit::MetrePerRootHz,
            channel: Channel::Measured,
        }
    }

    #[test]
    fn white_input_is_flat_and_conserves_power() {
        let r = raw(vec![4.0; 400], 1.25);
        let t = rbw_binning(&r, 10.0).unwrap();
        assert_eq!(t.len(), 50);
        assert!(t.asd.iter().all(|&a| (a - 2.0).abs() < 1e-12));
        let raw_power: f64 = r.psd.iter().sum::<f64>() * r.spacing_hz;
        assert_relative_eq!(t.total_power(), raw_power, max_relative = 1e-12);
        assert_relative_eq!(t.freq_hz[0], 1005.0);
    }

    #[test]
    fn line_spreads_over_one_bin() {
        // a line of RMS amplitude a deposited in one raw bin
        let (a, floor, spacing) = (3.0, 0.5, 1.25);
        let mut psd = vec![floor * floor; 80];
        psd[21] += a * a / spacing;
        let t = rbw_binning(&raw(psd.clone(), spacing), 10.0).unwrap();
        let k = t.bin_of(r_center(21, spacing)).unwrap();
        assert_relative_eq!(t.asd[k], (a * a / 10.0 + floor * floor).sqrt(), max_relative = 1e-12);

        // halving the RBW: noise unchanged, line power density doubles
        let t5 = rbw_binning(&raw(psd, spacing), 5.0).unwrap();
        let k5 = t5.bin_of(r_center(21, spacing)).unwrap();
        assert_relative_eq!(t5.asd[0], floor, max_relative = 1e-12);
        let line = |v: f64| (v * v - floor * floor).sqrt();
        assert_relative_eq!(line(t5.asd[k5]) / line(t.asd[k]), 2f64.sqrt(), max_relative = 1e-12);
    }

    fn r_center(j: usize, spacing: f64) -> f64 {
        1000.0 + (j as f64 + 0.5) * spacing
    }

    #[test]
    fn rejects_rbw_finer_than_grid() {
        assert!(rbw_binning(&raw(vec![1.0; 10], 2.0), 1.0).is_err());
        assert!(matches!(rbw_binning(&raw(vec![1.0; 3], 1.0), 10.0), Err(Error::EmptyTrace)));
    }

    #[test]
    fn bin_lookup() {
        let t = rbw_binning(&raw(vec![1.0; 40], 1.0), 10.0).unwrap();
        assert_eq!(t.bin_of(1000.0), Some(0));
        assert_eq!(t.bin_of(1009.99), Some(0));
        assert_eq!(t.bin_of(1010.0), Some(1));
        assert_eq!(t.bin_of(1039.9), Some(3));
        assert_eq!(t.bin_of(1040.0), None);
        assert_eq!(t.bin_of(999.0), None);
    }
}
