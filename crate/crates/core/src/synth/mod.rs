//! Frequency-domain synthesis of spectrum-analyzer campaigns.
//!
//! Every raw frequency bin carries independent complex Gaussian drives: one
//! Langevin force per mirror, one common intensity-noise process pushing both
//! mirrors apart, and the probe's phase noise. The periodograms of
//! `averages` realizations are averaged and binned to the resolution
//! bandwidth, so ensemble means coincide with the analytic spectra.

mod binning;
mod campaign;

pub use binning::{rbw_binning, Channel, RawPsd, SpectrumTrace};
pub use campaign::{
    expected_campaign, force_below_back_action, inject_force_signal, inject_length_signal,
    noise_level_above_thermal, run_campaign, Campaign, CampaignConfig, CampaignMetadata,
    DEFAULT_OVERSAMPLE,
};
