use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::binning::{rbw_binning, Channel, RawPsd, SpectrumTrace};
use crate::budget::{shot_noise_floor, thermal_noise_asd};
use crate::error::{Error, Result};
use crate::physics::{
    hz_to_rad, intracavity_force_coupling, pair_susceptibility, photon_flux,
    readout_frequency_warning, BeamSet, CavityParams, MirrorLabel, MirrorModel, Response,
    SignalSpec, SignalTarget,
};
use crate::units::AsdUnit;

/// Raw bins per resolution-bandwidth bin unless configured otherwise.
pub const DEFAULT_OVERSAMPLE: usize = 8;

/// Realizations computed concurrently before being folded into the running
/// sums in index order.
const BATCH: usize = 16;

/// One simulated spectrum-analyzer measurement series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub cavity: CavityParams,
    pub front: MirrorModel,
    pub end: MirrorModel,
    pub beams: BeamSet,
    pub temperature_k: f64,
    /// Analyzed span, Hz.
    pub span_hz: [f64; 2],
    pub rbw_hz: f64,
    /// Bandwidth of the noise-beam modulation. Recorded only: the drive is
    /// treated as white across each resolution bin.
    pub drive_bandwidth_hz: f64,
    pub averages: usize,
    pub seed: u64,
    pub oversample: usize,
    /// Direct leakage of the noise beam's intensity noise into the probe
    /// phase, in dB relative to full coupling. `None` means perfect isolation.
    pub leakage_db: Option<f64>,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        self.beams.validate()?;
        if !(self.rbw_hz.is_finite() && self.rbw_hz > 0.0) {
            return Err(Error::invalid("campaign.rbw_hz", "must be positive"));
        }
        if self.averages == 0 {
            return Err(Error::invalid("campaign.averages", "must be at least 1"));
        }
        if self.oversample == 0 {
            return Err(Error::invalid("campaign.oversample", "must be at least 1"));
        }
        if !(self.temperature_k.is_finite() && self.temperature_k >= 0.0) {
            return Err(Error::invalid("campaign.temperature_k", "must be non-negative"));
        }
        let [lo, hi] = self.span_hz;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("campaign.span_hz", "need lo < hi"));
        }
        if hi - lo < 10.0 * self.rbw_hz {
            return Err(Error::invalid(
                "campaign.span_hz",
                "span must cover at least ten resolution bandwidths",
            ));
        }
        let limit = self.cavity.bandwidth_hz();
        if lo <= 0.0 || hi > limit {
            return Err(Error::SpanOutsideBand {
                lo_hz: lo,
                hi_hz: hi,
                limit_hz: limit,
            });
        }
        if !(self.front.is_passive() && self.end.is_passive()) {
            return Err(Error::invalid(
                "mirrors.background_im_m_per_n",
                "must be non-negative for thermal synthesis",
            ));
        }
        Ok(())
    }

    /// Number of resolution bins in the span.
    pub fn bins(&self) -> usize {
        ((self.span_hz[1] - self.span_hz[0]) / self.rbw_hz).floor() as usize
    }

    fn raw_spacing(&self) -> f64 {
        self.rbw_hz / self.oversample as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignMetadata {
    pub seed: u64,
    pub averages: usize,
    pub rbw_hz: f64,
    pub drive_bandwidth_hz: f64,
    pub temperature_k: f64,
    pub probe_power_w: f64,
    pub noise_power_w: f64,
    pub intensity_noise_level: f64,
    /// Shot-noise floor of the probe (plus any leakage), m/√Hz.
    pub shot_floor: f64,
    pub signal: Option<SignalSpec>,
    /// Whether the traces are ensemble means rather than a seeded realization.
    pub analytic: bool,
    pub warnings: Vec<String>,
}

/// All traces of a campaign, on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub measured: SpectrumTrace,
    pub thermal_only: SpectrumTrace,
    pub back_action_only: SpectrumTrace,
    pub signal_only: SpectrumTrace,
    pub individual_front: SpectrumTrace,
    pub individual_end: SpectrumTrace,
    pub metadata: CampaignMetadata,
}

impl Campaign {
    pub fn channels(&self) -> [&SpectrumTrace; 6] {
        [
            &self.measured,
            &self.thermal_only,
            &self.back_action_only,
            &self.signal_only,
            &self.individual_front,
            &self.individual_end,
        ]
    }

    /// Signal-to-noise power ratio in the bin containing `f_hz`: signal power
    /// over the thermal, back-action and shot noise power in that bin.
    pub fn snr_at(&self, f_hz: f64) -> Option<f64> {
        let k = self.measured.bin_of(f_hz)?;
        let noise = self.thermal_only.asd[k].powi(2)
            + self.back_action_only.asd[k].powi(2)
            + self.metadata.shot_floor.powi(2);
        Some(self.signal_only.asd[k].powi(2) / noise)
    }
}

/// Deterministic per-raw-bin transfer amplitudes.
struct Transfer {
    thermal_front: Vec<f64>,
    thermal_end: Vec<f64>,
    back_action: Vec<Complex64>,
    front_only: Vec<Complex64>,
    end_only: Vec<Complex64>,
    shot: f64,
    signal: Option<(usize, Complex64)>,
}

/// Index order of the accumulated channels.
const MEASURED: usize = 0;
const THERMAL: usize = 1;
const BACK_ACTION: usize = 2;
const SIGNAL: usize = 3;
const FRONT: usize = 4;
const END: usize = 5;

fn transfer(config: &CampaignConfig, warnings: &mut Vec<String>) -> Result<Transfer> {
    let n = config.bins() * config.oversample;
    let spacing = config.raw_spacing();
    let lo = config.span_hz[0];
    let omega = |j: usize| hz_to_rad(lo + (j as f64 + 0.5) * spacing);

    let force = intracavity_force_coupling(&config.cavity, config.beams.back_action_fluctuation(&config.cavity));
    let mut thermal_front = Vec::with_capacity(n);
    let mut thermal_end = Vec::with_capacity(n);
    let mut back_action = Vec::with_capacity(n);
    let mut front_only = Vec::with_capacity(n);
    let mut end_only = Vec::with_capacity(n);
    for j in 0..n {
        let w = omega(j);
        let cf = config.front.susceptibility(w);
        let ce = config.end.susceptibility(w);
        thermal_front.push(thermal_noise_asd(&config.front, config.temperature_k, w)?);
        thermal_end.push(thermal_noise_asd(&config.end, config.temperature_k, w)?);
        back_action.push((cf + ce) * force);
        front_only.push(cf * force);
        end_only.push(ce * force);
    }

    let mut shot = shot_noise_floor(&config.cavity, config.beams.probe_power_w)?;
    if let Some(db) = config.leakage_db {
        let noise = config.beams.noise_beam;
        let ratio = noise.intensity_noise_level
            * (photon_flux(&config.cavity, noise.power_w) / photon_flux(&config.cavity, config.beams.probe_power_w))
                .sqrt();
        let leak = 10f64.powf(db / 20.0) * ratio * shot;
        shot = shot.hypot(leak);
    }

    let signal = match &config.beams.signal {
        None => None,
        Some(sig) => {
            let f = sig.frequency / (2.0 * std::f64::consts::PI);
            let j = ((f - lo) / spacing).floor();
            if j < 0.0 || j as usize >= n {
                warnings.push(format!("signal at {f:.3} Hz lies outside the span and is not recorded"));
                None
            } else {
                let displacement = match sig.target {
                    SignalTarget::CavityLength => Complex64::new(sig.amplitude, 0.0),
                    SignalTarget::ForceOnEnd => config.end.susceptibility(sig.frequency) * sig.amplitude,
                    // a push on the front mirror shortens the cavity
                    SignalTarget::ForceOnFront => -config.front.susceptibility(sig.frequency) * sig.amplitude,
                };
                Some((j as usize, displacement / spacing.sqrt()))
            }
        }
    };

    Ok(Transfer {
        thermal_front,
        thermal_end,
        back_action,
        front_only,
        end_only,
        shot,
        signal,
    })
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Periodograms of one realization, `[channel][raw bin]`.
fn realization(t: &Transfer, seed: u64, index: u64) -> [Vec<f64>; 6] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = t.back_action.len();
    let mut out: [Vec<f64>; 6] = std::array::from_fn(|_| Vec::with_capacity(n));
    for j in 0..n {
        let xi_front = complex_normal(&mut rng);
        let xi_end = complex_normal(&mut rng);
        let xi_drive = complex_normal(&mut rng);
        let xi_shot = complex_normal(&mut rng);

        let thermal = xi_front * t.thermal_front[j] + xi_end * t.thermal_end[j];
        let back_action = t.back_action[j] * xi_drive;
        let signal = match t.signal {
            Some((k, s)) if k == j => s,
            _ => Complex64::new(0.0, 0.0),
        };
        let total = thermal + back_action + xi_shot * t.shot + signal;

        out[MEASURED].push(total.norm_sqr());
        out[THERMAL].push(thermal.norm_sqr());
        out[BACK_ACTION].push(back_action.norm_sqr());
        out[SIGNAL].push(signal.norm_sqr());
        out[FRONT].push((t.front_only[j] * xi_drive).norm_sqr());
        out[END].push((t.end_only[j] * xi_drive).norm_sqr());
    }
    out
}

fn expectation(t: &Transfer) -> [Vec<f64>; 6] {
    let n = t.back_action.len();
    let mut out: [Vec<f64>; 6] = std::array::from_fn(|_| Vec::with_capacity(n));
    for j in 0..n {
        let thermal = t.thermal_front[j].powi(2) + t.thermal_end[j].powi(2);
        let back_action = t.back_action[j].norm_sqr();
        let signal = match t.signal {
            Some((k, s)) if k == j => s.norm_sqr(),
            _ => 0.0,
        };
        out[MEASURED].push(thermal + back_action + t.shot * t.shot + signal);
        out[THERMAL].push(thermal);
        out[BACK_ACTION].push(back_action);
        out[SIGNAL].push(signal);
        out[FRONT].push(t.front_only[j].norm_sqr());
        out[END].push(t.end_only[j].norm_sqr());
    }
    out
}

fn prepare(config: &CampaignConfig) -> Result<(Transfer, Vec<String>)> {
    config.validate()?;
    let mut warnings = Vec::new();
    let splitting = min_mode_splitting_hz(&config.front, &config.end);
    if config.rbw_hz > splitting {
        warnings.push(format!(
            "resolution bandwidth {} Hz is coarser than the smallest mode splitting {splitting:.3} Hz",
            config.rbw_hz
        ));
    }
    if config.rbw_hz > config.drive_bandwidth_hz {
        warnings.push(format!(
            "resolution bandwidth {} Hz exceeds the noise drive bandwidth {} Hz",
            config.rbw_hz, config.drive_bandwidth_hz
        ));
    }
    if let Some(w) = readout_frequency_warning(&config.cavity, hz_to_rad(config.span_hz[1])) {
        warnings.push(w);
    }
    let t = transfer(config, &mut warnings)?;
    Ok((t, warnings))
}

fn assemble(
    config: &CampaignConfig,
    psd: [Vec<f64>; 6],
    shot: f64,
    analytic: bool,
    warnings: Vec<String>,
) -> Result<Campaign> {
    let spacing = config.raw_spacing();
    let mut traces = Vec::with_capacity(6);
    for (channel, values) in Channel::ALL.into_iter().zip(psd) {
        let raw = RawPsd {
            start_hz: config.span_hz[0],
            spacing_hz: spacing,
            psd: values,
            unit: AsdUnit::MetrePerRootHz,
            channel,
        };
        traces.push(rbw_binning(&raw, config.rbw_hz)?);
    }
    let mut it = traces.into_iter();
    let mut next = || it.next().unwrap();
    let noise = config.beams.noise_beam;
    Ok(Campaign {
        measured: next(),
        thermal_only: next(),
        back_action_only: next(),
        signal_only: next(),
        individual_front: next(),
        individual_end: next(),
        metadata: CampaignMetadata {
            seed: config.seed,
            averages: config.averages,
            rbw_hz: config.rbw_hz,
            drive_bandwidth_hz: config.drive_bandwidth_hz,
            temperature_k: config.temperature_k,
            probe_power_w: config.beams.probe_power_w,
            noise_power_w: noise.power_w,
            intensity_noise_level: noise.intensity_noise_level,
            shot_floor: shot,
            signal: config.beams.signal,
            analytic,
            warnings,
        },
    })
}

/// Runs a seeded campaign: `averages` independent realizations of thermal,
/// back-action and shot noise, averaged as periodograms and binned to the
/// resolution bandwidth.
///
/// Realization `i` draws from ChaCha8 stream `i` of `seed`, so the output is
/// independent of thread scheduling.
pub fn run_campaign(config: &CampaignConfig) -> Result<Campaign> {
    let (t, warnings) = prepare(config)?;
    let n = t.back_action.len();
    let mut sums: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
    let mut start = 0;
    while start < config.averages {
        let stop = (start + BATCH).min(config.averages);
        let batch: Vec<[Vec<f64>; 6]> = (start..stop)
            .into_par_iter()
            .map(|i| realization(&t, config.seed, i as u64))
            .collect();
        for r in &batch {
            for (acc, v) in sums.iter_mut().zip(r) {
                acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
            }
        }
        start = stop;
    }
    let scale = 1.0 / config.averages as f64;
    for acc in sums.iter_mut() {
        acc.iter_mut().for_each(|a| *a *= scale);
    }
    assemble(config, sums, t.shot, false, warnings)
}

/// The ensemble-mean traces of a campaign, with no stochastic scatter.
pub fn expected_campaign(config: &CampaignConfig) -> Result<Campaign> {
    let (t, warnings) = prepare(config)?;
    let psd = expectation(&t);
    assemble(config, psd, t.shot, true, warnings)
}

/// Returns `config` with a monochromatic force of RMS `amplitude` (N) at
/// angular frequency `omega` acting on one mirror.
pub fn inject_force_signal(
    config: &CampaignConfig,
    target: MirrorLabel,
    amplitude: f64,
    omega: f64,
) -> Result<CampaignConfig> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::invalid("beams.signal.amplitude", "must be non-negative"));
    }
    let mut out = config.clone();
    out.beams.signal = Some(SignalSpec {
        target: match target {
            MirrorLabel::Front => SignalTarget::ForceOnFront,
            MirrorLabel::End => SignalTarget::ForceOnEnd,
        },
        amplitude,
        frequency: omega,
    });
    Ok(out)
}

/// Returns `config` with an apparent cavity-length modulation of RMS
/// `amplitude` (m) at `omega`.
pub fn inject_length_signal(config: &CampaignConfig, amplitude: f64, omega: f64) -> Result<CampaignConfig> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::invalid("beams.signal.amplitude", "must be non-negative"));
    }
    let mut out = config.clone();
    out.beams.signal = Some(SignalSpec {
        target: SignalTarget::CavityLength,
        amplitude,
        frequency: omega,
    });
    Ok(out)
}

/// Noise-beam intensity-noise level that puts the back-action length noise at
/// least `margin_db` above the thermal noise at every raw frequency of the
/// span.
pub fn noise_level_above_thermal(config: &CampaignConfig, margin_db: f64) -> Result<f64> {
    let noise_power = config.beams.noise_beam.power_w;
    if !(noise_power > 0.0) {
        return Err(Error::invalid("beams.noise.power_w", "must be positive to set a noise level"));
    }
    let cavity = &config.cavity;
    let gain = 10f64.powf(margin_db / 20.0);
    let unit_force = intracavity_force_coupling(cavity, 1.0);
    let probe_flux = photon_flux(cavity, config.beams.probe_power_w);
    let noise_flux = photon_flux(cavity, noise_power);
    let spacing = config.raw_spacing();
    let n = config.bins() * config.oversample;
    let mut level_sq: f64 = 0.0;
    for j in 0..n {
        let w = hz_to_rad(config.span_hz[0] + (j as f64 + 0.5) * spacing);
        let thermal = thermal_noise_asd(&config.front, config.temperature_k, w)?
            .hypot(thermal_noise_asd(&config.end, config.temperature_k, w)?);
        let chi = pair_susceptibility(&config.front, &config.end, w).norm();
        let needed_flux = (gain * thermal / (chi * unit_force)).powi(2);
        level_sq = level_sq.max((needed_flux - probe_flux) / noise_flux);
    }
    Ok(level_sq.max(0.0).sqrt())
}

/// RMS force on `target` whose displacement at that mirror's fundamental
/// resonance sits `below_db` under the back-action noise power collected in
/// one resolution bin there.
pub fn force_below_back_action(config: &CampaignConfig, target: MirrorLabel, below_db: f64) -> f64 {
    let mirror = match target {
        MirrorLabel::Front => &config.front,
        MirrorLabel::End => &config.end,
    };
    let w = mirror.fundamental().resonance();
    let force = intracavity_force_coupling(&config.cavity, config.beams.back_action_fluctuation(&config.cavity));
    let back_action_psd = (pair_susceptibility(&config.front, &config.end, w).norm() * force).powi(2);
    let line_power = 10f64.powf(-below_db / 10.0) * back_action_psd * config.rbw_hz;
    line_power.sqrt() / mirror.susceptibility(w).norm()
}

fn min_mode_splitting_hz(front: &MirrorModel, end: &MirrorModel) -> f64 {
    let mut f: Vec<f64> = front
        .modes()
        .iter()
        .chain(end.modes())
        .map(|m| m.resonance() / (2.0 * std::f64::consts::PI))
        .collect();
    f.sort_by(f64::total_cmp);
    f.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}
