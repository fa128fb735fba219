use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lm::{minimize, LeastSquares};
use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};
use crate::physics::{hz_to_rad, rad_to_hz, MechanicalMode, MirrorLabel, MirrorModel};
use crate::synth::{SpectrumTrace, DEFAULT_OVERSAMPLE};

const PARAMS: usize = 7;
const OMEGA: [usize; 2] = [0, 1];
const LN_MASS: [usize; 2] = [2, 3];
const LN_Q: [usize; 2] = [4, 5];
const FLOOR: usize = 6;

/// Largest condition number of the column-scaled normal matrix for which the
/// seven doublet parameters count as identifiable.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Stop once the largest relative parameter step falls below this.
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// Residual norm below which a step-converged fit counts as converged.
    pub residual_threshold: f64,
    /// Frequency ranges (Hz) excluded from the fit.
    pub mask_hz: Vec<[f64; 2]>,
    /// Points per bin at which the model is averaged to mimic the
    /// resolution-bandwidth boxcar.
    pub sub_samples: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            step_tolerance: 1e-6,
            max_iterations: 200,
            residual_threshold: 0.25,
            mask_hz: Vec::new(),
            sub_samples: DEFAULT_OVERSAMPLE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGuess {
    pub freq_hz: f64,
    pub mass_kg: f64,
    pub quality: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubletGuess {
    pub modes: [ModeGuess; 2],
    /// White floor, in the trace unit. Estimated from the trace when absent.
    pub floor: Option<f64>,
}

impl DoubletGuess {
    pub fn from_mirrors(front: &MirrorModel, end: &MirrorModel) -> Self {
        let g = |m: &MechanicalMode| ModeGuess {
            freq_hz: rad_to_hz(m.resonance()),
            mass_kg: m.mass(),
            quality: m.quality(),
        };
        Self {
            modes: [g(front.fundamental()), g(end.fundamental())],
            floor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEstimate {
    pub freq_hz: f64,
    pub omega: f64,
    pub mass_kg: f64,
    pub quality: f64,
}

impl ModeEstimate {
    pub fn to_mode(&self) -> Result<MechanicalMode> {
        MechanicalMode::lorentzian(self.omega, self.mass_kg, self.quality)
    }
}

/// Parameter-wise one-sigma uncertainties from the Gauss-Newton covariance,
/// relative to each estimate (frequency, mass, quality).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeErrors {
    pub front: [f64; 3],
    pub end: [f64; 3],
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Lower-frequency mode.
    pub front: ModeEstimate,
    /// Higher-frequency mode.
    pub end: ModeEstimate,
    /// White background floor, trace unit.
    pub floor: f64,
    /// √(Σ w (model/data − 1)² / Σ w) with bin-width weights.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub relative_errors: RelativeErrors,
    pub temperature_k: f64,
}

impl FitResult {
    pub fn mirrors(&self) -> Result<(MirrorModel, MirrorModel)> {
        Ok((
            MirrorModel::single(MirrorLabel::Front, self.front.to_mode()?),
            MirrorModel::single(MirrorLabel::End, self.end.to_mode()?),
        ))
    }

    /// Model ASD of each mirror and of the total on the given frequencies
    /// (point-sampled).
    pub fn model_components(&self, freq_hz: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let kt4 = 4.0 * BOLTZMANN * self.temperature_k;
        let psd = |m: &ModeEstimate, f: f64| {
            mode_psd(kt4, m.omega, m.mass_kg.ln(), m.quality.ln(), hz_to_rad(f)).0
        };
        let mut front = Vec::with_capacity(freq_hz.len());
        let mut end = Vec::with_capacity(freq_hz.len());
        let mut total = Vec::with_capacity(freq_hz.len());
        for &f in freq_hz {
            let (pf, pe) = (psd(&self.front, f), psd(&self.end, f));
            front.push(pf.sqrt());
            end.push(pe.sqrt());
            total.push((pf + pe + self.floor * self.floor).sqrt());
        }
        (front, end, total)
    }
}

/// PSD 4kT Im χ/Ω of one Lorentzian mode and its derivatives with respect to
/// (Ω₀, ln M, ln Q).
fn mode_psd(kt4: f64, w0: f64, ln_m: f64, ln_q: f64, w: f64) -> (f64, [f64; 3]) {
    let q = ln_q.exp();
    let m = ln_m.exp();
    let a = w0 * w0 - w * w;
    let g = w * w0 / q;
    let d = a * a + g * g;
    let p = kt4 * w0 / (q * m * d);
    let d_w0 = p * (1.0 / w0 - (4.0 * a * w0 + 2.0 * g * g / w0) / d);
    let d_ln_m = -p;
    let d_ln_q = p * (-1.0 + 2.0 * g * g / d);
    (p, [d_w0, d_ln_m, d_ln_q])
}

struct DoubletProblem {
    /// Sub-sample angular frequencies, `sub` per used bin.
    omega: Vec<f64>,
    sub: usize,
    data: Vec<f64>,
    /// √(w_k / Σw) / data_k.
    weight: Vec<f64>,
    kt4: f64,
}

impl DoubletProblem {
    fn new(trace: &SpectrumTrace, temperature: f64, options: &FitOptions) -> Result<Self> {
        let sub = options.sub_samples.max(1);
        let width = trace.bin_width_hz;
        let mut omega = Vec::new();
        let mut data = Vec::new();
        for (&f, &v) in trace.freq_hz.iter().zip(&trace.asd) {
            if options.mask_hz.iter().any(|[lo, hi]| f >= *lo && f <= *hi) || v <= 0.0 {
                continue;
            }
            for s in 0..sub {
                let offset = ((s as f64 + 0.5) / sub as f64 - 0.5) * width;
                omega.push(hz_to_rad(f + offset));
            }
            data.push(v);
        }
        if data.len() <= PARAMS {
            return Err(Error::invalid(
                "trace",
                format!("{} usable bins cannot constrain {PARAMS} parameters", data.len()),
            ));
        }
        // uniform bins: every weight is the same fraction of the total width
        let share = (1.0 / data.len() as f64).sqrt();
        let weight = data.iter().map(|d| share / d).collect();
        Ok(Self {
            omega,
            sub,
            data,
            weight,
            kt4: 4.0 * BOLTZMANN * temperature,
        })
    }

    fn model_row(&self, p: &DVector<f64>, k: usize, jac: Option<&mut [f64; PARAMS]>) -> f64 {
        let mut psd = 0.0;
        let mut grad = [0.0; PARAMS];
        for s in 0..self.sub {
            let w = self.omega[k * self.sub + s];
            for i in 0..2 {
                let (v, d) = mode_psd(self.kt4, p[OMEGA[i]], p[LN_MASS[i]], p[LN_Q[i]], w);
                psd += v;
                grad[OMEGA[i]] += d[0];
                grad[LN_MASS[i]] += d[1];
                grad[LN_Q[i]] += d[2];
            }
        }
        let inv = 1.0 / self.sub as f64;
        let floor = p[FLOOR];
        let model = (psd * inv + floor * floor).sqrt();
        if let Some(out) = jac {
            for (o, g) in out.iter_mut().zip(grad) {
                *o = g * inv / (2.0 * model);
            }
            out[FLOOR] = floor / model;
        }
        model
    }
}

impl LeastSquares for DoubletProblem {
    fn evaluate(&self, p: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.data.len();
        let mut r = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, PARAMS);
        let mut row = [0.0; PARAMS];
        for k in 0..n {
            let model = self.model_row(p, k, Some(&mut row));
            r[k] = self.weight[k] * (model - self.data[k]);
            for (j, v) in row.iter().enumerate() {
                jac[(k, j)] = self.weight[k] * v;
            }
        }
        (r, jac)
    }

    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.data.len(),
            (0..self.data.len()).map(|k| self.weight[k] * (self.model_row(p, k, None) - self.data[k])),
        )
    }

    fn relative_step(&self, p: &DVector<f64>, step: &DVector<f64>) -> f64 {
        let smallest = self.data.iter().cloned().fold(f64::INFINITY, f64::min);
        let floor_scale = p[FLOOR].abs().max(1e-3 * smallest).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            worst = worst.max((step[OMEGA[i]] / p[OMEGA[i]]).abs());
            worst = worst.max(step[LN_MASS[i]].abs());
            worst = worst.max(step[LN_Q[i]].abs());
        }
        worst.max((step[FLOOR] / floor_scale).abs())
    }
}

/// Weighted least-squares fit of √(S_f + S_e + floor²) to a thermal noise
/// trace, where S_i is the fluctuation-dissipation PSD of a Lorentzian mode at
/// `temperature`.
///
/// Residuals are relative (model/data − 1), which is the inverse-variance
/// weighting for averaged periodograms. The returned modes are ordered by
/// frequency whatever the order of the guess.
pub fn fit_thermal_doublet(
    trace: &SpectrumTrace,
    temperature: f64,
    guess: &DoubletGuess,
    options: &FitOptions,
) -> Result<FitResult> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::invalid("fit.temperature_k", "must be positive"));
    }
    for (i, m) in guess.modes.iter().enumerate() {
        if !(m.freq_hz > 0.0 && m.mass_kg > 0.0 && m.quality > 0.0) {
            return Err(Error::invalid(format!("fit.initial_guess[{i}]"), "must be positive"));
        }
    }
    let problem = DoubletProblem::new(trace, temperature, options)?;
    let floor0 = guess
        .floor
        .unwrap_or_else(|| 0.5 * problem.data.iter().cloned().fold(f64::INFINITY, f64::min));
    let start = DVector::from_vec(vec![
        hz_to_rad(guess.modes[0].freq_hz),
        hz_to_rad(guess.modes[1].freq_hz),
        guess.modes[0].mass_kg.ln(),
        guess.modes[1].mass_kg.ln(),
        guess.modes[0].quality.ln(),
        guess.modes[1].quality.ln(),
        floor0,
    ]);
    let out = minimize(&problem, start, options.step_tolerance, options.max_iterations);
    let p = &out.params;

    let condition = condition_number(&out.scaled_normal);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::NonIdentifiable { condition });
    }

    let residual_norm = out.cost.sqrt();
    let dof = (problem.data.len() - PARAMS) as f64;
    let rel_err = relative_errors(&out.scaled_normal, &out.scales, out.cost / dof, p);

    let estimate = |i: usize| ModeEstimate {
        freq_hz: rad_to_hz(p[OMEGA[i]]),
        omega: p[OMEGA[i]],
        mass_kg: p[LN_MASS[i]].exp(),
        quality: p[LN_Q[i]].exp(),
    };
    let (mut a, mut b) = (estimate(0), estimate(1));
    let (mut ea, mut eb) = (rel_err[0], rel_err[1]);
    if a.omega > b.omega {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut ea, &mut eb);
    }
    Ok(FitResult {
        front: a,
        end: b,
        floor: p[FLOOR].abs(),
        residual_norm,
        iterations: out.iterations,
        converged: out.step_converged && residual_norm <= options.residual_threshold,
        relative_errors: RelativeErrors {
            front: ea,
            end: eb,
            floor: rel_err[2][0],
        },
        temperature_k: temperature,
    })
}

fn condition_number(normal: &DMatrix<f64>) -> f64 {
    let eig = normal.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// One-sigma relative errors per mode and for the floor, from
/// (cost/dof)·(JᵀJ)⁻¹ undone from the column scaling.
fn relative_errors(
    scaled_normal: &DMatrix<f64>,
    scales: &DVector<f64>,
    variance: f64,
    p: &DVector<f64>,
) -> [[f64; 3]; 3] {
    let Some(inv) = scaled_normal.clone().try_inverse() else {
        return [[f64::INFINITY; 3]; 3];
    };
    let sigma = |j: usize| (inv[(j, j)] * variance).max(0.0).sqrt() / scales[j];
    let mode = |i: usize| [sigma(OMEGA[i]) / p[OMEGA[i]], sigma(LN_MASS[i]), sigma(LN_Q[i])];
    let floor = if p[FLOOR] != 0.0 { sigma(FLOOR) / p[FLOOR].abs() } else { f64::INFINITY };
    [mode(0), mode(1), [floor, 0.0, 0.0]]
}

/// Initial guess read off the trace: the two tallest local maxima, their
/// half-power widths and heights.
pub fn auto_guess(trace: &SpectrumTrace, temperature: f64) -> Result<DoubletGuess> {
    let v = &trace.asd;
    let n = v.len();
    if n < 5 {
        return Err(Error::invalid("trace", "too few bins to locate two peaks"));
    }
    let floor = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut peaks: Vec<usize> = (1..n - 1).filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1]).collect();
    peaks.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    let first = *peaks.first().ok_or_else(|| Error::invalid("trace", "no peak found"))?;
    let second = peaks
        .iter()
        .copied()
        .find(|&i| i.abs_diff(first) >= 2)
        .ok_or_else(|| Error::invalid("trace", "only one peak found"))?;
    let mut pair = [first, second];
    pair.sort_unstable();

    let kt4 = 4.0 * BOLTZMANN * temperature;
    let mode = |i: usize| {
        let peak_psd = v[i] * v[i] - floor * floor;
        let half = 0.5 * peak_psd + floor * floor;
        let mut lo = i;
        while lo > 0 && v[lo] * v[lo] > half {
            lo -= 1;
        }
        let mut hi = i;
        while hi < n - 1 && v[hi] * v[hi] > half {
            hi += 1;
        }
        let width_hz = ((hi - lo) as f64 * trace.bin_width_hz).max(trace.bin_width_hz);
        let f = trace.freq_hz[i];
        let w = hz_to_rad(f);
        let quality = (f / width_hz).max(1.0);
        let mass = kt4 * quality / (w.powi(3) * peak_psd.max(f64::MIN_POSITIVE));
        ModeGuess {
            freq_hz: f,
            mass_kg: mass,
            quality,
        }
    };
    Ok(DoubletGuess {
        modes: [mode(pair[0]), mode(pair[1])],
        floor: Some(floor.max(f64::MIN_POSITIVE)),
    })
}
