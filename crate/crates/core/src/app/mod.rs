//! The `budget`, `campaign` and `fit` workflows: load a configuration, run the
//! library, and write CSV, JSON and SVG outputs plus a [`RunManifest`].
//!
//! Every file is written atomically. Plot failures are logged and skipped.

mod io;
mod manifest;
pub mod plot;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::budget::{
    find_anti_resonance, force_min_with_cancellation, force_sql, optimal_power, quantum_optimal_sensitivity,
    sensitivity_curve, shot_noise_floor, AntiResonanceReport,
};
use crate::config::{preset, ConfigError, GuessSource, RunConfig, PRESET_NAMES};
use crate::error::Error;
use crate::fit::{auto_guess, fit_thermal_doublet, measure_dip, DipMeasurement, DoubletGuess, FitResult};
use crate::physics::{hz_to_rad, rad_to_hz, MirrorLabel, SignalSpec};
use crate::synth::{run_campaign, Campaign, CampaignMetadata};

pub use io::{read_trace, sha256_hex, TRACE_HEADER};
pub use manifest::{input_digest, ManifestMismatch, OutputFile, RunManifest, CONFIG_COPY, MANIFEST_FILE};
use plot::{log_y_plot, Series, Stroke};

pub const BUDGET_HEADER: [&str; 6] = ["freq_hz", "shot", "back_action", "thermal_front", "thermal_end", "total"];
pub const TRACES_HEADER: [&str; 7] = [
    "freq_hz",
    "measured",
    "thermal_only",
    "back_action_only",
    "signal_only",
    "individual_front",
    "individual_end",
];

/// Median trace value above which a length trace is assumed to be in the
/// wrong unit.
pub const UNIT_WARNING_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigSource {
    File(PathBuf),
    Preset(String),
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub source: ConfigSource,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub plot: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl AppError {
    /// 3 for physics violations, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(ConfigError::Invalid(e)) | AppError::Analysis(e) if e.is_physics_violation() => 3,
            _ => 2,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> AppError {
    let context = context.into();
    move |source| AppError::Io { context, source }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub manifest: RunManifest,
    pub warnings: Vec<String>,
}

struct Loaded {
    text: String,
    label: String,
    config: RunConfig,
}

fn load(source: &ConfigSource) -> Result<Loaded, AppError> {
    let (text, label) = match source {
        ConfigSource::File(p) => (
            std::fs::read_to_string(p).map_err(|e| AppError::Input(format!("{}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        ConfigSource::Preset(name) => (
            preset(name)
                .ok_or_else(|| {
                    AppError::Usage(format!("unknown scenario `{name}`; known: {}", PRESET_NAMES.join(", ")))
                })?
                .to_string(),
            format!("preset:{name}"),
        ),
    };
    let config = RunConfig::parse(&text)?;
    config.validate().map_err(ConfigError::from)?;
    Ok(Loaded { text, label, config })
}

/// Collects output files and writes them with the manifest at the end.
struct Outputs {
    dir: PathBuf,
    files: Vec<OutputFile>,
    plot: bool,
    warnings: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path, plot: bool) -> Result<Self, AppError> {
        std::fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            plot,
            warnings: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), AppError> {
        let path = self.dir.join(name);
        io::write_atomic(&path, bytes).map_err(io_err(format!("writing {}", path.display())))?;
        self.files.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    fn plot(&mut self, name: &str, render: impl FnOnce() -> Result<String, plot::PlotError>) {
        if !self.plot {
            return;
        }
        let path = self.dir.join(name);
        let result = render()
            .map_err(|e| e.to_string())
            .and_then(|svg| io::write_atomic(&path, svg.as_bytes()).map(|_| svg).map_err(|e| e.to_string()));
        match result {
            Ok(svg) => self.files.push(OutputFile {
                path: name.to_string(),
                sha256: sha256_hex(svg.as_bytes()),
            }),
            Err(e) => log::warn!("plot {name} skipped: {e}"),
        }
    }

    fn finish(
        self,
        command: &str,
        loaded: &Loaded,
        trace: Option<(&Path, &[u8])>,
        seed: Option<u64>,
        started: Instant,
    ) -> Result<RunSummary, AppError> {
        let mut outputs = self;
        io::write_atomic(&outputs.dir.join(CONFIG_COPY), loaded.text.as_bytes())
            .map_err(io_err("writing config copy"))?;
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_source: loaded.label.clone(),
            config_digest: input_digest(loaded.text.as_bytes(), trace.map(|t| t.1)),
            input_trace: trace.map(|t| std::fs::canonicalize(t.0).unwrap_or(t.0.to_path_buf()).display().to_string()),
            seed,
            duration_s: started.elapsed().as_secs_f64(),
            outputs: std::mem::take(&mut outputs.files),
        };
        io::write_atomic(&outputs.dir.join(MANIFEST_FILE), &io::json_bytes(&manifest))
            .map_err(io_err("writing manifest"))?;
        Ok(RunSummary {
            out: outputs.dir,
            manifest,
            warnings: outputs.warnings,
        })
    }
}

/// Limits evaluated at one anti-resonance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipLimits {
    pub dip_hz: f64,
    pub optimal_power_w: f64,
    pub quantum_optimal_sensitivity: f64,
    pub force_sql_front: f64,
    pub force_sql_end: f64,
    pub force_min_front_sensor: f64,
    pub force_min_end_sensor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    pub bandwidth_hz: f64,
    pub shot_noise_floor: f64,
    pub probe_power_w: f64,
    pub intensity_noise_level: f64,
    pub anti_resonances: Vec<AntiResonanceReport>,
    pub limits: Vec<DipLimits>,
    pub warnings: Vec<String>,
}

/// Noise budget on the `[budget]` grid: `budget.csv`, `report.json` and
/// `budget.svg`.
pub fn cmd_budget(opts: &RunOptions) -> Result<RunSummary, AppError> {
    let started = Instant::now();
    let loaded = load(&opts.source)?;
    let cfg = &loaded.config;
    let section = cfg
        .budget
        .as_ref()
        .ok_or_else(|| ConfigError::from(Error::invalid("budget", "section is missing")))?;
    let cavity = cfg.cavity().map_err(ConfigError::from)?;
    let (front, end) = cfg.mirrors().map_err(ConfigError::from)?;
    let beams = if cfg.beams.noise.above_thermal_db.is_some() {
        let mut b = cfg.campaign(None)?.config.beams;
        b.signal = None;
        b
    } else {
        cfg.beams().map_err(ConfigError::from)?
    };

    let [lo, hi] = section.span_hz;
    let n = ((hi - lo) / section.step_hz + 1e-9).floor() as usize + 1;
    let freq: Vec<f64> = (0..n).map(|i| lo + i as f64 * section.step_hz).collect();
    let omega: Vec<f64> = freq.iter().map(|&f| hz_to_rad(f)).collect();
    let curve = sensitivity_curve(&cavity, &front, &end, &beams, section.temperature_k, &omega)?;

    let mut out = Outputs::new(&opts.out, opts.plot)?;
    for w in &curve.metadata.warnings {
        out.warn(w.clone());
    }
    let mut anti_resonances = Vec::new();
    let mut limits = Vec::new();
    for bracket in &section.dip_brackets_hz {
        let r = find_anti_resonance(&front, &end, *bracket)?;
        let w = r.dip_omega;
        limits.push(DipLimits {
            dip_hz: r.dip_hz,
            optimal_power_w: optimal_power(&cavity, &front, &end, w)?,
            quantum_optimal_sensitivity: quantum_optimal_sensitivity(&front, &end, w),
            force_sql_front: force_sql(&front, w)?,
            force_sql_end: force_sql(&end, w)?,
            force_min_front_sensor: force_min_with_cancellation(&front, &end, MirrorLabel::Front, w)?,
            force_min_end_sensor: force_min_with_cancellation(&front, &end, MirrorLabel::End, w)?,
        });
        anti_resonances.push(r);
    }

    let cols: [&[f64]; 6] = [
        &freq,
        &curve.shot,
        &curve.back_action,
        &curve.thermal_front,
        &curve.thermal_end,
        &curve.total,
    ];
    out.write("budget.csv", &io::csv_bytes(&BUDGET_HEADER, &cols))?;
    let report = BudgetReport {
        bandwidth_hz: cavity.bandwidth_hz(),
        shot_noise_floor: shot_noise_floor(&cavity, beams.probe_power_w)?,
        probe_power_w: beams.probe_power_w,
        intensity_noise_level: beams.noise_beam.intensity_noise_level,
        anti_resonances,
        limits,
        warnings: out.warnings.clone(),
    };
    out.write("report.json", &io::json_bytes(&report))?;
    let khz: Vec<f64> = freq.iter().map(|f| f / 1e3).collect();
    out.plot("budget.svg", || {
        log_y_plot(
            "Length noise budget",
            "frequency (kHz)",
            "ASD (m/sqrt(Hz))",
            &[
                Series { name: "total", x: &khz, y: &curve.total, color: "black", stroke: Stroke::Solid },
                Series { name: "back-action", x: &khz, y: &curve.back_action, color: "#d62728", stroke: Stroke::Solid },
                Series { name: "thermal front", x: &khz, y: &curve.thermal_front, color: "#1f77b4", stroke: Stroke::Dashed },
                Series { name: "thermal end", x: &khz, y: &curve.thermal_end, color: "#2ca02c", stroke: Stroke::Dotted },
                Series { name: "shot", x: &khz, y: &curve.shot, color: "#7f7f7f", stroke: Stroke::Dashed },
            ],
        )
    });
    out.finish("budget", &loaded, None, None, started)
}

/// Signal detectability in a campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalReport {
    pub signal: SignalSpec,
    pub freq_hz: f64,
    /// Signal power over noise power in the signal's bin.
    pub snr: f64,
    /// Same force placed at the target mirror's resonance.
    pub at_resonance_freq_hz: Option<f64>,
    pub at_resonance_snr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub metadata: CampaignMetadata,
    /// Dip of the measured trace between the individual-response peaks.
    pub dip: DipMeasurement,
    /// Same search on the back-action-only trace.
    pub back_action_dip: DipMeasurement,
    /// Closed-form anti-resonances for the configured brackets in the span.
    pub analytic: Vec<AntiResonanceReport>,
    pub signal: Option<SignalReport>,
}

/// Seeded spectrum-analyzer campaign: `traces.csv`, `measured.csv`,
/// `report.json` and `campaign.svg`.
pub fn cmd_campaign(opts: &RunOptions) -> Result<RunSummary, AppError> {
    let started = Instant::now();
    let loaded = load(&opts.source)?;
    let cfg = &loaded.config;
    let resolved = cfg.campaign(opts.seed)?;
    let campaign = run_campaign(&resolved.config)?;

    let mut out = Outputs::new(&opts.out, opts.plot)?;
    for w in &campaign.metadata.warnings {
        out.warn(w.clone());
    }
    out.write("traces.csv", &traces_csv(&campaign))?;
    out.write(
        "measured.csv",
        &io::csv_bytes(&TRACE_HEADER, &[&campaign.measured.freq_hz, &campaign.measured.asd]),
    )?;

    let span = resolved.config.span_hz;
    let mut analytic = Vec::new();
    for bracket in cfg.budget.iter().flat_map(|b| &b.dip_brackets_hz) {
        if bracket[0] >= span[0] && bracket[1] <= span[1] {
            analytic.push(find_anti_resonance(&resolved.config.front, &resolved.config.end, *bracket)?);
        }
    }

    let signal = match resolved.config.beams.signal {
        Some(sig) => {
            let freq_hz = rad_to_hz(sig.frequency);
            let snr = campaign.snr_at(freq_hz).unwrap_or(f64::NAN);
            let (at_resonance_freq_hz, at_resonance_snr) = match &resolved.at_resonance {
                Some(alt) => {
                    let f = rad_to_hz(alt.beams.signal.expect("signal set").frequency);
                    let c = run_campaign(alt)?;
                    out.write("traces_at_resonance.csv", &traces_csv(&c))?;
                    (Some(f), c.snr_at(f))
                }
                None => (None, None),
            };
            Some(SignalReport {
                signal: sig,
                freq_hz,
                snr,
                at_resonance_freq_hz,
                at_resonance_snr,
            })
        }
        None => None,
    };

    let report = CampaignReport {
        metadata: campaign.metadata.clone(),
        dip: measure_dip(&campaign.measured, &campaign.individual_front, &campaign.individual_end)?,
        back_action_dip: measure_dip(
            &campaign.back_action_only,
            &campaign.individual_front,
            &campaign.individual_end,
        )?,
        analytic,
        signal,
    };
    out.write("report.json", &io::json_bytes(&report))?;

    let khz: Vec<f64> = campaign.measured.freq_hz.iter().map(|f| f / 1e3).collect();
    out.plot("campaign.svg", || {
        log_y_plot(
            "Simulated spectrum",
            "frequency (kHz)",
            "ASD (m/sqrt(Hz))",
            &[
                Series { name: "measured", x: &khz, y: &campaign.measured.asd, color: "black", stroke: Stroke::Solid },
                Series { name: "front only", x: &khz, y: &campaign.individual_front.asd, color: "#1f77b4", stroke: Stroke::Dashed },
                Series { name: "end only", x: &khz, y: &campaign.individual_end.asd, color: "#2ca02c", stroke: Stroke::Dotted },
                Series { name: "thermal", x: &khz, y: &campaign.thermal_only.asd, color: "#ff7f0e", stroke: Stroke::Solid },
            ],
        )
    });
    out.finish("campaign", &loaded, None, Some(resolved.config.seed), started)
}

fn traces_csv(c: &Campaign) -> Vec<u8> {
    let mut cols: Vec<&[f64]> = vec![&c.measured.freq_hz];
    cols.extend(c.channels().iter().map(|t| t.asd.as_slice()));
    io::csv_bytes(&TRACES_HEADER, &cols)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub converged: bool,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
    pub warnings: Vec<String>,
}

/// Double-Lorentzian thermal fit of a `freq_hz,asd_m_per_sqrt_hz` trace:
/// `fit.json` and `fit.svg`. A fit that fails or does not converge is still a
/// successful run with `converged = false`.
pub fn cmd_fit(trace_path: &Path, opts: &RunOptions) -> Result<RunSummary, AppError> {
    let started = Instant::now();
    let loaded = load(&opts.source)?;
    let cfg = &loaded.config;
    let trace_bytes = std::fs::read(trace_path).map_err(|e| AppError::Input(format!("{}: {e}", trace_path.display())))?;
    let trace = read_trace(trace_path)?;

    let mut out = Outputs::new(&opts.out, opts.plot)?;
    let mut sorted = trace.asd.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    if median > UNIT_WARNING_THRESHOLD {
        out.warn(format!(
            "median value {median:e} is implausibly large for m/sqrt(Hz); check the trace units"
        ));
    }

    let temperature = cfg.fit.temperature_k;
    let guess = match cfg.fit.guess {
        GuessSource::Mirrors => None,
        GuessSource::Auto => match auto_guess(&trace, temperature) {
            Ok(g) => Some(g),
            Err(e) => {
                out.warn(format!("automatic initial guess failed ({e}); using configured mirrors"));
                None
            }
        },
    };
    let guess = match guess {
        Some(g) => g,
        None => {
            let (front, end) = cfg.mirrors().map_err(ConfigError::from)?;
            DoubletGuess::from_mirrors(&front, &end)
        }
    };
    let report = match fit_thermal_doublet(&trace, temperature, &guess, &cfg.fit_options()) {
        Ok(r) => {
            if !r.converged {
                out.warn(format!("fit did not converge (residual {:e})", r.residual_norm));
            }
            FitReport {
                converged: r.converged,
                fit: Some(r),
                error: None,
                warnings: Vec::new(),
            }
        }
        Err(e) => {
            out.warn(format!("fit failed: {e}"));
            FitReport {
                converged: false,
                fit: None,
                error: Some(e.to_string()),
                warnings: Vec::new(),
            }
        }
    };
    let report = FitReport {
        warnings: out.warnings.clone(),
        ..report
    };
    out.write("fit.json", &io::json_bytes(&report))?;

    if let Some(fit) = &report.fit {
        let (front, end, total) = fit.model_components(&trace.freq_hz);
        let khz: Vec<f64> = trace.freq_hz.iter().map(|f| f / 1e3).collect();
        out.plot("fit.svg", || {
            log_y_plot(
                "Thermal doublet fit",
                "frequency (kHz)",
                "ASD (m/sqrt(Hz))",
                &[
                    Series { name: "data", x: &khz, y: &trace.asd, color: "#7f7f7f", stroke: Stroke::Markers },
                    Series { name: "fit total", x: &khz, y: &total, color: "black", stroke: Stroke::Solid },
                    Series { name: "front mode", x: &khz, y: &front, color: "#1f77b4", stroke: Stroke::Dashed },
                    Series { name: "end mode", x: &khz, y: &end, color: "#2ca02c", stroke: Stroke::Dotted },
                ],
            )
        });
    }
    out.finish("fit", &loaded, Some((trace_path, &trace_bytes)), None, started)
}
