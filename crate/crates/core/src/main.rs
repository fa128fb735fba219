use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dualres::app::{cmd_budget, cmd_campaign, cmd_fit, ConfigSource, RunOptions};

#[derive(Parser)]
#[command(name = "dualres", version, about = "Dual-resonator back-action cancellation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noise budget, anti-resonances and force limits.
    Budget(Common),
    /// Seeded spectrum-analyzer campaign.
    Campaign(Common),
    /// Thermal doublet fit of a measured trace.
    Fit {
        /// CSV with header `freq_hz,asd_m_per_sqrt_hz`.
        trace: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Bundled preset: paper_defaults, fig2b or fig3c.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the campaign seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_plot: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        let source = match (&self.config, &self.scenario) {
            (Some(p), _) => ConfigSource::File(p.clone()),
            (None, Some(s)) => ConfigSource::Preset(s.clone()),
            (None, None) => unreachable!("clap requires one"),
        };
        RunOptions {
            source,
            out: self.out.clone(),
            seed: self.seed,
            plot: !self.no_plot,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Budget(c) => cmd_budget(&c.options()),
        Command::Campaign(c) => cmd_campaign(&c.options()),
        Command::Fit { trace, common } => cmd_fit(trace, &common.options()),
    };
    match result {
        Ok(summary) => {
            for f in &summary.manifest.outputs {
                println!("{}", summary.out.join(&f.path).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
