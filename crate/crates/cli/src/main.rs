mod config;
mod ingest;
mod output;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "reset-hour", version, about = "Reset-hour pricing pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate price-change events into a 24-hour price profile
    IngestPrices(Overrides),
    /// Turn hourly traffic counts into a 24-hour weight profile
    IngestTraffic(Overrides),
    /// Calibrate shares and rank all 24 reset hours
    Sweep(Overrides),
    /// Cross-check the solver against the oracles
    Verify(Overrides),
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Flat `key = value` run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    c: Option<f64>,
    /// Comma-separated marginal costs
    #[arg(long)]
    c_grid: Option<String>,
    #[arg(long)]
    window_start: Option<String>,
    #[arg(long)]
    window_end: Option<String>,
    /// weekday, weekend or all
    #[arg(long)]
    day_filter: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// cent or currency
    #[arg(long)]
    units: Option<String>,
    #[arg(long)]
    prices: Option<PathBuf>,
    #[arg(long)]
    traffic: Option<PathBuf>,
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    paths: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Overrides {
    fn resolve(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let text = [
            ("c", self.c.map(|v| v.to_string())),
            ("c_grid", self.c_grid),
            ("window_start", self.window_start),
            ("window_end", self.window_end),
            ("day_filter", self.day_filter),
            ("units", self.units),
            ("seed", self.seed.map(|v| v.to_string())),
        ];
        for (key, value) in text {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if let Some(p) = self.out_dir {
            cfg.out_dir = p;
        }
        for (slot, value) in [
            (&mut cfg.prices, self.prices),
            (&mut cfg.traffic, self.traffic),
            (&mut cfg.profile, self.profile),
            (&mut cfg.weights, self.weights),
            (&mut cfg.paths, self.paths),
        ] {
            if value.is_some() {
                *slot = value;
            }
        }
        cfg.verbosity = cfg.verbosity.max(self.verbose);
        Ok(cfg)
    }
}

/// Raised when a verification check fails, mapped to exit code 2.
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::IngestPrices(o) => ingest::prices(&o.resolve()?),
        Command::IngestTraffic(o) => ingest::traffic(&o.resolve()?),
        Command::Sweep(o) => sweep::run(&o.resolve()?),
        Command::Verify(o) => verify::run(&o.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<VerificationFailed>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
