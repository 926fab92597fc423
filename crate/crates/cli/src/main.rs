//! `sdrcpm`: runs rate-region experiments from a TOML config and writes CSV
//! results, a run manifest and, for trade-off curves, a gnuplot script.

mod config;
mod output;
mod run;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

use config::{ConfigError, ExperimentConfig, Mode, PowerValue};

#[derive(Debug, Parser)]
#[command(
    name = "sdrcpm",
    version,
    about = "Rate regions of the state-dependent relay channel"
)]
struct Cli {
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated relay power splits, e.g. `0,0.3,0.6`.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    theta: Option<Vec<f64>>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// R12 targets per trade-off curve.
    #[arg(long)]
    targets: Option<usize>,
    /// Skip local refinement of grid optima.
    #[arg(long)]
    no_refine: bool,
    #[arg(long, conflicts_with = "p1_linear")]
    p1_db: Option<f64>,
    #[arg(long)]
    p1_linear: Option<f64>,
    #[arg(long, conflicts_with = "p2_linear")]
    p2_db: Option<f64>,
    #[arg(long)]
    p2_linear: Option<f64>,
    #[arg(long, conflicts_with = "n2_linear")]
    n2_db: Option<f64>,
    #[arg(long)]
    n2_linear: Option<f64>,
    #[arg(long, conflicts_with = "n3_linear")]
    n3_db: Option<f64>,
    #[arg(long)]
    n3_linear: Option<f64>,
    #[arg(long, conflicts_with = "q_linear")]
    q_db: Option<f64>,
    #[arg(long)]
    q_linear: Option<f64>,
}

impl Cli {
    fn merge(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if self.mode.is_some() {
            cfg.mode = self.mode;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.theta.is_some() {
            cfg.theta = self.theta.clone();
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.targets.is_some() {
            cfg.targets = self.targets;
        }
        if self.no_refine {
            cfg.refine = Some(false);
        }
        let powers = [
            ("p1", self.p1_db, self.p1_linear),
            ("p2", self.p2_db, self.p2_linear),
            ("n2", self.n2_db, self.n2_linear),
            ("n3", self.n3_db, self.n3_linear),
            ("q", self.q_db, self.q_linear),
        ];
        for (name, db, linear) in powers {
            if let Some(x) = db {
                cfg.power.set(name, PowerValue::Db(x));
            }
            if let Some(x) = linear {
                cfg.power.set(name, PowerValue::Linear(x));
            }
        }
        cfg
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match start(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<ConfigError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn start(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let cfg = cli.merge(file).resolve()?;

    let clock = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .context("starting worker pool")?;
    let written = pool.install(|| run::execute(&cfg))?;
    let manifest = cfg.out.join("manifest.toml");
    output::write_manifest(&manifest, &cfg.explicit, clock.elapsed().as_secs_f64())?;

    for path in written.iter().chain([&manifest]) {
        println!("{}", path.display());
    }
    Ok(())
}
