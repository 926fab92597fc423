//! Experiment configuration: a TOML file merged with command-line overrides,
//! then resolved into fully explicit values.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use sdrcpm::dm::{AlphabetSpec, CausalTables, DmTables};
use sdrcpm::frontier::{Axis, GridSpec};
use sdrcpm::PowerConfig;

/// `10^(x/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Error, PartialEq)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    GaussianRegion,
    Tradeoff,
    DmTheorem1,
    DmTheorem2,
    Reductions,
    Sdrc,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Mode::GaussianRegion => "gaussian-region",
            Mode::Tradeoff => "tradeoff",
            Mode::DmTheorem1 => "dm-theorem1",
            Mode::DmTheorem2 => "dm-theorem2",
            Mode::Reductions => "reductions",
            Mode::Sdrc => "sdrc",
        };
        f.write_str(name)
    }
}

/// A power or variance with its unit: `{ db = 10.0 }` or `{ linear = 10.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerValue {
    Db(f64),
    Linear(f64),
}

impl PowerValue {
    pub fn linear(self) -> f64 {
        match self {
            PowerValue::Db(x) => db_to_linear(x),
            PowerValue::Linear(x) => x,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub p1: Option<PowerValue>,
    pub p2: Option<PowerValue>,
    pub n2: Option<PowerValue>,
    pub n3: Option<PowerValue>,
    pub q: Option<PowerValue>,
}

impl PowerSection {
    fn fields_mut(&mut self) -> [(&'static str, &mut Option<PowerValue>); 5] {
        [
            ("p1", &mut self.p1),
            ("p2", &mut self.p2),
            ("n2", &mut self.n2),
            ("n3", &mut self.n3),
            ("q", &mut self.q),
        ]
    }

    pub fn set(&mut self, name: &str, value: PowerValue) {
        if let Some((_, slot)) = self.fields_mut().into_iter().find(|(n, _)| *n == name) {
            *slot = Some(value);
        }
    }

    fn resolve(&mut self) -> Result<PowerConfig, ConfigError> {
        let mut linear = [0.0; 5];
        for (k, (name, slot)) in self.fields_mut().into_iter().enumerate() {
            let path = format!("power.{name}");
            let value =
                slot.ok_or_else(|| ConfigError::new(&path, "missing; give `db` or `linear`"))?;
            let (raw, x) = match value {
                PowerValue::Db(d) => (d, value.linear()),
                PowerValue::Linear(l) => (l, l),
            };
            if !raw.is_finite() || !(x.is_finite() && x > 0.0) {
                return Err(ConfigError::new(
                    path,
                    format!("{raw} does not give a positive finite power"),
                ));
            }
            linear[k] = x;
        }
        let [p1, p2, n2, n3, q] = linear;
        Ok(PowerConfig { p1, p2, n2, n3, q })
    }
}

/// Per-axis replacements for the default sweep grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub rho: Option<Axis>,
    pub gamma: Option<Axis>,
    pub alpha1: Option<Axis>,
    pub alpha2: Option<Axis>,
    pub rho_u1s: Option<Axis>,
    pub theta: Option<Axis>,
    pub beta: Option<Axis>,
    pub f: Option<Axis>,
    pub rho_u2s: Option<f64>,
}

impl GridSection {
    fn resolve(&mut self) -> Result<GridSpec, ConfigError> {
        let d = GridSpec::default();
        let grid = GridSpec {
            rho: *self.rho.get_or_insert(d.rho),
            gamma: *self.gamma.get_or_insert(d.gamma),
            alpha1: *self.alpha1.get_or_insert(d.alpha1),
            alpha2: *self.alpha2.get_or_insert(d.alpha2),
            rho_u1s: *self.rho_u1s.get_or_insert(d.rho_u1s),
            theta: *self.theta.get_or_insert(d.theta),
            beta: *self.beta.get_or_insert(d.beta),
            f: *self.f.get_or_insert(d.f),
            rho_u2s: *self.rho_u2s.get_or_insert(d.rho_u2s),
        };
        grid.validate()
            .map_err(|e| ConfigError::new("grid", e.to_string()))?;
        Ok(grid)
    }
}

/// Discrete-memoryless inputs: explicit tables, or random instances drawn
/// from `seed` when no tables are given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmSection {
    /// Symbols per variable for random instances and the reductions.
    pub symbols: Option<usize>,
    pub instances: Option<usize>,
    pub alphabet: Option<AlphabetSpec>,
    pub tables: Option<DmTables>,
    pub causal_tables: Option<CausalTables>,
}

/// Written by the tool into manifests; ignored on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub version: String,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub theta: Option<Vec<f64>>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    /// Number of R12 targets per trade-off curve.
    pub targets: Option<usize>,
    pub refine: Option<bool>,
    #[serde(default)]
    pub power: PowerSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub dm: DmSection,
    pub run: Option<RunInfo>,
}

pub const DEFAULT_TARGETS: usize = 41;
pub const DEFAULT_SYMBOLS: usize = 2;
pub const DEFAULT_INSTANCES: usize = 8;
pub const DEFAULT_THETAS: [f64; 3] = [0.0, 0.3, 0.6];

/// A config with every value decided.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub mode: Mode,
    pub out: PathBuf,
    pub thetas: Vec<f64>,
    pub workers: usize,
    pub seed: u64,
    pub targets: usize,
    pub refine: bool,
    pub power: PowerConfig,
    pub grid: GridSpec,
    pub dm: DmSection,
    /// The same values in file form, for the manifest.
    pub explicit: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            ConfigError::new("config", message)
        })
    }

    /// Fills defaults and checks every field; the filled config is kept in
    /// [`Resolved::explicit`].
    pub fn resolve(mut self) -> Result<Resolved, ConfigError> {
        self.run = None;
        let mode = self
            .mode
            .ok_or_else(|| ConfigError::new("mode", "missing"))?;
        let out = self.out.get_or_insert_with(|| PathBuf::from("out")).clone();
        let workers = *self.workers.get_or_insert(0);
        let seed = *self.seed.get_or_insert(0);

        let gaussian = matches!(mode, Mode::GaussianRegion | Mode::Tradeoff | Mode::Sdrc);
        let mut thetas = Vec::new();
        let mut targets = 0;
        let mut refine = false;
        let mut power = PowerConfig {
            p1: 1.0,
            p2: 1.0,
            n2: 1.0,
            n3: 1.0,
            q: 1.0,
        };
        let mut grid = GridSpec::default();
        if gaussian {
            power = self.power.resolve()?;
            grid = self.grid.resolve()?;
            refine = *self.refine.get_or_insert(true);
        }
        match mode {
            Mode::Tradeoff => {
                thetas = self
                    .theta
                    .get_or_insert_with(|| DEFAULT_THETAS.to_vec())
                    .clone();
                targets = *self.targets.get_or_insert(DEFAULT_TARGETS);
                if targets == 0 {
                    return Err(ConfigError::new("targets", "must be at least 1"));
                }
            }
            Mode::GaussianRegion => {
                thetas = match &self.theta {
                    Some(list) => list.clone(),
                    None => grid.theta.values().collect(),
                };
            }
            _ => {}
        }
        if let Some(list) = &self.theta {
            if list.is_empty() {
                return Err(ConfigError::new("theta", "list is empty"));
            }
        }
        for (i, t) in thetas.iter().enumerate() {
            if !(0.0..=1.0).contains(t) {
                return Err(ConfigError::new(
                    format!("theta[{i}]"),
                    format!("{t} is outside [0, 1]"),
                ));
            }
        }

        if !gaussian {
            let symbols = *self.dm.symbols.get_or_insert(DEFAULT_SYMBOLS);
            if symbols == 0 {
                return Err(ConfigError::new("dm.symbols", "must be at least 1"));
            }
            let instances = *self.dm.instances.get_or_insert(DEFAULT_INSTANCES);
            if instances == 0 {
                return Err(ConfigError::new("dm.instances", "must be at least 1"));
            }
            if mode != Mode::Reductions {
                let alphabet = self
                    .dm
                    .alphabet
                    .get_or_insert_with(|| AlphabetSpec::uniform(symbols));
                alphabet
                    .validate()
                    .map_err(|e| ConfigError::new("dm.alphabet", e.to_string()))?;
            }
            if mode == Mode::DmTheorem1 && self.dm.causal_tables.is_some() {
                return Err(ConfigError::new(
                    "dm.causal_tables",
                    "dm-theorem1 takes `dm.tables`",
                ));
            }
            if mode == Mode::DmTheorem2 && self.dm.tables.is_some() {
                return Err(ConfigError::new(
                    "dm.tables",
                    "dm-theorem2 takes `dm.causal_tables`",
                ));
            }
        }

        Ok(Resolved {
            mode,
            out,
            thetas,
            workers,
            seed,
            targets,
            refine,
            power,
            grid,
            dm: self.dm.clone(),
            explicit: self,
        })
    }
}
