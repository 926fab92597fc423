use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use sdrcpm::{RateBounds, SchemeParams};

use crate::config::{ExperimentConfig, RunInfo};

pub const PARAM_COLUMNS: [&str; 9] = [
    "rho", "gamma", "alpha1", "alpha2", "rho_u1s", "theta", "beta", "f", "nhat",
];
pub const BOUND_COLUMNS: [&str; 5] = ["r13_max", "r12_max", "sum_max", "r23_max", "feasible"];
pub const ERROR_COLUMNS: [&str; 4] = ["context", "item", "status", "message"];

/// Nine significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn param_fields(p: &SchemeParams) -> Vec<String> {
    [
        p.rho, p.gamma, p.alpha1, p.alpha2, p.rho_u1s, p.theta, p.beta, p.f, p.nhat,
    ]
    .into_iter()
    .map(num)
    .collect()
}

pub fn bound_fields(b: &RateBounds) -> Vec<String> {
    vec![
        num(b.r13_max),
        num(b.r12_max),
        num(b.r13_plus_r12_max),
        num(b.r23_max),
        b.feasible.to_string(),
    ]
}

/// Rows under a header, written in one go.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn write_manifest(
    path: &Path,
    config: &ExperimentConfig,
    wall_time_seconds: f64,
) -> Result<()> {
    let manifest = ExperimentConfig {
        run: Some(RunInfo {
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds,
        }),
        ..config.clone()
    };
    let text = toml::to_string(&manifest).context("serializing manifest")?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// A gnuplot script drawing R13 against R12, one line per relay split.
pub fn tradeoff_script(curves: &[(f64, String)]) -> String {
    let mut s = String::from(
        "set terminal pngcairo size 800,600\n\
         set output 'tradeoff.png'\n\
         set datafile separator ','\n\
         set title 'Trade-off between R13 and R12'\n\
         set xlabel 'R12 (bits/use)'\n\
         set ylabel 'R13 (bits/use)'\n\
         set key top right\n\
         set grid\n",
    );
    let lines: Vec<String> = curves
        .iter()
        .map(|(theta, file)| {
            format!("'{file}' every ::1 using 1:2 with linespoints title 'theta = {theta}'")
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&lines.join(", \\\n     "));
    s.push('\n');
    s
}
