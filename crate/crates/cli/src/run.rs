use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sdrcpm::dm::reductions::Reduction;
use sdrcpm::dm::{
    build_joint, causal_subset_check, evaluate_theorem1, evaluate_theorem2, AlphabetSpec,
    CausalFactorization, DmFactorization, StateCoupling,
};
use sdrcpm::frontier::{sdrc_scalar, sweep, tradeoff_family, CellStatus};
use sdrcpm::{evaluate_gaussian_region, RateBounds};

use crate::config::{Mode, Resolved};
use crate::output::{
    bound_fields, num, param_fields, tradeoff_script, Table, BOUND_COLUMNS, ERROR_COLUMNS,
    PARAM_COLUMNS,
};

/// Runs the configured mode and writes its CSVs into `cfg.out`; returns the
/// paths written.
pub fn execute(cfg: &Resolved) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let mut errors = Table::new(&ERROR_COLUMNS);
    let mut written = match cfg.mode {
        Mode::GaussianRegion => gaussian_region(cfg, &mut errors)?,
        Mode::Tradeoff => tradeoff(cfg, &mut errors)?,
        Mode::Sdrc => sdrc(cfg)?,
        Mode::DmTheorem1 => dm_theorem1(cfg, &mut errors)?,
        Mode::DmTheorem2 => dm_theorem2(cfg, &mut errors)?,
        Mode::Reductions => reductions(cfg, &mut errors)?,
    };
    let path = cfg.out.join("errors.csv");
    errors.write(&path)?;
    written.push(path);
    Ok(written)
}

fn gaussian_header(prefix: &[&str]) -> Vec<String> {
    prefix
        .iter()
        .chain(PARAM_COLUMNS.iter())
        .chain(BOUND_COLUMNS.iter())
        .map(|s| s.to_string())
        .collect()
}

fn write(table: &Table, dir: &Path, name: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    table.write(&path)?;
    Ok(path)
}

fn gaussian_region(cfg: &Resolved, errors: &mut Table) -> Result<Vec<PathBuf>> {
    let mut table = Table::new(&gaussian_header(&[]));
    for &theta in &cfg.thetas {
        for cell in sweep(&cfg.power, &cfg.grid, theta)? {
            match &cell.outcome {
                Ok(b) => table.push([param_fields(&cell.params), bound_fields(b)].concat()),
                Err(e) => {
                    let status = match cell.status() {
                        CellStatus::Infeasible => "infeasible",
                        _ => "invalid",
                    };
                    errors.push(vec![
                        format!("theta={theta}"),
                        cell.index.to_string(),
                        status.into(),
                        e.to_string(),
                    ]);
                }
            }
        }
    }
    Ok(vec![write(&table, &cfg.out, "region.csv")?])
}

fn tradeoff(cfg: &Resolved, errors: &mut Table) -> Result<Vec<PathBuf>> {
    let curves = tradeoff_family(&cfg.power, &cfg.thetas, &cfg.grid, cfg.targets, cfg.refine)?;
    let mut written = Vec::new();
    let mut plotted = Vec::new();
    for curve in &curves {
        let mut table = Table::new(&gaussian_header(&["r12", "r13"]));
        for p in &curve.points {
            table.push(
                [
                    vec![num(p.r12), num(p.r13)],
                    param_fields(&p.params),
                    bound_fields(&p.bounds),
                ]
                .concat(),
            );
        }
        for &t in &curve.omitted {
            errors.push(vec![
                format!("theta={}", curve.theta),
                num(t),
                "omitted".into(),
                "no parameter point reaches this R12 target".into(),
            ]);
        }
        let name = format!("tradeoff_theta_{}.csv", curve.theta);
        written.push(write(&table, &cfg.out, &name)?);
        plotted.push((curve.theta, name));
    }
    let script = cfg.out.join("tradeoff.gp");
    fs::write(&script, tradeoff_script(&plotted))
        .with_context(|| format!("writing {}", script.display()))?;
    written.push(script);
    Ok(written)
}

fn sdrc(cfg: &Resolved) -> Result<Vec<PathBuf>> {
    let (rate, params) = sdrc_scalar(&cfg.power, &cfg.grid)?;
    let bounds = evaluate_gaussian_region(&cfg.power, &params)?;
    let mut table = Table::new(&gaussian_header(&["rate"]));
    table.push(
        [
            vec![num(rate)],
            param_fields(&params),
            bound_fields(&bounds),
        ]
        .concat(),
    );
    Ok(vec![write(&table, &cfg.out, "sdrc.csv")?])
}

fn dm_bound_fields(b: &RateBounds) -> Vec<String> {
    let mut f = bound_fields(b);
    f.push(b.clamped.to_string());
    f
}

fn dm_header(prefix: &str) -> Vec<String> {
    BOUND_COLUMNS
        .iter()
        .chain(["clamped"].iter())
        .map(|c| format!("{prefix}{c}"))
        .collect()
}

fn rng(cfg: &Resolved) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn dm_error(errors: &mut Table, context: &str, item: usize, e: impl ToString) {
    errors.push(vec![
        context.into(),
        item.to_string(),
        "invalid".into(),
        e.to_string(),
    ]);
}

fn dm_theorem1(cfg: &Resolved, errors: &mut Table) -> Result<Vec<PathBuf>> {
    let alphabet = cfg.dm.alphabet.unwrap_or_else(|| AlphabetSpec::uniform(2));
    let facts: Vec<sdrcpm::Result<DmFactorization>> = match &cfg.dm.tables {
        Some(tables) => vec![DmFactorization::from_tables(alphabet, tables.clone())],
        None => {
            let mut rng = rng(cfg);
            (0..cfg.dm.instances.unwrap_or(1))
                .map(|_| DmFactorization::random(&alphabet, StateCoupling::Free, &mut rng))
                .collect()
        }
    };
    let mut table = Table::new(&[vec!["instance".to_string()], dm_header("")].concat());
    for (i, fact) in facts.into_iter().enumerate() {
        match fact.and_then(|f| evaluate_theorem1(&f)) {
            Ok(b) => table.push([vec![i.to_string()], dm_bound_fields(&b)].concat()),
            Err(e) => dm_error(errors, "dm-theorem1", i, e),
        }
    }
    Ok(vec![write(&table, &cfg.out, "dm_theorem1.csv")?])
}

fn dm_theorem2(cfg: &Resolved, errors: &mut Table) -> Result<Vec<PathBuf>> {
    let alphabet = cfg.dm.alphabet.unwrap_or_else(|| AlphabetSpec::uniform(2));
    let facts: Vec<sdrcpm::Result<CausalFactorization>> = match &cfg.dm.causal_tables {
        Some(tables) => vec![CausalFactorization::from_tables(alphabet, tables.clone())],
        None => {
            let mut rng = rng(cfg);
            (0..cfg.dm.instances.unwrap_or(1))
                .map(|_| CausalFactorization::random(&alphabet, StateCoupling::Free, &mut rng))
                .collect()
        }
    };
    let header = [
        vec!["instance".to_string()],
        dm_header(""),
        dm_header("noncausal_"),
        vec!["contained".to_string()],
    ]
    .concat();
    let mut table = Table::new(&header);
    for (i, fact) in facts.into_iter().enumerate() {
        let evaluated = fact.and_then(|f| {
            let causal = evaluate_theorem2(&f)?;
            let lifted = evaluate_theorem1(&f.lift()?)?;
            Ok((causal, lifted, causal_subset_check(&f)))
        });
        match evaluated {
            Ok((c, l, contained)) => table.push(
                [
                    vec![i.to_string()],
                    dm_bound_fields(&c),
                    dm_bound_fields(&l),
                    vec![contained.to_string()],
                ]
                .concat(),
            ),
            Err(e) => dm_error(errors, "dm-theorem2", i, e),
        }
    }
    Ok(vec![write(&table, &cfg.out, "dm_theorem2.csv")?])
}

fn reductions(cfg: &Resolved, errors: &mut Table) -> Result<Vec<PathBuf>> {
    let symbols = cfg.dm.symbols.unwrap_or(2);
    let mut rng = rng(cfg);
    let header = [
        vec!["reduction".to_string(), "instance".to_string()],
        dm_header("general_"),
        dm_header("reduced_"),
        vec!["max_abs_diff".to_string()],
    ]
    .concat();
    let mut table = Table::new(&header);
    for r in Reduction::all() {
        let context = format!("{r:?}");
        for i in 0..cfg.dm.instances.unwrap_or(1) {
            let evaluated = r.random_instance(symbols, &mut rng).and_then(|f| {
                let general = evaluate_theorem1(&f)?;
                let reduced = r.reduced_bounds(&build_joint(&f)?);
                Ok((general, reduced))
            });
            match evaluated {
                Ok((g, d)) => {
                    let diff = [
                        g.r13_max - d.r13_max,
                        g.r12_max - d.r12_max,
                        g.r13_plus_r12_max - d.r13_plus_r12_max,
                        g.r23_max - d.r23_max,
                    ]
                    .into_iter()
                    .fold(0.0_f64, |m, x| m.max(x.abs()));
                    table.push(
                        [
                            vec![context.clone(), i.to_string()],
                            dm_bound_fields(&g),
                            dm_bound_fields(&d),
                            vec![num(diff)],
                        ]
                        .concat(),
                    );
                }
                Err(e) => dm_error(errors, &context, i, e),
            }
        }
    }
    Ok(vec![write(&table, &cfg.out, "reductions.csv")?])
}
