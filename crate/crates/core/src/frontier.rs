//! Grid sweeps over the Gaussian scheme parameters, local refinement, and
//! the R12/R13 trade-off curves at a fixed relay power split.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{PowerConfig, SchemeParams};
use crate::region::{evaluate_with_optimal_nhat, RateBounds, FEASIBILITY_TOL};

/// Evenly spaced values `lo, …, hi`; a single step yields `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Axis { lo, hi, steps }
    }

    pub fn fixed(value: f64) -> Self {
        Axis::new(value, value, 1)
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps <= 1 {
            self.lo
        } else if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|i| self.value(i))
    }

    fn validate(&self, name: &'static str, lo: f64, hi: f64) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidParameter {
                name,
                value: 0.0,
                range: "steps >= 1",
            });
        }
        for value in [self.lo, self.hi] {
            if !(value.is_finite() && value >= lo && value <= hi) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    range: "axis bounds of the parameter",
                });
            }
        }
        if self.hi < self.lo {
            return Err(Error::InvalidParameter {
                name,
                value: self.hi,
                range: "hi >= lo",
            });
        }
        Ok(())
    }
}

/// The scheme parameters swept, one axis each; `rho_u2s` stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rho: Axis,
    pub gamma: Axis,
    pub alpha1: Axis,
    pub alpha2: Axis,
    pub rho_u1s: Axis,
    pub theta: Axis,
    pub beta: Axis,
    pub f: Axis,
    pub rho_u2s: f64,
}

impl Default for GridSpec {
    /// 9 points per correlation axis, 11 for the power fractions, 13 for the
    /// inflation factors on `[0, 1.2]`, and a 3×3 compression grid. Scaling
    /// `(β, f)` only rescales the optimal compression noise, so the
    /// compression axes need directions rather than magnitudes.
    fn default() -> Self {
        GridSpec {
            rho: Axis::new(-1.0, 1.0, 9),
            gamma: Axis::new(0.0, 1.0, 11),
            alpha1: Axis::new(0.0, 1.2, 13),
            alpha2: Axis::new(0.0, 1.2, 13),
            rho_u1s: Axis::new(-1.0, 1.0, 9),
            theta: Axis::new(0.0, 1.0, 11),
            beta: Axis::new(0.0, 1.0, 3),
            f: Axis::new(-0.5, 0.5, 3),
            rho_u2s: 0.0,
        }
    }
}

impl GridSpec {
    fn axes(&self) -> [&Axis; 8] {
        [
            &self.rho,
            &self.gamma,
            &self.alpha1,
            &self.alpha2,
            &self.rho_u1s,
            &self.theta,
            &self.beta,
            &self.f,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.rho.validate("rho", -1.0, 1.0)?;
        self.gamma.validate("gamma", 0.0, 1.0)?;
        self.alpha1.validate("alpha1", f64::MIN, f64::MAX)?;
        self.alpha2.validate("alpha2", f64::MIN, f64::MAX)?;
        self.rho_u1s.validate("rho_u1s", -1.0, 1.0)?;
        self.theta.validate("theta", 0.0, 1.0)?;
        self.beta.validate("beta", 0.0, 1.0)?;
        self.f.validate("f", -1.0, 1.0)?;
        if !(-1.0..=1.0).contains(&self.rho_u2s) {
            return Err(Error::InvalidParameter {
                name: "rho_u2s",
                value: self.rho_u2s,
                range: "[-1, 1]",
            });
        }
        Ok(())
    }

    pub fn cells(&self) -> u128 {
        self.axes().iter().map(|a| a.steps as u128).product()
    }

    /// The same grid with θ pinned.
    pub fn with_theta(&self, theta: f64) -> Self {
        GridSpec {
            theta: Axis::fixed(theta),
            ..*self
        }
    }

    /// Parameters of cell `index`, the last axis (`f`) varying fastest.
    pub fn cell(&self, index: usize) -> SchemeParams {
        let mut digits = [0usize; 8];
        let mut rest = index;
        for (d, axis) in digits.iter_mut().zip(self.axes()).rev() {
            *d = rest % axis.steps;
            rest /= axis.steps;
        }
        SchemeParams {
            rho: self.rho.value(digits[0]),
            gamma: self.gamma.value(digits[1]),
            alpha1: self.alpha1.value(digits[2]),
            alpha2: self.alpha2.value(digits[3]),
            rho_u1s: self.rho_u1s.value(digits[4]),
            theta: self.theta.value(digits[5]),
            beta: self.beta.value(digits[6]),
            f: self.f.value(digits[7]),
            rho_u2s: self.rho_u2s,
            nhat: crate::region::NHAT_DEFAULT,
        }
    }

    fn cell_count(&self) -> Result<usize> {
        self.validate()?;
        usize::try_from(self.cells()).map_err(|_| Error::Capacity {
            cells: self.cells(),
            cap: usize::MAX,
        })
    }
}

/// Classification of one evaluated grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellStatus {
    /// Feasible with every bound nonnegative.
    Nonempty,
    /// Some bound was negative, so the cell contributes no rates.
    Empty,
    /// The compression constraint cannot be met.
    Infeasible,
    /// The parameters are out of range or not jointly realizable.
    Invalid,
}

/// One grid cell: its parameters (with the solved compression noise when
/// evaluation succeeded) and its bounds or the reason it has none.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub index: usize,
    pub params: SchemeParams,
    pub outcome: Result<RateBounds>,
}

impl CellResult {
    pub fn status(&self) -> CellStatus {
        match &self.outcome {
            Ok(b) if b.is_nonempty() => CellStatus::Nonempty,
            Ok(b) if !b.feasible => CellStatus::Infeasible,
            Ok(_) => CellStatus::Empty,
            Err(Error::ConstraintInfeasible { .. }) => CellStatus::Infeasible,
            Err(_) => CellStatus::Invalid,
        }
    }
}

fn evaluate_cell(power: &PowerConfig, index: usize, params: SchemeParams) -> CellResult {
    match params.validate().and_then(|_| evaluate_with_optimal_nhat(power, &params)) {
        Ok((params, _, bounds)) => CellResult {
            index,
            params,
            outcome: Ok(bounds),
        },
        Err(e) => CellResult {
            index,
            params,
            outcome: Err(e),
        },
    }
}

/// Evaluates every cell of `grid` in parallel, in cell-index order.
pub fn sweep_grid(power: &PowerConfig, grid: &GridSpec) -> Result<Vec<CellResult>> {
    power.validate()?;
    let cells = grid.cell_count()?;
    Ok((0..cells)
        .into_par_iter()
        .map(|i| evaluate_cell(power, i, grid.cell(i)))
        .collect())
}

/// [`sweep_grid`] with θ pinned.
pub fn sweep(power: &PowerConfig, grid: &GridSpec, theta: f64) -> Result<Vec<CellResult>> {
    sweep_grid(power, &grid.with_theta(theta))
}

/// A functional of the rate bounds of one parameter point, to be maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateObjective {
    /// Largest weighted sum `w12·R12 + w13·R13 + w23·R23` over the region
    /// (weights nonnegative).
    Weighted { w12: f64, w13: f64, w23: f64 },
    /// Largest `R13` with `R12` at `target`.
    R13AtR12 { target: f64 },
}

impl RateObjective {
    /// `None` when the point contributes nothing toward the objective.
    pub fn value(&self, b: &RateBounds) -> Option<f64> {
        if !b.is_nonempty() {
            return None;
        }
        match *self {
            RateObjective::Weighted { w12, w13, w23 } => {
                // Vertices of {R13 ≤ a, R12 ≤ c, R13 + R12 ≤ s}.
                let (a, c, s) = (b.r13_max, b.r12_max, b.r13_plus_r12_max);
                let favor13 = w13 * a.min(s) + w12 * c.min(s - a.min(s));
                let favor12 = w12 * c.min(s) + w13 * a.min(s - c.min(s));
                Some(favor13.max(favor12) + w23 * b.r23_max)
            }
            RateObjective::R13AtR12 { target } => {
                if b.r12_max < target - FEASIBILITY_TOL || b.r13_plus_r12_max < target - FEASIBILITY_TOL {
                    return None;
                }
                let r12 = target.min(b.r12_max);
                Some(b.r13_max.min(b.r13_plus_r12_max - r12).max(0.0))
            }
        }
    }
}

/// Coordinates adjusted by [`refine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Knob {
    Rho,
    Gamma,
    Alpha1,
    Alpha2,
    RhoU1s,
    Beta,
    F,
}

impl Knob {
    pub const ALL: [Knob; 7] = [
        Knob::Rho,
        Knob::Gamma,
        Knob::Alpha1,
        Knob::Alpha2,
        Knob::RhoU1s,
        Knob::Beta,
        Knob::F,
    ];

    fn slot(self, p: &mut SchemeParams) -> &mut f64 {
        match self {
            Knob::Rho => &mut p.rho,
            Knob::Gamma => &mut p.gamma,
            Knob::Alpha1 => &mut p.alpha1,
            Knob::Alpha2 => &mut p.alpha2,
            Knob::RhoU1s => &mut p.rho_u1s,
            Knob::Beta => &mut p.beta,
            Knob::F => &mut p.f,
        }
    }

    fn bounds(self) -> (f64, f64) {
        match self {
            Knob::Gamma | Knob::Beta => (0.0, 1.0),
            Knob::Alpha1 | Knob::Alpha2 => (f64::NEG_INFINITY, f64::INFINITY),
            Knob::Rho | Knob::RhoU1s | Knob::F => (-1.0, 1.0),
        }
    }
}

const REFINE_STEP: f64 = 0.1;
const REFINE_MIN_STEP: f64 = 1e-6;
const REFINE_MAX_EVALS: usize = 20_000;

/// Parameters with the solved compression noise and the objective there.
fn score(power: &PowerConfig, params: &SchemeParams, objective: &RateObjective) -> Option<(SchemeParams, f64)> {
    params.validate().ok()?;
    let (params, _, bounds) = evaluate_with_optimal_nhat(power, params).ok()?;
    objective.value(&bounds).map(|v| (params, v))
}

/// Key for deterministic tie-breaking: the parameter vector in field order.
fn param_key(p: &SchemeParams) -> [f64; 9] {
    [
        p.rho, p.gamma, p.alpha1, p.alpha2, p.rho_u1s, p.rho_u2s, p.theta, p.beta, p.f,
    ]
}

fn lex_cmp(a: &SchemeParams, b: &SchemeParams) -> Ordering {
    param_key(a)
        .iter()
        .zip(param_key(b).iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Whether `(value, params)` beats the incumbent: larger value, then the
/// lexicographically smaller parameter vector.
fn better(value: f64, params: &SchemeParams, best: Option<&(SchemeParams, f64)>) -> bool {
    match best {
        None => true,
        Some((bp, bv)) => value > *bv || (value == *bv && lex_cmp(params, bp) == Ordering::Less),
    }
}

/// Coordinate search on every [`Knob`].
pub fn refine(power: &PowerConfig, start: &SchemeParams, objective: &RateObjective) -> SchemeParams {
    refine_knobs(power, start, objective, &Knob::ALL)
}

/// Deterministic coordinate search with shrinking steps over `knobs`, the
/// compression noise re-solved at every trial point. Returns `start` (with
/// its solved noise) unless a strictly better point is found.
pub fn refine_knobs(
    power: &PowerConfig,
    start: &SchemeParams,
    objective: &RateObjective,
    knobs: &[Knob],
) -> SchemeParams {
    let Some((mut best, mut best_value)) = score(power, start, objective) else {
        return *start;
    };
    let mut step = REFINE_STEP;
    let mut evals = 0;
    while step >= REFINE_MIN_STEP && evals < REFINE_MAX_EVALS {
        let mut pass_best: Option<(SchemeParams, f64)> = None;
        for &knob in knobs {
            let (lo, hi) = knob.bounds();
            for dir in [-1.0, 1.0] {
                let mut trial = best;
                let slot = knob.slot(&mut trial);
                let moved = (*slot + dir * step).clamp(lo, hi);
                if moved == *slot {
                    continue;
                }
                *slot = moved;
                evals += 1;
                if let Some((p, v)) = score(power, &trial, objective) {
                    if v > best_value && better(v, &p, pass_best.as_ref()) {
                        pass_best = Some((p, v));
                    }
                }
            }
        }
        match pass_best {
            Some((p, v)) => {
                best = p;
                best_value = v;
            }
            None => step *= 0.5,
        }
    }
    best
}

/// One point of a trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    /// The R12 target this point answers.
    pub target: f64,
    pub r12: f64,
    pub r13: f64,
    /// `r23_max` of the chosen parameters.
    pub r23: f64,
    pub params: SchemeParams,
    pub bounds: RateBounds,
}

/// Largest `R13` against `R12` at one relay power split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierCurve {
    pub theta: f64,
    pub points: Vec<FrontierPoint>,
    /// Targets with no admissible parameter point.
    pub omitted: Vec<f64>,
    /// Cell counts by status: nonempty, empty, infeasible, invalid.
    pub status_counts: [usize; 4],
}

impl FrontierCurve {
    /// Largest R13 on the curve.
    pub fn max_r13(&self) -> Option<f64> {
        self.points.iter().map(|p| p.r13).reduce(f64::max)
    }

    /// Largest R12 on the curve.
    pub fn max_r12(&self) -> Option<f64> {
        self.points.iter().map(|p| p.r12).reduce(f64::max)
    }

    /// R13 at a target, if that target has a point.
    pub fn r13_at(&self, target: f64) -> Option<f64> {
        self.points.iter().find(|p| p.target == target).map(|p| p.r13)
    }
}

/// Compact record of a nonempty cell.
#[derive(Debug, Clone, Copy)]
struct Summary {
    index: usize,
    bounds: RateBounds,
}

struct SweepDigest {
    nonempty: Vec<Summary>,
    status_counts: [usize; 4],
}

fn digest(power: &PowerConfig, grid: &GridSpec) -> Result<SweepDigest> {
    power.validate()?;
    let cells = grid.cell_count()?;
    let outcomes: Vec<(CellStatus, Option<RateBounds>)> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let cell = evaluate_cell(power, i, grid.cell(i));
            let status = cell.status();
            let bounds = (status == CellStatus::Nonempty).then(|| cell.outcome.ok()).flatten();
            (status, bounds)
        })
        .collect();
    let mut status_counts = [0; 4];
    let mut nonempty = Vec::new();
    for (index, (status, bounds)) in outcomes.into_iter().enumerate() {
        status_counts[status as usize] += 1;
        if let Some(bounds) = bounds {
            nonempty.push(Summary { index, bounds });
        }
    }
    Ok(SweepDigest {
        nonempty,
        status_counts,
    })
}

/// Best swept cell for `objective`, ties to the lexicographically smallest
/// parameters.
fn best_cell(grid: &GridSpec, digest: &SweepDigest, objective: &RateObjective) -> Option<(SchemeParams, f64)> {
    let mut best: Option<(SchemeParams, f64)> = None;
    for s in &digest.nonempty {
        if let Some(v) = objective.value(&s.bounds) {
            let p = grid.cell(s.index);
            if better(v, &p, best.as_ref()) {
                best = Some((p, v));
            }
        }
    }
    best
}

/// Best start among the swept optimum and the seeds, optionally refined.
fn optimize(
    power: &PowerConfig,
    candidates: impl IntoIterator<Item = SchemeParams>,
    objective: &RateObjective,
    refine_on: bool,
) -> Option<(SchemeParams, RateBounds)> {
    let mut best: Option<(SchemeParams, f64)> = None;
    for c in candidates {
        if let Some((p, v)) = score(power, &c, objective) {
            if better(v, &p, best.as_ref()) {
                best = Some((p, v));
            }
        }
    }
    let (mut params, _) = best?;
    if refine_on {
        params = refine(power, &params, objective);
    }
    let (params, _, bounds) = evaluate_with_optimal_nhat(power, &params).ok()?;
    Some((params, bounds))
}

fn frontier_point(target: f64, params: SchemeParams, bounds: RateBounds) -> FrontierPoint {
    let r12 = target.min(bounds.r12_max);
    FrontierPoint {
        target,
        r12,
        r13: bounds.r13_max.min(bounds.r13_plus_r12_max - r12).max(0.0),
        r23: bounds.r23_max,
        params,
        bounds,
    }
}

#[allow(clippy::too_many_arguments)]
fn curve_from_digest(
    power: &PowerConfig,
    theta: f64,
    grid: &GridSpec,
    digest: &SweepDigest,
    targets: &[f64],
    refine_on: bool,
    seeds: &[Option<SchemeParams>],
    extra: &[SchemeParams],
) -> FrontierCurve {
    let mut slots: Vec<Option<FrontierPoint>> = targets
        .iter()
        .enumerate()
        .map(|(k, &target)| {
            let objective = RateObjective::R13AtR12 { target };
            let swept = best_cell(grid, digest, &objective).map(|(p, _)| p);
            let seed = seeds.get(k).copied().flatten().map(|p| SchemeParams { theta, ..p });
            let candidates = swept.into_iter().chain(seed).chain(extra.iter().copied());
            optimize(power, candidates, &objective, refine_on)
                .map(|(p, b)| frontier_point(target, p, b))
        })
        .collect();
    // A point reaching (R12, R13) also reaches every smaller R12.
    for k in (0..slots.len().saturating_sub(1)).rev() {
        if let (Some(next), Some(cur)) = (slots[k + 1], slots[k]) {
            if next.r13 > cur.r13 {
                slots[k] = Some(FrontierPoint {
                    target: cur.target,
                    r12: cur.target,
                    ..next
                });
            }
        }
    }
    let mut points = Vec::new();
    let mut omitted = Vec::new();
    for (slot, &target) in slots.into_iter().zip(targets) {
        match slot {
            Some(p) => points.push(p),
            None => omitted.push(target),
        }
    }
    FrontierCurve {
        theta,
        points,
        omitted,
        status_counts: digest.status_counts,
    }
}

fn check_targets(targets: &[f64]) -> Result<()> {
    for w in targets.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "r12_targets",
                value: w[1],
                range: "strictly ascending",
            });
        }
    }
    if let Some(&t) = targets.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "r12_targets",
            value: t,
            range: "[0, inf)",
        });
    }
    Ok(())
}

/// Trade-off curve at relay split `theta` for ascending `R12` targets.
pub fn tradeoff_curve(
    power: &PowerConfig,
    theta: f64,
    grid: &GridSpec,
    targets: &[f64],
    refine_on: bool,
) -> Result<FrontierCurve> {
    check_targets(targets)?;
    let grid = grid.with_theta(theta);
    let digest = digest(power, &grid)?;
    Ok(curve_from_digest(power, theta, &grid, &digest, targets, refine_on, &[], &[]))
}

/// Curves for several relay splits on shared targets: `n_targets` evenly
/// spaced from 0 to the largest achievable `R12`.
///
/// Splits are processed from the largest down, each target seeded with the
/// parameters found at the previous split; a smaller split evaluated at the
/// same parameters never does worse, so the curves nest.
pub fn tradeoff_family(
    power: &PowerConfig,
    thetas: &[f64],
    grid: &GridSpec,
    n_targets: usize,
    refine_on: bool,
) -> Result<Vec<FrontierCurve>> {
    if thetas.is_empty() {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: f64::NAN,
            range: "at least one value",
        });
    }
    if n_targets == 0 {
        return Err(Error::InvalidParameter {
            name: "n_targets",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[b].total_cmp(&thetas[a]));

    let mut digests = Vec::with_capacity(thetas.len());
    for &i in &order {
        let g = grid.with_theta(thetas[i]);
        digests.push((g, digest(power, &g)?));
    }

    // Peak R12 at every split; its parameters also seed every target there.
    let peak_objective = RateObjective::Weighted {
        w12: 1.0,
        w13: 0.0,
        w23: 0.0,
    };
    let mut peak: f64 = 0.0;
    let mut peak_params = Vec::with_capacity(digests.len());
    for (g, d) in &digests {
        let swept = best_cell(g, d, &peak_objective).map(|(p, _)| p);
        let found = optimize(power, swept, &peak_objective, refine_on);
        if let Some((_, b)) = found {
            peak = peak.max(b.r12_max.min(b.r13_plus_r12_max));
        }
        peak_params.push(found.map(|(p, _)| p));
    }
    let targets: Vec<f64> = if n_targets == 1 {
        vec![0.0]
    } else {
        (0..n_targets)
            .map(|k| {
                if k + 1 == n_targets {
                    peak
                } else {
                    peak * k as f64 / (n_targets - 1) as f64
                }
            })
            .collect()
    };
    if n_targets > 1 && peak <= 0.0 {
        return Err(Error::ParameterInfeasible(
            "no swept point supports a positive R12".into(),
        ));
    }

    let mut curves: Vec<Option<FrontierCurve>> = vec![None; thetas.len()];
    let mut seeds: Vec<Option<SchemeParams>> = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let (g, d) = &digests[pos];
        let extra: Vec<SchemeParams> = peak_params[pos].into_iter().collect();
        let curve = curve_from_digest(power, thetas[i], g, d, &targets, refine_on, &seeds, &extra);
        seeds = targets
            .iter()
            .map(|&t| curve.points.iter().find(|p| p.target == t).map(|p| p.params))
            .collect();
        curves[i] = Some(curve);
    }
    Ok(curves.into_iter().map(|c| c.expect("every split visited")).collect())
}

/// The relay channel reduction (`γ = 0`, `θ = 0`): largest `R13` over the
/// grid with those axes pinned, then refined with them held fixed.
pub fn sdrc_scalar(power: &PowerConfig, grid: &GridSpec) -> Result<(f64, SchemeParams)> {
    let grid = GridSpec {
        gamma: Axis::fixed(0.0),
        theta: Axis::fixed(0.0),
        ..*grid
    };
    let digest = digest(power, &grid)?;
    let objective = RateObjective::R13AtR12 { target: 0.0 };
    let (start, _) = best_cell(&grid, &digest, &objective).ok_or_else(|| {
        Error::ParameterInfeasible("no grid cell yields a nonempty region".into())
    })?;
    let knobs = [Knob::Rho, Knob::Alpha1, Knob::Alpha2, Knob::RhoU1s, Knob::Beta, Knob::F];
    let params = refine_knobs(power, &start, &objective, &knobs);
    let (params, _, bounds) = evaluate_with_optimal_nhat(power, &params)?;
    let rate = objective.value(&bounds).unwrap_or(0.0);
    Ok((rate, params))
}
