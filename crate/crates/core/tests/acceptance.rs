//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

mod common;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sdrcpm::dm::reductions::Reduction;
use sdrcpm::dm::{build_joint, evaluate_theorem1, evaluate_theorem2, AlphabetSpec, CausalFactorization, StateCoupling};
use sdrcpm::frontier::{sdrc_scalar, tradeoff_family, FrontierCurve, GridSpec};
use sdrcpm::region::FEASIBILITY_TOL;
use sdrcpm::{
    assemble_covariance, aux_rate_feasible, mi_values_gaussian, region_contains, PowerConfig, RateBounds,
    SchemeParams, Var, VarSet,
};

use common::{boundary_margin, bounds_close, baseline_power, random_mi, random_params, random_point, random_power};

const NESTING_TOL: f64 = 1e-6;
const RUNTIME_LIMIT: Duration = Duration::from_secs(600);
const ENDPOINT_TOL: f64 = 1e-2;
const MI_TOL: f64 = 1e-9;
const AWGN_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-9;
const FLOOR_TOL: f64 = 1e-6;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn three_split_curves() -> (Vec<FrontierCurve>, Duration) {
    let start = Instant::now();
    let curves = tradeoff_family(&baseline_power(), &[0.0, 0.3, 0.6], &GridSpec::default(), 21, true)
        .expect("three-split family");
    (curves, start.elapsed())
}

fn tradeoff_nesting(report: &mut Report, curves: &[FrontierCurve], elapsed: Duration) {
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut shared = 0;
    for pair in curves.windows(2) {
        for p in &pair[1].points {
            if let Some(lower_theta) = pair[0].r13_at(p.target) {
                worst = worst.max(p.r13 - lower_theta);
                shared += 1;
            }
        }
    }
    let peaks: Vec<f64> = curves.iter().map(|c| c.max_r13().unwrap_or(f64::NAN)).collect();
    let decreasing = peaks.windows(2).all(|w| w[1] < w[0]);
    let pass = shared > 0 && worst <= NESTING_TOL && decreasing && elapsed <= RUNTIME_LIMIT;
    report.line(
        "tradeoff-nesting",
        pass,
        format!(
            "theta 0/0.3/0.6, {shared} shared targets, worst excess {worst:.2e} (tol {NESTING_TOL:.0e}), \
             max R13 {:.4}/{:.4}/{:.4}, {:.1}s (limit {}s)",
            peaks[0],
            peaks[1],
            peaks[2],
            elapsed.as_secs_f64(),
            RUNTIME_LIMIT.as_secs()
        ),
    );
}

fn costa_endpoint(report: &mut Report, curves: &[FrontierCurve]) {
    let power = baseline_power();
    let costa = 0.5 * (1.0 + power.p1 / power.n2).log2();
    let endpoint = curves[0]
        .points
        .iter()
        .filter(|p| p.r13.abs() <= FEASIBILITY_TOL)
        .map(|p| p.r12)
        .fold(f64::NAN, f64::max);
    let gap = (endpoint - costa).abs();
    report.line(
        "costa-endpoint",
        gap <= ENDPOINT_TOL,
        format!("max R12 at R13=0, theta=0: {endpoint:.6} vs {costa:.6} (gap {gap:.2e}, tol {ENDPOINT_TOL:.0e})"),
    );
}

fn fm_consistency(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0);
    let (mut checked, mut inside, mut disagreements) = (0, 0, 0);
    for _ in 0..200 {
        let mi = random_mi(&mut rng);
        let bounds = RateBounds::from_mi(&mi);
        for _ in 0..25 {
            let point = random_point(&mut rng, 1.2);
            if boundary_margin(&mi, &point) <= 2.0 * FEASIBILITY_TOL {
                continue;
            }
            checked += 1;
            inside += usize::from(region_contains(&bounds, &point));
            if aux_rate_feasible(&mi, &point, FEASIBILITY_TOL) != region_contains(&bounds, &point) {
                disagreements += 1;
            }
        }
    }
    report.line(
        "fourier-motzkin",
        disagreements == 0 && inside > 0 && inside < checked,
        format!("200 instances, {checked} points beyond 2*tol ({inside} inside), {disagreements} disagreements"),
    );
}

fn gaussian_mi(report: &mut Report) {
    use Var::*;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6A);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let power = random_power(&mut rng);
        let params = random_params(&mut rng);
        let j = assemble_covariance(&power, &params).expect("valid draw");
        let mi = |a: VarSet, b: VarSet, c: VarSet| j.conditional_mi_raw(a, b, c).expect("conditioned");
        let chain = mi(T1.into(), Y3 | Yhat2, V.into())
            - mi(T1.into(), Y3.into(), V.into())
            - mi(T1.into(), Yhat2.into(), V | Y3);
        let symmetry = mi(T2.into(), Y2.into(), V | X2) - mi(Y2.into(), T2.into(), V | X2);
        let k = 7.5;
        let scaled = SchemeParams { nhat: params.nhat * k, ..params };
        let a = mi_values_gaussian(&power, &params).expect("valid draw");
        let b = mi_values_gaussian(&power.scaled(k), &scaled).expect("valid draw");
        let scale = a
            .as_array()
            .iter()
            .zip(b.as_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let negative = a.as_array().iter().map(|x| (-x).max(0.0)).fold(0.0, f64::max);
        worst = worst.max(chain.abs()).max(symmetry.abs()).max(scale).max(negative);
    }
    let mut awgn_worst: f64 = 0.0;
    for _ in 0..20 {
        let p = 10f64.powf(rand::Rng::random_range(&mut rng, -1.0..2.0));
        let n = 10f64.powf(rand::Rng::random_range(&mut rng, -1.0..2.0));
        let power = PowerConfig::new(p, 1.0, n, 1.0, 1.0).expect("positive");
        let j = assemble_covariance(&power, &SchemeParams::default()).expect("default params");
        let mi = j.conditional_mi(X1.into(), Y2.into(), S.into()).expect("conditioned");
        awgn_worst = awgn_worst.max((mi - 0.5 * (1.0 + p / n).log2()).abs());
    }
    report.line(
        "gaussian-mi",
        worst <= MI_TOL && awgn_worst <= AWGN_TOL,
        format!(
            "100 draws worst property error {worst:.2e} (tol {MI_TOL:.0e}); 20 AWGN worst {awgn_worst:.2e} (tol {AWGN_TOL:.0e})"
        ),
    );
}

fn causal_vs_noncausal(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA);
    let mut worst: f64 = 0.0;
    let mut verdicts_match = true;
    for _ in 0..50 {
        let fact = CausalFactorization::random(&AlphabetSpec::uniform(2), StateCoupling::Free, &mut rng)
            .expect("binary alphabets");
        let causal = evaluate_theorem2(&fact).expect("valid");
        let lifted = evaluate_theorem1(&fact.lift().expect("valid")).expect("valid");
        worst = worst
            .max((causal.r13_max - lifted.r13_max).abs())
            .max((causal.r12_max - lifted.r12_max).abs())
            .max((causal.r13_plus_r12_max - lifted.r13_plus_r12_max).abs())
            .max((causal.r23_max - lifted.r23_max).abs());
        verdicts_match &= causal.feasible == lifted.feasible;
    }
    report.line(
        "causal-vs-noncausal",
        worst <= IDENTITY_TOL && verdicts_match,
        format!("50 binary instances, worst bound gap {worst:.2e} (tol {IDENTITY_TOL:.0e}), feasibility verdicts equal: {verdicts_match}"),
    );
}

fn reductions(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2E);
    let mut mismatches = Vec::new();
    let mut instances = 0;
    for r in Reduction::all() {
        for n in [2, 3] {
            for _ in 0..5 {
                let fact = r.random_instance(n, &mut rng).expect("reduced alphabets");
                let general = evaluate_theorem1(&fact).expect("valid");
                let reduced = r.reduced_bounds(&build_joint(&fact).expect("valid"));
                instances += 1;
                if !bounds_close(&general, &reduced, IDENTITY_TOL) {
                    mismatches.push(format!("{r:?}"));
                }
            }
        }
    }
    report.line(
        "reductions",
        mismatches.is_empty(),
        format!("7 reductions, {instances} instances, mismatches: {mismatches:?} (tol {IDENTITY_TOL:.0e})"),
    );
}

fn sdrc_floor(report: &mut Report) {
    let power = baseline_power();
    let floor = 0.5 * (1.0 + power.p1 / power.n3).log2();
    let (rate, _) = sdrc_scalar(&power, &GridSpec::default()).expect("sweep");
    report.line(
        "sdrc-floor",
        rate >= floor - FLOOR_TOL,
        format!("gamma=theta=0 rate {rate:.6} vs floor {floor:.6} (tol {FLOOR_TOL:.0e})"),
    );
}

fn main() {
    let mut report = Report { failures: 0 };
    let (curves, elapsed) = three_split_curves();
    tradeoff_nesting(&mut report, &curves, elapsed);
    costa_endpoint(&mut report, &curves);
    fm_consistency(&mut report);
    gaussian_mi(&mut report);
    causal_vs_noncausal(&mut report);
    reductions(&mut report);
    sdrc_floor(&mut report);
    if report.failures > 0 {
        println!("{} acceptance criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
