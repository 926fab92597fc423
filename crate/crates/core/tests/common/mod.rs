#![allow(dead_code)]

use rand::Rng;
use sdrcpm::dm::{AlphabetSpec, Cpt, DmFactorization, DmVar};
use sdrcpm::{MiValues, PowerConfig, RateBounds, RatePoint, SchemeParams};

pub fn baseline_power() -> PowerConfig {
    PowerConfig::new(10.0, 10f64.powf(1.5), 1.0, 10.0, 10.0).unwrap()
}

pub fn random_power<R: Rng>(rng: &mut R) -> PowerConfig {
    let mut draw = || 10f64.powf(rng.random_range(-1.0..2.0));
    PowerConfig::new(draw(), draw(), draw(), draw(), draw()).unwrap()
}

/// Scheme parameters with a realizable `(S, U1, U2)` correlation block.
pub fn random_params<R: Rng>(rng: &mut R) -> SchemeParams {
    loop {
        let p = SchemeParams {
            rho: rng.random_range(-0.95..0.95),
            gamma: rng.random_range(0.0..1.0),
            alpha1: rng.random_range(-1.5..1.5),
            alpha2: rng.random_range(-1.5..1.5),
            rho_u1s: rng.random_range(-0.95..0.95),
            rho_u2s: 0.0,
            theta: rng.random_range(0.0..0.95),
            beta: rng.random_range(0.0..1.0),
            f: rng.random_range(-1.0..1.0),
            nhat: 10f64.powf(rng.random_range(-1.0..1.0)),
        };
        if p.validate().is_ok() {
            return p;
        }
    }
}

/// Information terms consistent with a compression residual that equals
/// `I(Ŷ2; sources | relay) − I(Ŷ2; Y3 | relay)`.
pub fn random_mi<R: Rng>(rng: &mut R) -> MiValues {
    let mut u = || rng.random_range(0.0..1.5);
    let i_yhat_y3 = u();
    let i_yhat_cond_y3 = u();
    MiValues {
        i_t1_out: u(),
        i_t1_s: u(),
        i_t2_relay: u(),
        i_t2_s: u(),
        i_t1_t2_s: u(),
        i_k2_y3: u(),
        i_k2_s2: u(),
        i_q2_y3: u(),
        i_q2_s2: u(),
        i_yhat_src: i_yhat_y3 + i_yhat_cond_y3,
        i_yhat_y3,
        i_yhat_cond_y3,
    }
}

/// Smallest distance of `point` from any face of the region of `mi`, on
/// the unclamped right-hand sides and the compression constraint.
pub fn boundary_margin(mi: &MiValues, point: &RatePoint) -> f64 {
    let r13 = mi.i_t1_out - mi.i_t1_s;
    let r12 = mi.i_t2_relay - mi.i_t2_s;
    let sum = r13 + r12 - mi.i_t1_t2_s;
    let r23 = mi.i_k2_y3 - mi.i_k2_s2;
    let (lhs, rhs) = mi.compression_sides();
    [
        r13 - point.r13,
        r12 - point.r12,
        sum - point.r13 - point.r12,
        r23 - point.r23,
        rhs - lhs,
        r13,
        r12,
        sum,
        r23,
    ]
    .iter()
    .map(|x| x.abs())
    .fold(f64::INFINITY, f64::min)
}

pub fn random_point<R: Rng>(rng: &mut R, scale: f64) -> RatePoint {
    RatePoint::new(
        rng.random_range(0.0..scale),
        rng.random_range(0.0..scale),
        rng.random_range(0.0..scale),
    )
    .unwrap()
}

pub fn bounds_close(a: &RateBounds, b: &RateBounds, tol: f64) -> bool {
    (a.r13_max - b.r13_max).abs() <= tol
        && (a.r12_max - b.r12_max).abs() <= tol
        && (a.r13_plus_r12_max - b.r13_plus_r12_max).abs() <= tol
        && (a.r23_max - b.r23_max).abs() <= tol
        && a.feasible == b.feasible
        && a.clamped == b.clamped
}

/// The kernel with the symbols of `var` renamed by `perm`.
pub fn relabel_cpt(cpt: &Cpt, a: &AlphabetSpec, var: DmVar, perm: &[usize]) -> Cpt {
    let vars: Vec<DmVar> = cpt.given().iter().chain(cpt.out()).copied().collect();
    let radix: Vec<usize> = vars.iter().map(|&v| a.size(v)).collect();
    let mut table = vec![0.0; cpt.table().len()];
    for (idx, &p) in cpt.table().iter().enumerate() {
        let mut digits = vec![0; vars.len()];
        let mut rest = idx;
        for k in (0..vars.len()).rev() {
            digits[k] = rest % radix[k];
            rest /= radix[k];
        }
        for (k, &v) in vars.iter().enumerate() {
            if v == var {
                digits[k] = perm[digits[k]];
            }
        }
        let new_idx = digits.iter().zip(&radix).fold(0, |i, (d, r)| i * r + d);
        table[new_idx] = p;
    }
    Cpt::new(cpt.name(), cpt.given(), cpt.out(), table, a).unwrap()
}

pub fn relabel(fact: &DmFactorization, var: DmVar, perm: &[usize]) -> DmFactorization {
    let a = &fact.alphabet;
    let r = |c: &Cpt| relabel_cpt(c, a, var, perm);
    DmFactorization {
        alphabet: *a,
        state: r(&fact.state),
        k2: r(&fact.k2),
        q2: r(&fact.q2),
        x2: r(&fact.x2),
        t: r(&fact.t),
        x1: r(&fact.x1),
        channel: r(&fact.channel),
        yhat2: r(&fact.yhat2),
    }
}
