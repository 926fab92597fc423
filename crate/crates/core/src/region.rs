//! Rate bounds of the non-causal compress-and-forward region and their
//! Gaussian instantiation for a source that alone knows the state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fm::LinearSystem;
use crate::gauss::{assemble_covariance, GaussianJoint, PowerConfig, SchemeParams, Var, VarSet};

/// Slack allowed on the compression constraint and on boundary comparisons.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Right-hand sides more negative than this mark the region as empty.
pub const CLAMP_TOL: f64 = 1e-9;

/// Mutual information terms entering the rate bounds, in bits.
///
/// Names follow the general region: `K2`, `Q2` are the relay's private and
/// compression-index codewords, `S1`, `S2` the state knowledge at source and
/// relay.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MiValues {
    /// `I(T1; Ŷ2, Y3 | K2, Q2)`
    pub i_t1_out: f64,
    /// `I(T1; S1)`
    pub i_t1_s: f64,
    /// `I(T2; Y2, S2 | K2, Q2)`
    pub i_t2_relay: f64,
    /// `I(T2; S1)`
    pub i_t2_s: f64,
    /// `I(T1; T2 | S1)`
    pub i_t1_t2_s: f64,
    /// `I(K2; Y3)`
    pub i_k2_y3: f64,
    /// `I(K2; S2)`
    pub i_k2_s2: f64,
    /// `I(Q2; Y3 | K2)`
    pub i_q2_y3: f64,
    /// `I(Q2; S2 | K2)`
    pub i_q2_s2: f64,
    /// `I(Ŷ2; Y2, S2, T2 | K2, Q2)`
    pub i_yhat_src: f64,
    /// `I(Ŷ2; Y3 | Q2, K2)`
    pub i_yhat_y3: f64,
    /// `I(Ŷ2; Y2, S2, T2 | K2, Q2, Y3)`
    pub i_yhat_cond_y3: f64,
}

impl MiValues {
    pub fn as_array(&self) -> [f64; 12] {
        [
            self.i_t1_out,
            self.i_t1_s,
            self.i_t2_relay,
            self.i_t2_s,
            self.i_t1_t2_s,
            self.i_k2_y3,
            self.i_k2_s2,
            self.i_q2_y3,
            self.i_q2_s2,
            self.i_yhat_src,
            self.i_yhat_y3,
            self.i_yhat_cond_y3,
        ]
    }

    /// Nonnegativity of every term, and the compression residual not
    /// exceeding its unconditioned counterpart.
    pub fn check(&self) -> Result<()> {
        if self.as_array().iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NumericalConditioning(format!(
                "mutual information terms must be finite and nonnegative: {self:?}"
            )));
        }
        if self.i_yhat_cond_y3 > self.i_yhat_src + FEASIBILITY_TOL {
            return Err(Error::NumericalConditioning(format!(
                "compression residual {} exceeds I(Yhat2; Y2,S2,T2 | K2,Q2) = {}",
                self.i_yhat_cond_y3, self.i_yhat_src
            )));
        }
        Ok(())
    }

    /// Left- and right-hand side of the compression constraint.
    pub fn compression_sides(&self) -> (f64, f64) {
        (self.i_yhat_cond_y3, self.i_q2_y3 - self.i_q2_s2)
    }
}

/// Largest rates allowed by one choice of distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub r13_max: f64,
    pub r12_max: f64,
    pub r13_plus_r12_max: f64,
    pub r23_max: f64,
    /// The compression constraint holds.
    pub feasible: bool,
    /// Some right-hand side was negative and has been clamped to zero; the
    /// region of this distribution is then empty.
    pub clamped: bool,
}

impl RateBounds {
    /// Clamps raw right-hand sides and records the compression verdict.
    pub fn from_raw(r13: f64, r12: f64, sum: f64, r23: f64, feasible: bool) -> Self {
        let clamped = [r13, r12, sum, r23].iter().any(|&x| x < -CLAMP_TOL);
        RateBounds {
            r13_max: r13.max(0.0),
            r12_max: r12.max(0.0),
            r13_plus_r12_max: sum.max(0.0),
            r23_max: r23.max(0.0),
            feasible,
            clamped,
        }
    }

    /// Bounds of the non-causal region for the given information terms.
    pub fn from_mi(mi: &MiValues) -> Self {
        let (lhs, rhs) = mi.compression_sides();
        Self::from_raw(
            mi.i_t1_out - mi.i_t1_s,
            mi.i_t2_relay - mi.i_t2_s,
            mi.i_t1_out + mi.i_t2_relay - mi.i_t1_s - mi.i_t2_s - mi.i_t1_t2_s,
            mi.i_k2_y3 - mi.i_k2_s2,
            lhs <= rhs + FEASIBILITY_TOL,
        )
    }

    /// The distribution contributes at least the origin.
    pub fn is_nonempty(&self) -> bool {
        self.feasible && !self.clamped
    }
}

/// A rate triple in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePoint {
    pub r12: f64,
    pub r23: f64,
    pub r13: f64,
}

impl RatePoint {
    pub fn new(r12: f64, r23: f64, r13: f64) -> Result<Self> {
        for (name, value) in [("r12", r12), ("r23", r23), ("r13", r13)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    range: "[0, inf)",
                });
            }
        }
        Ok(RatePoint { r12, r23, r13 })
    }
}

/// Information terms for the Gaussian channel with the state known only at
/// the source: `S1 = S`, `S2` empty, `K2 = V`, `Q2 = X2`.
pub fn mi_values_gaussian(power: &PowerConfig, params: &SchemeParams) -> Result<MiValues> {
    let joint = assemble_covariance(power, params)?;
    mi_values_from_joint(&joint)
}

pub(crate) fn mi_values_from_joint(joint: &GaussianJoint) -> Result<MiValues> {
    use Var::*;
    let none = VarSet::EMPTY;
    let relay = V | X2;
    let mi = |a: VarSet, b: VarSet, c: VarSet| joint.conditional_mi(a, b, c);
    let values = MiValues {
        i_t1_out: mi(T1.into(), Yhat2 | Y3, relay)?,
        i_t1_s: mi(T1.into(), S.into(), none)?,
        i_t2_relay: mi(T2.into(), Y2.into(), relay)?,
        i_t2_s: mi(T2.into(), S.into(), none)?,
        i_t1_t2_s: mi(T1.into(), T2.into(), S.into())?,
        i_k2_y3: mi(V.into(), Y3.into(), none)?,
        i_k2_s2: 0.0,
        i_q2_y3: mi(X2.into(), Y3.into(), V.into())?,
        i_q2_s2: 0.0,
        i_yhat_src: mi(Yhat2.into(), Y2 | T2, relay)?,
        i_yhat_y3: mi(Yhat2.into(), Y3.into(), relay)?,
        i_yhat_cond_y3: compression_residual(joint)?,
    };
    values.check()?;
    Ok(values)
}

fn compression_residual(joint: &GaussianJoint) -> Result<f64> {
    use Var::*;
    joint.conditional_mi(Yhat2.into(), Y2 | T2, V | X2 | Y3)
}

/// Rate bounds of one Gaussian parameter point.
pub fn evaluate_gaussian_region(power: &PowerConfig, params: &SchemeParams) -> Result<RateBounds> {
    Ok(RateBounds::from_mi(&mi_values_gaussian(power, params)?))
}

/// Relative accuracy of [`solve_nhat`].
pub const NHAT_REL_TOL: f64 = 1e-6;

/// Returned by [`solve_nhat`] when the relay compresses nothing.
pub const NHAT_DEFAULT: f64 = 1.0;

/// Smallest compression noise that meets the compression constraint.
///
/// `params.nhat` is ignored. The residual `I(Ŷ2; Y2, T2 | V, X2, Y3)` falls
/// monotonically as the noise grows while the right-hand side
/// `I(X2; Y3 | V)` does not depend on it, so the boundary is bracketed and
/// bisected over `log N̂`. The returned value satisfies the constraint.
pub fn solve_nhat(power: &PowerConfig, params: &SchemeParams) -> Result<f64> {
    let mut params = *params;
    if params.beta == 0.0 && params.f == 0.0 {
        return Ok(NHAT_DEFAULT);
    }
    params.nhat = power.p1 + power.q + power.n2;
    let joint = assemble_covariance(power, &params)?;
    let rhs = joint.conditional_mi(Var::X2.into(), Var::Y3.into(), Var::V.into())?;
    if rhs <= FEASIBILITY_TOL {
        return Err(Error::ConstraintInfeasible { rhs });
    }
    let lhs = |nhat: f64| compression_residual(&joint.with_nhat(nhat));
    let meets = |nhat: f64| -> Result<bool> { Ok(lhs(nhat)? <= rhs) };

    let start = params.nhat;
    let mut hi = start;
    let mut lo = start;
    if meets(hi)? {
        let floor = start * 1e-15;
        loop {
            lo /= 4.0;
            if lo < floor {
                return Ok(floor);
            }
            if !meets(lo)? {
                break;
            }
            hi = lo;
        }
    } else {
        let ceiling = start * 1e30;
        loop {
            hi *= 4.0;
            if hi > ceiling {
                return Err(Error::NumericalConditioning(format!(
                    "no compression noise below {ceiling:.3e} meets the constraint"
                )));
            }
            if meets(hi)? {
                break;
            }
            lo = hi;
        }
    }
    while hi / lo > 1.0 + 0.1 * NHAT_REL_TOL {
        let mid = (lo * hi).sqrt();
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Parameters with `nhat` replaced by [`solve_nhat`], and their bounds.
pub fn evaluate_with_optimal_nhat(
    power: &PowerConfig,
    params: &SchemeParams,
) -> Result<(SchemeParams, MiValues, RateBounds)> {
    let mut params = *params;
    params.nhat = solve_nhat(power, &params)?;
    let mi = mi_values_gaussian(power, &params)?;
    Ok((params, mi, RateBounds::from_mi(&mi)))
}

// Auxiliary rate unknowns of the coding scheme.
const R13P: usize = 0;
const R12P: usize = 1;
const R23P: usize = 2;
const R2: usize = 3;
const R2P: usize = 4;
const R2HAT: usize = 5;

/// The covering, packing and list-decoding conditions of the coding scheme,
/// as a linear system over the auxiliary rates `(R13', R12', R23', R2, R2',
/// R̂2)` for a fixed rate point, with every condition relaxed by `tol`.
pub fn aux_rate_system(mi: &MiValues, point: &RatePoint, tol: f64) -> LinearSystem {
    let mut sys = LinearSystem::new(6);
    // Covering at the source and relay encoders.
    sys.ge(&[(R13P, 1.0)], mi.i_t1_s - tol)
        .ge(&[(R12P, 1.0)], mi.i_t2_s - tol)
        .ge(
            &[(R13P, 1.0), (R12P, 1.0)],
            mi.i_t1_s + mi.i_t2_s + mi.i_t1_t2_s - tol,
        )
        .ge(&[(R23P, 1.0)], mi.i_k2_s2 - tol)
        .ge(&[(R2P, 1.0)], mi.i_q2_s2 - tol);
    // Decoding at the relay, Wyner-Ziv covering of the compression index.
    sys.le(&[(R12P, 1.0)], mi.i_t2_relay - point.r12 + tol)
        .ge(&[(R2HAT, 1.0)], mi.i_yhat_src - tol);
    // Decoding at the destination.
    sys.le(&[(R23P, 1.0)], mi.i_k2_y3 - point.r23 + tol)
        .le(&[(R2, 1.0), (R2P, 1.0)], mi.i_q2_y3 + tol)
        .le(&[(R2HAT, 1.0), (R2, -1.0)], mi.i_yhat_y3 + tol)
        .le(&[(R13P, 1.0)], mi.i_t1_out - point.r13 + tol);
    for v in 0..6 {
        sys.ge(&[(v, 1.0)], 0.0);
    }
    sys
}

/// Whether auxiliary rates exist that make `point` achievable by the coding
/// scheme behind the region, each condition relaxed by `tol`.
pub fn aux_rate_feasible(mi: &MiValues, point: &RatePoint, tol: f64) -> bool {
    aux_rate_system(mi, point, tol).is_feasible()
}

/// Membership of `point` in the (closed) region described by `bounds`.
pub fn region_contains(bounds: &RateBounds, point: &RatePoint) -> bool {
    bounds.is_nonempty()
        && point.r12 >= 0.0
        && point.r13 >= 0.0
        && point.r23 >= 0.0
        && point.r13 <= bounds.r13_max
        && point.r12 <= bounds.r12_max
        && point.r13 + point.r12 <= bounds.r13_plus_r12_max
        && point.r23 <= bounds.r23_max
}
