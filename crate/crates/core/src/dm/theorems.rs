use super::{build_joint, pmf_conditional_mi, CausalFactorization, DmFactorization, DmSet, JointPmf};
use crate::error::Result;
use crate::region::{MiValues, RateBounds, FEASIBILITY_TOL};

use super::DmVar::*;

/// Coordinatewise slack of [`causal_subset_check`].
pub const SUBSET_TOL: f64 = 1e-9;

/// Every information term of the non-causal region, with the relay's state
/// knowledge `S2` treated as part of its channel output.
pub fn mi_values_dm(joint: &JointPmf) -> Result<MiValues> {
    let mi = |a: DmSet, b: DmSet, c: DmSet| pmf_conditional_mi(joint, a, b, c);
    let none = DmSet::EMPTY;
    let relay = K2 | Q2;
    let values = MiValues {
        i_t1_out: mi(T1.into(), Yhat2 | Y3, relay),
        i_t1_s: mi(T1.into(), S1.into(), none),
        i_t2_relay: mi(T2.into(), Y2 | S2, relay),
        i_t2_s: mi(T2.into(), S1.into(), none),
        i_t1_t2_s: mi(T1.into(), T2.into(), S1.into()),
        i_k2_y3: mi(K2.into(), Y3.into(), none),
        i_k2_s2: mi(K2.into(), S2.into(), none),
        i_q2_y3: mi(Q2.into(), Y3.into(), K2.into()),
        i_q2_s2: mi(Q2.into(), S2.into(), K2.into()),
        i_yhat_src: mi(Yhat2.into(), Y2 | S2 | T2, relay),
        i_yhat_y3: mi(Yhat2.into(), Y3.into(), relay),
        i_yhat_cond_y3: mi(Yhat2.into(), Y2 | S2 | T2, relay | Y3),
    };
    values.check()?;
    Ok(values)
}

/// Rate bounds of the non-causal region for one factorized distribution.
pub fn evaluate_theorem1(fact: &DmFactorization) -> Result<RateBounds> {
    let joint = build_joint(fact)?;
    Ok(RateBounds::from_mi(&mi_values_dm(&joint)?))
}

/// Rate bounds of the causal region read off a joint: the non-causal
/// expressions without the state-subtraction terms, and with `I(T1; T2)`
/// replacing `I(T1; T2 | S1)`.
pub fn theorem2_bounds(joint: &JointPmf) -> RateBounds {
    let mi = |a: DmSet, b: DmSet, c: DmSet| pmf_conditional_mi(joint, a, b, c);
    let none = DmSet::EMPTY;
    let relay = K2 | Q2;
    let r13 = mi(T1.into(), Yhat2 | Y3, relay);
    let r12 = mi(T2.into(), Y2 | S2, relay);
    let lhs = mi(Yhat2.into(), Y2 | S2 | T2, relay | Y3);
    let rhs = mi(Q2.into(), Y3.into(), K2.into());
    RateBounds::from_raw(
        r13,
        r12,
        r13 + r12 - mi(T1.into(), T2.into(), none),
        mi(K2.into(), Y3.into(), none),
        lhs <= rhs + FEASIBILITY_TOL,
    )
}

/// Rate bounds of the causal region for one distribution.
pub fn evaluate_theorem2(fact: &CausalFactorization) -> Result<RateBounds> {
    Ok(theorem2_bounds(&build_joint(fact)?))
}

/// Whether the causal bounds are dominated by the non-causal bounds of the
/// same distribution written as a non-causal chain.
pub fn causal_subset_check(fact: &CausalFactorization) -> bool {
    let bounds = || -> Result<(RateBounds, RateBounds)> {
        Ok((evaluate_theorem2(fact)?, evaluate_theorem1(&fact.lift()?)?))
    };
    match bounds() {
        Ok((causal, lifted)) => {
            let pairs = [
                (causal.r13_max, lifted.r13_max),
                (causal.r12_max, lifted.r12_max),
                (causal.r13_plus_r12_max, lifted.r13_plus_r12_max),
                (causal.r23_max, lifted.r23_max),
            ];
            pairs.iter().all(|(c, l)| *c <= l + SUBSET_TOL)
                && (lifted.feasible || !causal.feasible)
        }
        Err(_) => false,
    }
}
