//! Special cases of the non-causal region obtained by removing variables
//! (alphabet size one) or tying the state knowledge to the state itself.
//!
//! Each [`Reduction`] carries its own closed set of information expressions,
//! written in terms of the channel state `S` and only the variables that
//! survive the reduction. Comparing them with the general evaluation on the
//! same joint checks the general code path against hand-reduced formulas.

use rand::Rng;

use super::{pmf_conditional_mi, AlphabetSpec, DmFactorization, DmSet, DmVar, JointPmf, StateCoupling};
use crate::error::Result;
use crate::region::{RateBounds, FEASIBILITY_TOL};

use DmVar::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reduction {
    /// No state anywhere: the relay channel with private messages.
    StateIndependent,
    /// No relay: a broadcast channel with state known at the source.
    NoRelaying,
    /// No private relay message and no source-to-relay message, state known
    /// at the source: the state-dependent relay channel.
    SdRcSourceCsi,
    /// As [`Reduction::SdRcSourceCsi`] with the state known at the relay.
    SdRcRelayCsi,
    /// Perfect state knowledge at the source only.
    InformedSource,
    /// Perfect state knowledge at the relay only.
    InformedRelay,
    /// Perfect state knowledge at both transmitters.
    InformedBoth,
}

impl Reduction {
    pub fn all() -> [Reduction; 7] {
        [
            Reduction::StateIndependent,
            Reduction::NoRelaying,
            Reduction::SdRcSourceCsi,
            Reduction::SdRcRelayCsi,
            Reduction::InformedSource,
            Reduction::InformedRelay,
            Reduction::InformedBoth,
        ]
    }

    /// Every variable at `n` symbols except those the reduction removes.
    pub fn alphabet(self, n: usize) -> AlphabetSpec {
        let mut a = AlphabetSpec::uniform(n);
        let removed: &[DmVar] = match self {
            Reduction::StateIndependent => &[S, S1, S2],
            Reduction::NoRelaying => &[S2, K2, Q2, X2, Yhat2],
            Reduction::SdRcSourceCsi => &[S2, T2, K2],
            Reduction::SdRcRelayCsi => &[S1, T2, K2],
            Reduction::InformedSource => &[S2],
            Reduction::InformedRelay => &[S1],
            Reduction::InformedBoth => &[],
        };
        for &v in removed {
            a.set(v, 1);
        }
        a
    }

    pub fn coupling(self) -> StateCoupling {
        match self {
            Reduction::StateIndependent => StateCoupling::Free,
            Reduction::NoRelaying | Reduction::SdRcSourceCsi | Reduction::InformedSource => {
                StateCoupling::S1EqualsS
            }
            Reduction::SdRcRelayCsi | Reduction::InformedRelay => StateCoupling::S2EqualsS,
            Reduction::InformedBoth => StateCoupling::BothEqualS,
        }
    }

    /// A random distribution on the reduced alphabets.
    pub fn random_instance<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<DmFactorization> {
        DmFactorization::random(&self.alphabet(n), self.coupling(), rng)
    }

    /// The hand-reduced bounds, valid on joints built from this reduction's
    /// alphabets and coupling.
    pub fn reduced_bounds(self, joint: &JointPmf) -> RateBounds {
        let mi = |a: DmSet, b: DmSet, c: DmSet| pmf_conditional_mi(joint, a, b, c);
        let none = DmSet::EMPTY;
        let (r13, r12, overlap, r23, lhs, rhs) = match self {
            Reduction::StateIndependent => (
                mi(T1.into(), Yhat2 | Y3, K2 | Q2),
                mi(T2.into(), Y2.into(), K2 | Q2),
                mi(T1.into(), T2.into(), none),
                mi(K2.into(), Y3.into(), none),
                mi(Yhat2.into(), Y2 | T2, K2 | Q2 | Y3),
                mi(Q2.into(), Y3.into(), K2.into()),
            ),
            Reduction::NoRelaying => (
                mi(T1.into(), Y3.into(), none) - mi(T1.into(), S.into(), none),
                mi(T2.into(), Y2.into(), none) - mi(T2.into(), S.into(), none),
                mi(T1.into(), T2.into(), S.into()),
                0.0,
                0.0,
                0.0,
            ),
            Reduction::SdRcSourceCsi => (
                mi(T1.into(), Yhat2 | Y3, Q2.into()) - mi(T1.into(), S.into(), none),
                0.0,
                0.0,
                0.0,
                mi(Yhat2.into(), Y2.into(), Q2 | Y3),
                mi(Q2.into(), Y3.into(), none),
            ),
            Reduction::SdRcRelayCsi => (
                mi(T1.into(), Yhat2 | Y3, Q2.into()),
                0.0,
                0.0,
                0.0,
                mi(Yhat2.into(), Y2 | S, Q2 | Y3),
                mi(Q2.into(), Y3.into(), none) - mi(Q2.into(), S.into(), none),
            ),
            Reduction::InformedSource => (
                mi(T1.into(), Yhat2 | Y3, K2 | Q2) - mi(T1.into(), S.into(), none),
                mi(T2.into(), Y2.into(), K2 | Q2) - mi(T2.into(), S.into(), none),
                mi(T1.into(), T2.into(), S.into()),
                mi(K2.into(), Y3.into(), none),
                mi(Yhat2.into(), Y2 | T2, K2 | Q2 | Y3),
                mi(Q2.into(), Y3.into(), K2.into()),
            ),
            Reduction::InformedRelay => (
                mi(T1.into(), Yhat2 | Y3, K2 | Q2),
                mi(T2.into(), Y2 | S, K2 | Q2),
                mi(T1.into(), T2.into(), none),
                mi(K2.into(), Y3.into(), none) - mi(K2.into(), S.into(), none),
                mi(Yhat2.into(), Y2 | S | T2, K2 | Q2 | Y3),
                mi(Q2.into(), Y3.into(), K2.into()) - mi(Q2.into(), S.into(), K2.into()),
            ),
            Reduction::InformedBoth => (
                mi(T1.into(), Yhat2 | Y3, K2 | Q2) - mi(T1.into(), S.into(), none),
                mi(T2.into(), Y2 | S, K2 | Q2) - mi(T2.into(), S.into(), none),
                mi(T1.into(), T2.into(), S.into()),
                mi(K2.into(), Y3.into(), none) - mi(K2.into(), S.into(), none),
                mi(Yhat2.into(), Y2 | S | T2, K2 | Q2 | Y3),
                mi(Q2.into(), Y3.into(), K2.into()) - mi(Q2.into(), S.into(), K2.into()),
            ),
        };
        RateBounds::from_raw(r13, r12, r13 + r12 - overlap, r23, lhs <= rhs + FEASIBILITY_TOL)
    }
}
