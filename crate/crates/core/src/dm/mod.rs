//! Finite-alphabet evaluation of the non-causal and causal regions.
//!
//! A distribution is given as the chain of conditional probability tables
//! the regions are stated for; [`build_joint`] multiplies them out into a
//! dense [`JointPmf`], from which every information term is read off by
//! marginal entropies. An absent variable is an alphabet of size one.

mod joint;
mod kernel;
pub mod reductions;
mod theorems;

pub use joint::{build_joint, pmf_conditional_mi, JointPmf, KernelChain, MASS_TOL};
pub use kernel::{
    AlphabetSpec, CausalFactorization, CausalTables, Cpt, DmFactorization, DmTables, StateCoupling,
};
pub use theorems::{
    causal_subset_check, evaluate_theorem1, evaluate_theorem2, mi_values_dm, theorem2_bounds,
};

use std::fmt;
use std::ops::BitOr;

/// Variables of the discrete memoryless model, in joint-table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum DmVar {
    S = 0,
    S1,
    S2,
    K2,
    Q2,
    T1,
    T2,
    X1,
    X2,
    Yhat2,
    Y2,
    Y3,
}

impl DmVar {
    pub const COUNT: usize = 12;

    pub const ALL: [DmVar; DmVar::COUNT] = [
        DmVar::S,
        DmVar::S1,
        DmVar::S2,
        DmVar::K2,
        DmVar::Q2,
        DmVar::T1,
        DmVar::T2,
        DmVar::X1,
        DmVar::X2,
        DmVar::Yhat2,
        DmVar::Y2,
        DmVar::Y3,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DmVar::S => "s",
            DmVar::S1 => "s1",
            DmVar::S2 => "s2",
            DmVar::K2 => "k2",
            DmVar::Q2 => "q2",
            DmVar::T1 => "t1",
            DmVar::T2 => "t2",
            DmVar::X1 => "x1",
            DmVar::X2 => "x2",
            DmVar::Yhat2 => "yhat2",
            DmVar::Y2 => "y2",
            DmVar::Y3 => "y3",
        }
    }
}

impl fmt::Display for DmVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of [`DmVar`]s, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DmSet(u16);

impl DmSet {
    pub const EMPTY: DmSet = DmSet(0);

    pub fn of(vars: &[DmVar]) -> Self {
        DmSet(vars.iter().fold(0, |m, v| m | (1 << v.index())))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, v: DmVar) -> bool {
        self.0 & (1 << v.index()) != 0
    }

    pub fn is_disjoint(self, other: DmSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = DmVar> {
        DmVar::ALL.into_iter().filter(move |v| self.contains(*v))
    }
}

impl From<DmVar> for DmSet {
    fn from(v: DmVar) -> Self {
        DmSet(1 << v.index())
    }
}

impl BitOr for DmSet {
    type Output = DmSet;
    fn bitor(self, rhs: DmSet) -> DmSet {
        DmSet(self.0 | rhs.0)
    }
}

impl BitOr<DmVar> for DmSet {
    type Output = DmSet;
    fn bitor(self, rhs: DmVar) -> DmSet {
        self | DmSet::from(rhs)
    }
}

impl BitOr for DmVar {
    type Output = DmSet;
    fn bitor(self, rhs: DmVar) -> DmSet {
        DmSet::from(self) | rhs
    }
}
