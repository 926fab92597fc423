//! Achievable rate regions for the state-dependent relay channel with
//! private messages.
//!
//! - [`gauss`]: covariance of the Gaussian scheme and log-determinant mutual
//!   information.
//! - [`region`]: rate bounds, compression-noise solver and the auxiliary-rate
//!   feasibility check.
//! - [`dm`]: the same bounds for finite alphabets, non-causal and causal.
//! - [`frontier`]: parameter sweeps and R12/R13 trade-off curves.

pub mod dm;
pub mod error;
pub mod fm;
pub mod frontier;
pub mod gauss;
pub mod region;

pub use error::{Error, Result};
pub use gauss::{assemble_covariance, solve_pu1, GaussianJoint, PowerConfig, SchemeParams, Var, VarSet};
pub use region::{
    aux_rate_feasible, evaluate_gaussian_region, mi_values_gaussian, region_contains, solve_nhat,
    MiValues, RateBounds, RatePoint,
};
