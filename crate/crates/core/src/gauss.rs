//! Jointly Gaussian model of the informed-source relay scheme.
//!
//! The source splits its power between two codewords `U1` (relayed message) and
//! `U2` (private message to the relay) with `X1 = U1 + U2`, and dirty-paper codes
//! each against the state through `T1 = U1 + α1·S` and `T2 = U2 + α2·S`. The
//! relay splits its power into a private part `V` and a compression-index part
//! `X2'`, and quantizes its observation as `Ŷ2 = β·Y2 + f·T2 + Ẑ`.
//!
//! All second moments of the scheme are collected in a [`GaussianJoint`], and
//! every conditional mutual information is computed from log-determinants of
//! its principal submatrices.

use std::fmt;
use std::ops::BitOr;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ridge added to every principal submatrix of a degenerate query, relative to
/// the trace of the full joint covariance.
pub const RIDGE_REL: f64 = 1e-12;

/// A Cholesky pivot at or below this (relative to the joint trace) marks the
/// query as degenerate and switches it to the ridged computation.
pub const DEGENERATE_REL: f64 = 1e-9;

/// Smallest admissible eigenvalue of a covariance, relative to its trace.
pub const PSD_REL_TOL: f64 = 1e-9;

/// Channel powers and noise variances, all in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub p1: f64,
    pub p2: f64,
    pub n2: f64,
    pub n3: f64,
    pub q: f64,
}

impl PowerConfig {
    pub fn new(p1: f64, p2: f64, n2: f64, n3: f64, q: f64) -> Result<Self> {
        let power = PowerConfig { p1, p2, n2, n3, q };
        power.validate()?;
        Ok(power)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("n2", self.n2),
            ("n3", self.n3),
            ("q", self.q),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    range: "(0, inf)",
                });
            }
        }
        Ok(())
    }

    /// Every power and variance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        PowerConfig {
            p1: self.p1 * factor,
            p2: self.p2 * factor,
            n2: self.n2 * factor,
            n3: self.n3 * factor,
            q: self.q * factor,
        }
    }
}

/// Knobs of the generalized dirty-paper / compress-and-forward scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Correlation coefficient of `U1` and `U2`.
    pub rho: f64,
    /// Fraction of the source power carried by `U2`.
    pub gamma: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub rho_u1s: f64,
    pub rho_u2s: f64,
    /// Fraction of the relay power spent on its private message.
    pub theta: f64,
    pub beta: f64,
    pub f: f64,
    /// Compression noise variance.
    pub nhat: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            rho: 0.0,
            gamma: 0.0,
            alpha1: 0.0,
            alpha2: 0.0,
            rho_u1s: 0.0,
            rho_u2s: 0.0,
            theta: 0.0,
            beta: 0.0,
            f: 0.0,
            nhat: 1.0,
        }
    }
}

impl SchemeParams {
    /// Checks the range of every field and the positive semidefiniteness of
    /// the `(S, U1, U2)` correlation block.
    pub fn validate(&self) -> Result<()> {
        let unit = [
            ("gamma", self.gamma),
            ("theta", self.theta),
            ("beta", self.beta),
        ];
        for (name, value) in unit {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    range: "[0, 1]",
                });
            }
        }
        let signed = [
            ("rho", self.rho),
            ("rho_u1s", self.rho_u1s),
            ("rho_u2s", self.rho_u2s),
            ("f", self.f),
        ];
        for (name, value) in signed {
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    range: "[-1, 1]",
                });
            }
        }
        for (name, value) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    range: "finite reals",
                });
            }
        }
        if !(self.nhat.is_finite() && self.nhat > 0.0) {
            return Err(Error::InvalidParameter {
                name: "nhat",
                value: self.nhat,
                range: "(0, inf)",
            });
        }
        self.state_correlation().map(|_| ())
    }

    /// Correlation matrix of `(S, U1, U2)`, with round-off negative
    /// eigenvalues inside the gate tolerance clipped to zero.
    pub fn state_correlation(&self) -> Result<Matrix3<f64>> {
        let m = Matrix3::new(
            1.0,
            self.rho_u1s,
            self.rho_u2s,
            self.rho_u1s,
            1.0,
            self.rho,
            self.rho_u2s,
            self.rho,
            1.0,
        );
        let eig = SymmetricEigen::new(m);
        let min = eig.eigenvalues.min();
        if min < -PSD_REL_TOL * 3.0 {
            return Err(Error::ParameterInfeasible(format!(
                "correlation block of (S, U1, U2) is not positive semidefinite \
                 (rho={}, rho_u1s={}, rho_u2s={}, min eigenvalue {min:.3e})",
                self.rho, self.rho_u1s, self.rho_u2s
            )));
        }
        if min >= 0.0 {
            return Ok(m);
        }
        let clipped = eig.eigenvalues.map(|l| l.max(0.0));
        let mut r = eig.eigenvectors * Matrix3::from_diagonal(&clipped) * eig.eigenvectors.transpose();
        let d = r.diagonal().map(f64::sqrt);
        for i in 0..3 {
            for j in 0..3 {
                r[(i, j)] /= d[i] * d[j];
            }
        }
        Ok(r)
    }
}

/// Power of `U1` implied by the total source power `p1`, the `U2` share
/// `gamma` and the codeword correlation `rho`.
///
/// Solves `P_u1 + γP1 + 2ρ√(P_u1·γP1) = P1` for its nonnegative root
/// `√P_u1 = −ρ√(γP1) + √(ρ²γP1 + (1−γ)P1)`.
pub fn solve_pu1(gamma: f64, rho: f64, p1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            range: "[0, 1]",
        });
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            range: "[-1, 1]",
        });
    }
    if !(p1.is_finite() && p1 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p1",
            value: p1,
            range: "(0, inf)",
        });
    }
    let pu2 = gamma * p1;
    let disc = rho * rho * pu2 + (1.0 - gamma) * p1;
    let root = -rho * pu2.sqrt() + disc.max(0.0).sqrt();
    if root < -1e-12 * p1.sqrt() || !root.is_finite() {
        return Err(Error::ParameterInfeasible(format!(
            "no nonnegative U1 power for gamma={gamma}, rho={rho}"
        )));
    }
    let root = root.max(0.0);
    Ok(root * root)
}

/// Random variables of the Gaussian scheme. The discriminant is the row of
/// the variable in a [`GaussianJoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Var {
    S = 0,
    U1,
    U2,
    V,
    /// Compression-index part `X2'` of the relay input.
    X2p,
    Z2,
    Z3,
    Zhat,
    X1,
    X2,
    Y2,
    Y3,
    T1,
    T2,
    Yhat2,
}

impl Var {
    pub const COUNT: usize = 15;

    pub const ALL: [Var; Var::COUNT] = [
        Var::S,
        Var::U1,
        Var::U2,
        Var::V,
        Var::X2p,
        Var::Z2,
        Var::Z3,
        Var::Zhat,
        Var::X1,
        Var::X2,
        Var::Y2,
        Var::Y3,
        Var::T1,
        Var::T2,
        Var::Yhat2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Var::S => "S",
            Var::U1 => "U1",
            Var::U2 => "U2",
            Var::V => "V",
            Var::X2p => "X2'",
            Var::Z2 => "Z2",
            Var::Z3 => "Z3",
            Var::Zhat => "Zhat",
            Var::X1 => "X1",
            Var::X2 => "X2",
            Var::Y2 => "Y2",
            Var::Y3 => "Y3",
            Var::T1 => "T1",
            Var::T2 => "T2",
            Var::Yhat2 => "Yhat2",
        };
        f.write_str(name)
    }
}

/// A set of [`Var`]s, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VarSet(u16);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn of(vars: &[Var]) -> Self {
        VarSet(vars.iter().fold(0, |m, v| m | (1 << v.index())))
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::ALL.into_iter().filter(move |v| self.contains(*v))
    }
}

impl From<Var> for VarSet {
    fn from(v: Var) -> Self {
        VarSet(1 << v.index())
    }
}

impl BitOr for VarSet {
    type Output = VarSet;
    fn bitor(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 | rhs.0)
    }
}

impl BitOr<Var> for VarSet {
    type Output = VarSet;
    fn bitor(self, rhs: Var) -> VarSet {
        self | VarSet::from(rhs)
    }
}

impl BitOr for Var {
    type Output = VarSet;
    fn bitor(self, rhs: Var) -> VarSet {
        VarSet::from(self) | rhs
    }
}

const N: usize = Var::COUNT;

/// Covariance of every scheme variable, indexed by [`Var`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianJoint {
    cov: [[f64; N]; N],
    trace: f64,
    /// `Var(βY2 + fT2)` when built by [`assemble_covariance`].
    yhat_signal: Option<f64>,
}

impl GaussianJoint {
    /// Wraps an arbitrary covariance, checking symmetry and semidefiniteness.
    pub fn from_matrix(cov: &DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != N || cov.ncols() != N {
            return Err(Error::NumericalConditioning(format!(
                "joint covariance must be {N}x{N}, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let mut m = [[0.0; N]; N];
        let scale = cov.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        for i in 0..N {
            for j in 0..N {
                let (x, y) = (cov[(i, j)], cov[(j, i)]);
                if !x.is_finite() || (x - y).abs() > 1e-12 * scale {
                    return Err(Error::NumericalConditioning(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
                m[i][j] = 0.5 * (x + y);
            }
        }
        let joint = Self::from_array(m);
        let min = joint.min_eigenvalue();
        if min < -PSD_REL_TOL * joint.trace {
            return Err(Error::NumericalConditioning(format!(
                "covariance is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(joint)
    }

    fn from_array(cov: [[f64; N]; N]) -> Self {
        let trace = (0..N).map(|i| cov[i][i]).sum();
        GaussianJoint {
            cov,
            trace,
            yhat_signal: None,
        }
    }

    /// The same scheme with compression noise variance `nhat`.
    ///
    /// # Panics
    ///
    /// Panics if the joint was not produced by [`assemble_covariance`].
    pub fn with_nhat(&self, nhat: f64) -> GaussianJoint {
        let signal = self
            .yhat_signal
            .expect("with_nhat needs a joint built by assemble_covariance");
        let (z, y) = (Var::Zhat.index(), Var::Yhat2.index());
        let mut cov = self.cov;
        cov[z][z] = nhat;
        cov[z][y] = nhat;
        cov[y][z] = nhat;
        cov[y][y] = signal + nhat;
        let mut joint = Self::from_array(cov);
        joint.yhat_signal = Some(signal);
        joint
    }

    pub fn cov(&self, a: Var, b: Var) -> f64 {
        self.cov[a.index()][b.index()]
    }

    pub fn variance(&self, v: Var) -> f64 {
        self.cov(v, v)
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(N, N, |i, j| self.cov[i][j])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.to_matrix()).eigenvalues.min()
    }

    /// `I(A; B | C)` in bits.
    ///
    /// Evaluated as `½·log2(det Σ_AC · det Σ_BC / (det Σ_C · det Σ_ABC))`
    /// through Cholesky pivots, with `C` ordered first so that the pivots of
    /// `Σ_C` and `Σ_AC` are shared by all four determinants. Queries that
    /// touch a degenerate direction (zero variance, exact linear dependence)
    /// are recomputed with a ridge of [`RIDGE_REL`]·trace on every submatrix,
    /// which yields the limiting value. The result is clamped at zero.
    pub fn conditional_mi(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<f64> {
        if !(a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c)) {
            return Err(Error::OverlappingSets);
        }
        Ok(self.conditional_mi_raw(a, b, c)?.max(0.0))
    }

    /// Unclamped form of [`conditional_mi`](Self::conditional_mi).
    pub fn conditional_mi_raw(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let mut order = [0usize; N];
        let mut len = 0;
        for set in [c, a, b] {
            for v in set.iter() {
                order[len] = v.index();
                len += 1;
            }
        }
        let (nc, na) = (c.len(), a.len());
        let order_cab = &order[..len];
        let mut order_cb = [0usize; N];
        order_cb[..nc].copy_from_slice(&order[..nc]);
        order_cb[nc..nc + b.len()].copy_from_slice(&order[nc + na..len]);
        let order_cb = &order_cb[..nc + b.len()];

        let threshold = DEGENERATE_REL * self.trace;
        let mut piv_cab = [0.0; N];
        let mut piv_cb = [0.0; N];
        let clean = self.log_pivots(order_cab, 0.0, threshold, &mut piv_cab)
            && self.log_pivots(order_cb, 0.0, threshold, &mut piv_cb);
        if !clean {
            let ridge = RIDGE_REL * self.trace;
            let ok = self.log_pivots(order_cab, ridge, 0.0, &mut piv_cab)
                && self.log_pivots(order_cb, ridge, 0.0, &mut piv_cb);
            if !ok {
                return Err(Error::NumericalConditioning(format!(
                    "submatrix over {len} variables is not positive definite after a ridge of {ridge:.3e}"
                )));
            }
        }
        // Only the B pivots differ: Var(B | C) against Var(B | C, A).
        let given_c: f64 = piv_cb[nc..].iter().sum();
        let given_ca: f64 = piv_cab[nc + na..len].iter().sum();
        Ok(0.5 * (given_c - given_ca) / std::f64::consts::LN_2)
    }

    /// Natural logs of the Cholesky pivots `L_kk²` of the principal submatrix
    /// selected by `order`, plus `ridge` on its diagonal. Returns `false` when
    /// a pivot is at or below `floor`.
    fn log_pivots(&self, order: &[usize], ridge: f64, floor: f64, out: &mut [f64; N]) -> bool {
        let n = order.len();
        let mut l = [[0.0f64; N]; N];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.cov[order[i]][order[j]];
                if i == j {
                    s += ridge;
                }
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    if !(s > floor) || !s.is_finite() {
                        return false;
                    }
                    out[i] = s.ln();
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        true
    }
}

/// Linear map from the independent sources `(S, U1, U2, V, X2', Z2, Z3, Ẑ)` to
/// every scheme variable.
fn mixing_row(v: Var, p: &SchemeParams) -> [f64; 8] {
    const S: usize = 0;
    const U1: usize = 1;
    const U2: usize = 2;
    const V: usize = 3;
    const X2P: usize = 4;
    const Z2: usize = 5;
    const Z3: usize = 6;
    const ZHAT: usize = 7;
    let mut r = [0.0; 8];
    match v {
        Var::S => r[S] = 1.0,
        Var::U1 => r[U1] = 1.0,
        Var::U2 => r[U2] = 1.0,
        Var::V => r[V] = 1.0,
        Var::X2p => r[X2P] = 1.0,
        Var::Z2 => r[Z2] = 1.0,
        Var::Z3 => r[Z3] = 1.0,
        Var::Zhat => r[ZHAT] = 1.0,
        Var::X1 => {
            r[U1] = 1.0;
            r[U2] = 1.0;
        }
        Var::X2 => {
            r[V] = 1.0;
            r[X2P] = 1.0;
        }
        Var::Y2 => {
            r[U1] = 1.0;
            r[U2] = 1.0;
            r[Z2] = 1.0;
            r[S] = 1.0;
        }
        Var::Y3 => {
            r[U1] = 1.0;
            r[U2] = 1.0;
            r[V] = 1.0;
            r[X2P] = 1.0;
            r[Z3] = 1.0;
            r[S] = 1.0;
        }
        Var::T1 => {
            r[U1] = 1.0;
            r[S] = p.alpha1;
        }
        Var::T2 => {
            r[U2] = 1.0;
            r[S] = p.alpha2;
        }
        Var::Yhat2 => {
            r[U1] = p.beta;
            r[U2] = p.beta + p.f;
            r[Z2] = p.beta;
            r[S] = p.beta + p.f * p.alpha2;
            r[ZHAT] = 1.0;
        }
    }
    r
}

/// Joint covariance of all scheme variables for the given powers and knobs.
pub fn assemble_covariance(power: &PowerConfig, params: &SchemeParams) -> Result<GaussianJoint> {
    power.validate()?;
    params.validate()?;
    let corr = params.state_correlation()?;
    let pu1 = solve_pu1(params.gamma, params.rho, power.p1)?;
    let pu2 = params.gamma * power.p1;

    // (S, U1, U2) block scaled from the correlation matrix, the rest independent.
    let sd = [power.q.sqrt(), pu1.sqrt(), pu2.sqrt()];
    let mut base = [[0.0; 8]; 8];
    for i in 0..3 {
        for j in 0..3 {
            base[i][j] = corr[(i, j)] * sd[i] * sd[j];
        }
    }
    base[3][3] = params.theta * power.p2;
    base[4][4] = (1.0 - params.theta) * power.p2;
    base[5][5] = power.n2;
    base[6][6] = power.n3;
    base[7][7] = params.nhat;

    let rows: Vec<[f64; 8]> = Var::ALL.iter().map(|v| mixing_row(*v, params)).collect();
    let mut tmp = [[0.0; 8]; N];
    for (i, row) in rows.iter().enumerate() {
        for k in 0..8 {
            tmp[i][k] = (0..8).map(|m| row[m] * base[m][k]).sum();
        }
    }
    let mut cov = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..=i {
            let x: f64 = (0..8).map(|k| tmp[i][k] * rows[j][k]).sum();
            cov[i][j] = x;
            cov[j][i] = x;
        }
    }
    let mut joint = GaussianJoint::from_array(cov);
    let mut signal = mixing_row(Var::Yhat2, params);
    signal[7] = 0.0;
    let signal_var = (0..8)
        .map(|i| (0..8).map(|k| signal[i] * base[i][k] * signal[k]).sum::<f64>())
        .sum();
    joint.yhat_signal = Some(signal_var);
    Ok(joint)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline_power() -> PowerConfig {
        PowerConfig::new(10.0, 10f64.powf(1.5), 1.0, 10.0, 10.0).unwrap()
    }

    #[test]
    fn pu1_endpoints() {
        assert!((solve_pu1(0.0, 0.7, 10.0).unwrap() - 10.0).abs() < 1e-12);
        assert!(solve_pu1(1.0, 0.0, 10.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn pu1_satisfies_power_identity() {
        // Oracle: substitute the root back into P_u1 + P_u2 + 2ρ√(P_u1 P_u2) = P1.
        let pu1 = solve_pu1(0.25, 0.5, 10.0).unwrap();
        let pu2 = 2.5;
        let total = pu1 + pu2 + 2.0 * 0.5 * (pu1 * pu2).sqrt();
        assert!((total - 10.0).abs() < 1e-12);
        assert!((pu1 - 4.243_060_8).abs() < 1e-6, "{pu1}");
    }

    #[test]
    fn pu1_rejects_out_of_range() {
        assert!(matches!(
            solve_pu1(1.5, 0.0, 10.0),
            Err(Error::InvalidParameter { name: "gamma", .. })
        ));
        assert!(solve_pu1(0.5, -1.5, 10.0).is_err());
        assert!(solve_pu1(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn independent_sum_variances() {
        let power = PowerConfig::new(10.0, 31.623, 1.0, 10.0, 10.0).unwrap();
        let joint = assemble_covariance(&power, &SchemeParams::default()).unwrap();
        assert!((joint.variance(Var::Y2) - 21.0).abs() < 1e-12);
        assert!((joint.variance(Var::Y3) - 61.623).abs() < 1e-12);
    }

    #[test]
    fn t1_y2_covariance_matches_bilinear_expansion() {
        for alpha1 in [-0.5, 0.0, 0.3, 1.2] {
            let params = SchemeParams {
                alpha1,
                ..SchemeParams::default()
            };
            let joint = assemble_covariance(&baseline_power(), &params).unwrap();
            let expected = 10.0 + 10.0 * alpha1;
            assert!((joint.cov(Var::T1, Var::Y2) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_psd_correlations() {
        let params = SchemeParams {
            rho: 0.9,
            rho_u1s: 0.9,
            rho_u2s: -0.9,
            ..SchemeParams::default()
        };
        assert!(matches!(
            assemble_covariance(&baseline_power(), &params),
            Err(Error::ParameterInfeasible(_))
        ));
    }

    #[test]
    fn boundary_correlations_pass_the_gate() {
        let params = SchemeParams {
            rho: 1.0,
            rho_u1s: 0.6,
            rho_u2s: 0.6,
            gamma: 0.4,
            ..SchemeParams::default()
        };
        let joint = assemble_covariance(&baseline_power(), &params).unwrap();
        assert!(joint.min_eigenvalue() >= -PSD_REL_TOL * joint.trace());
    }

    #[test]
    fn independent_blocks_have_zero_information() {
        let joint = assemble_covariance(&baseline_power(), &SchemeParams::default()).unwrap();
        let mi = joint
            .conditional_mi(VarSet::from(Var::Z2), Var::Z3 | Var::V, VarSet::EMPTY)
            .unwrap();
        assert_eq!(mi, 0.0);
    }

    #[test]
    fn awgn_at_unit_snr_is_half_a_bit() {
        let mut m = DMatrix::identity(N, N);
        // Treat X2 as U1 + Z with both unit variance.
        let (u, z, y) = (Var::U1.index(), Var::Z2.index(), Var::X2.index());
        m[(y, y)] = 2.0;
        m[(u, y)] = 1.0;
        m[(y, u)] = 1.0;
        m[(z, y)] = 1.0;
        m[(y, z)] = 1.0;
        let joint = GaussianJoint::from_matrix(&m).unwrap();
        let mi = joint
            .conditional_mi(Var::U1.into(), Var::X2.into(), VarSet::EMPTY)
            .unwrap();
        assert!((mi - 0.5).abs() < 1e-14);
    }

    #[test]
    fn overlapping_sets_are_rejected() {
        let joint = assemble_covariance(&baseline_power(), &SchemeParams::default()).unwrap();
        assert_eq!(
            joint.conditional_mi(Var::S.into(), Var::S | Var::Y2, VarSet::EMPTY),
            Err(Error::OverlappingSets)
        );
    }

    #[test]
    fn zero_variance_variable_carries_no_information() {
        // theta = 0 leaves V identically zero.
        let joint = assemble_covariance(&baseline_power(), &SchemeParams::default()).unwrap();
        let mi = joint
            .conditional_mi(Var::V.into(), Var::Y3.into(), VarSet::EMPTY)
            .unwrap();
        assert!(mi.abs() < 1e-12, "{mi}");
        let mi = joint
            .conditional_mi(Var::T1.into(), Var::Y3.into(), Var::V | Var::X2)
            .unwrap();
        assert!(mi > 0.1);
    }

    #[test]
    fn collinear_conditioning_matches_the_limit() {
        // theta = 1 makes X2 = V exactly; conditioning on both equals conditioning on V.
        let params = SchemeParams {
            theta: 1.0,
            alpha1: 0.5,
            ..SchemeParams::default()
        };
        let joint = assemble_covariance(&baseline_power(), &params).unwrap();
        let both = joint
            .conditional_mi(Var::T1.into(), Var::Y3.into(), Var::V | Var::X2)
            .unwrap();
        let one = joint
            .conditional_mi(Var::T1.into(), Var::Y3.into(), Var::V.into())
            .unwrap();
        assert!((both - one).abs() < 1e-9, "{both} vs {one}");
    }
}
