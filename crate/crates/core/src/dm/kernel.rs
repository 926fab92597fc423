use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DmVar;
use crate::error::{Error, Result};

/// Row sums of a conditional table must be within this of one.
pub const ROW_SUM_TOL: f64 = 1e-12;

const fn default_cap() -> usize {
    10_000_000
}

/// Alphabet size of every variable; size 1 encodes an absent variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetSpec {
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
    pub k2: usize,
    pub q2: usize,
    pub t1: usize,
    pub t2: usize,
    pub x1: usize,
    pub x2: usize,
    pub yhat2: usize,
    pub y2: usize,
    pub y3: usize,
    /// Largest admissible number of joint cells.
    #[serde(default = "default_cap")]
    pub cap: usize,
}

impl AlphabetSpec {
    /// Every variable with `n` symbols.
    pub fn uniform(n: usize) -> Self {
        AlphabetSpec {
            s: n,
            s1: n,
            s2: n,
            k2: n,
            q2: n,
            t1: n,
            t2: n,
            x1: n,
            x2: n,
            yhat2: n,
            y2: n,
            y3: n,
            cap: default_cap(),
        }
    }

    pub fn size(&self, v: DmVar) -> usize {
        match v {
            DmVar::S => self.s,
            DmVar::S1 => self.s1,
            DmVar::S2 => self.s2,
            DmVar::K2 => self.k2,
            DmVar::Q2 => self.q2,
            DmVar::T1 => self.t1,
            DmVar::T2 => self.t2,
            DmVar::X1 => self.x1,
            DmVar::X2 => self.x2,
            DmVar::Yhat2 => self.yhat2,
            DmVar::Y2 => self.y2,
            DmVar::Y3 => self.y3,
        }
    }

    pub fn set(&mut self, v: DmVar, n: usize) -> &mut Self {
        let slot = match v {
            DmVar::S => &mut self.s,
            DmVar::S1 => &mut self.s1,
            DmVar::S2 => &mut self.s2,
            DmVar::K2 => &mut self.k2,
            DmVar::Q2 => &mut self.q2,
            DmVar::T1 => &mut self.t1,
            DmVar::T2 => &mut self.t2,
            DmVar::X1 => &mut self.x1,
            DmVar::X2 => &mut self.x2,
            DmVar::Yhat2 => &mut self.yhat2,
            DmVar::Y2 => &mut self.y2,
            DmVar::Y3 => &mut self.y3,
        };
        *slot = n;
        self
    }

    pub fn sizes(&self) -> [usize; DmVar::COUNT] {
        DmVar::ALL.map(|v| self.size(v))
    }

    pub fn cells(&self) -> u128 {
        self.sizes().iter().map(|&n| n as u128).product()
    }

    pub fn validate(&self) -> Result<()> {
        for v in DmVar::ALL {
            if self.size(v) == 0 {
                return Err(Error::MalformedKernel {
                    kernel: "alphabet".into(),
                    reason: format!("variable {v} has an empty alphabet"),
                });
            }
        }
        let cells = self.cells();
        if cells > self.cap as u128 {
            return Err(Error::Capacity {
                cells,
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn count(&self, vars: &[DmVar]) -> usize {
        vars.iter().map(|&v| self.size(v)).product()
    }
}

/// A conditional probability table `p(out | given)`, stored row-major with
/// the `given` variables first (each list in its stated order).
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    name: &'static str,
    given: Vec<DmVar>,
    out: Vec<DmVar>,
    radix: Vec<usize>,
    table: Vec<f64>,
}

impl Cpt {
    pub fn new(
        name: &'static str,
        given: &[DmVar],
        out: &[DmVar],
        table: Vec<f64>,
        alphabet: &AlphabetSpec,
    ) -> Result<Self> {
        let malformed = |reason: String| Error::MalformedKernel {
            kernel: name.to_string(),
            reason,
        };
        let rows = alphabet.count(given);
        let cols = alphabet.count(out);
        if table.len() != rows * cols {
            return Err(malformed(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                table.len()
            )));
        }
        if let Some(x) = table.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(malformed(format!("entry {x} is not a probability")));
        }
        for (r, row) in table.chunks(cols).enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(malformed(format!("row {r} sums to {sum}")));
            }
        }
        let radix = given
            .iter()
            .chain(out)
            .map(|&v| alphabet.size(v))
            .collect();
        Ok(Cpt {
            name,
            given: given.to_vec(),
            out: out.to_vec(),
            radix,
            table,
        })
    }

    /// Point masses `out = map(given)`, with `map` indexed row-major over
    /// `given` and `out` a single variable.
    pub fn deterministic(
        name: &'static str,
        given: &[DmVar],
        out: DmVar,
        map: &[usize],
        alphabet: &AlphabetSpec,
    ) -> Result<Self> {
        let rows = alphabet.count(given);
        let cols = alphabet.size(out);
        if map.len() != rows {
            return Err(Error::MalformedKernel {
                kernel: name.to_string(),
                reason: format!("map needs {rows} entries, got {}", map.len()),
            });
        }
        let mut table = vec![0.0; rows * cols];
        for (r, &x) in map.iter().enumerate() {
            if x >= cols {
                return Err(Error::MalformedKernel {
                    kernel: name.to_string(),
                    reason: format!("map value {x} outside alphabet of {out} (size {cols})"),
                });
            }
            table[r * cols + x] = 1.0;
        }
        Self::new(name, given, &[out], table, alphabet)
    }

    /// Rows drawn uniformly from the probability simplex.
    pub fn random<R: Rng + ?Sized>(
        name: &'static str,
        given: &[DmVar],
        out: &[DmVar],
        alphabet: &AlphabetSpec,
        rng: &mut R,
    ) -> Self {
        let rows = alphabet.count(given);
        let cols = alphabet.count(out);
        let mut table = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            table.extend(random_simplex(cols, rng));
        }
        Self::new(name, given, out, table, alphabet).expect("random rows are normalized")
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn given(&self) -> &[DmVar] {
        &self.given
    }

    pub fn out(&self) -> &[DmVar] {
        &self.out
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// `p(out | given)` at a full assignment of the joint variables.
    pub fn prob(&self, assignment: &[usize; DmVar::COUNT]) -> f64 {
        let idx = self
            .given
            .iter()
            .chain(&self.out)
            .zip(&self.radix)
            .fold(0, |i, (v, r)| i * r + assignment[v.index()]);
        self.table[idx]
    }

    fn check_shape(&self, given: &[DmVar], out: &[DmVar]) -> Result<()> {
        if self.given != given || self.out != out {
            return Err(Error::MalformedKernel {
                kernel: self.name.to_string(),
                reason: format!(
                    "expected p({:?} | {:?}), got p({:?} | {:?})",
                    out, given, self.out, self.given
                ),
            });
        }
        Ok(())
    }
}

/// A normalized vector of `n` weights drawn uniformly from the simplex,
/// with every weight bounded away from zero.
pub(crate) fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n)
        .map(|_| -(rng.random::<f64>() * 0.999 + 0.001).ln())
        .collect();
    let total: f64 = w.iter().sum();
    let mut w: Vec<f64> = w.into_iter().map(|x| x / total).collect();
    // Exact unit sum for the row check.
    let rest: f64 = w[1..].iter().sum();
    w[0] = 1.0 - rest;
    w
}

use DmVar::*;

const STATE: (&[DmVar], &[DmVar]) = (&[], &[S, S1, S2]);
const K2_NC: (&[DmVar], &[DmVar]) = (&[S2], &[K2]);
const Q2_NC: (&[DmVar], &[DmVar]) = (&[K2, S2], &[Q2]);
const X2_NC: (&[DmVar], &[DmVar]) = (&[Q2, K2, S2], &[X2]);
const T_NC: (&[DmVar], &[DmVar]) = (&[S1], &[T1, T2]);
const X1_NC: (&[DmVar], &[DmVar]) = (&[T1, T2, S1], &[X1]);
const CHANNEL: (&[DmVar], &[DmVar]) = (&[X1, X2, S], &[Y2, Y3]);
const YHAT: (&[DmVar], &[DmVar]) = (&[Y2, Q2, K2, S2, T2], &[Yhat2]);
const K2_C: (&[DmVar], &[DmVar]) = (&[], &[K2]);
const Q2_C: (&[DmVar], &[DmVar]) = (&[K2], &[Q2]);
const T_C: (&[DmVar], &[DmVar]) = (&[], &[T1, T2]);
const F1_ARGS: &[DmVar] = &[T1, T2, S1];
const F2_ARGS: &[DmVar] = &[Q2, K2, S2];

/// Flat tables of a [`DmFactorization`], each row-major with the
/// conditioning variables first in the listed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmTables {
    /// `p(s, s1, s2)`
    pub state: Vec<f64>,
    /// `p(k2 | s2)`
    pub k2: Vec<f64>,
    /// `p(q2 | k2, s2)`
    pub q2: Vec<f64>,
    /// `p(x2 | q2, k2, s2)`
    pub x2: Vec<f64>,
    /// `p(t1, t2 | s1)`
    pub t: Vec<f64>,
    /// `p(x1 | t1, t2, s1)`
    pub x1: Vec<f64>,
    /// `p(y2, y3 | x1, x2, s)`
    pub channel: Vec<f64>,
    /// `p(yhat2 | y2, q2, k2, s2, t2)`
    pub yhat2: Vec<f64>,
}

/// The non-causal chain
/// `p(s,s1,s2) p(k2|s2) p(q2|k2,s2) p(x2|q2,k2,s2) p(t1,t2|s1) p(x1|t1,t2,s1)
///  p(y2,y3|x1,x2,s) p(ŷ2|y2,q2,k2,s2,t2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DmFactorization {
    pub alphabet: AlphabetSpec,
    pub state: Cpt,
    pub k2: Cpt,
    pub q2: Cpt,
    pub x2: Cpt,
    pub t: Cpt,
    pub x1: Cpt,
    pub channel: Cpt,
    pub yhat2: Cpt,
}

/// How the state knowledge `(S1, S2)` relates to the channel state `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateCoupling {
    /// An arbitrary `p(s, s1, s2)`.
    Free,
    /// Perfect state knowledge at the source.
    S1EqualsS,
    /// Perfect state knowledge at the relay.
    S2EqualsS,
    /// Perfect state knowledge at both.
    BothEqualS,
}

impl StateCoupling {
    /// A random `p(s, s1, s2)` honoring the coupling. Coupled alphabets must
    /// match the size of `S`.
    pub fn random_state<R: Rng + ?Sized>(self, alphabet: &AlphabetSpec, rng: &mut R) -> Result<Cpt> {
        let (ns, n1, n2) = (alphabet.s, alphabet.s1, alphabet.s2);
        let pinned_s1 = matches!(self, StateCoupling::S1EqualsS | StateCoupling::BothEqualS);
        let pinned_s2 = matches!(self, StateCoupling::S2EqualsS | StateCoupling::BothEqualS);
        if (pinned_s1 && n1 != ns) || (pinned_s2 && n2 != ns) {
            return Err(Error::MalformedKernel {
                kernel: "state".into(),
                reason: format!("coupling {self:?} needs matching alphabets, got s={ns}, s1={n1}, s2={n2}"),
            });
        }
        let free1 = if pinned_s1 { 1 } else { n1 };
        let free2 = if pinned_s2 { 1 } else { n2 };
        let weights = random_simplex(ns * free1 * free2, rng);
        let mut table = vec![0.0; ns * n1 * n2];
        for s in 0..ns {
            for a in 0..free1 {
                for b in 0..free2 {
                    let s1 = if pinned_s1 { s } else { a };
                    let s2 = if pinned_s2 { s } else { b };
                    table[(s * n1 + s1) * n2 + s2] = weights[(s * free1 + a) * free2 + b];
                }
            }
        }
        Cpt::new("state", STATE.0, STATE.1, table, alphabet)
    }
}

impl DmFactorization {
    pub fn from_tables(alphabet: AlphabetSpec, tables: DmTables) -> Result<Self> {
        alphabet.validate()?;
        let a = &alphabet;
        Ok(DmFactorization {
            state: Cpt::new("state", STATE.0, STATE.1, tables.state, a)?,
            k2: Cpt::new("k2", K2_NC.0, K2_NC.1, tables.k2, a)?,
            q2: Cpt::new("q2", Q2_NC.0, Q2_NC.1, tables.q2, a)?,
            x2: Cpt::new("x2", X2_NC.0, X2_NC.1, tables.x2, a)?,
            t: Cpt::new("t", T_NC.0, T_NC.1, tables.t, a)?,
            x1: Cpt::new("x1", X1_NC.0, X1_NC.1, tables.x1, a)?,
            channel: Cpt::new("channel", CHANNEL.0, CHANNEL.1, tables.channel, a)?,
            yhat2: Cpt::new("yhat2", YHAT.0, YHAT.1, tables.yhat2, a)?,
            alphabet,
        })
    }

    pub fn to_tables(&self) -> DmTables {
        DmTables {
            state: self.state.table().to_vec(),
            k2: self.k2.table().to_vec(),
            q2: self.q2.table().to_vec(),
            x2: self.x2.table().to_vec(),
            t: self.t.table().to_vec(),
            x1: self.x1.table().to_vec(),
            channel: self.channel.table().to_vec(),
            yhat2: self.yhat2.table().to_vec(),
        }
    }

    /// Checks that every kernel has the shape of the non-causal chain.
    pub fn validate(&self) -> Result<()> {
        self.alphabet.validate()?;
        self.state.check_shape(STATE.0, STATE.1)?;
        self.k2.check_shape(K2_NC.0, K2_NC.1)?;
        self.q2.check_shape(Q2_NC.0, Q2_NC.1)?;
        self.x2.check_shape(X2_NC.0, X2_NC.1)?;
        self.t.check_shape(T_NC.0, T_NC.1)?;
        self.x1.check_shape(X1_NC.0, X1_NC.1)?;
        self.channel.check_shape(CHANNEL.0, CHANNEL.1)?;
        self.yhat2.check_shape(YHAT.0, YHAT.1)
    }

    pub fn kernels(&self) -> [&Cpt; 8] {
        [
            &self.state,
            &self.k2,
            &self.q2,
            &self.x2,
            &self.t,
            &self.x1,
            &self.channel,
            &self.yhat2,
        ]
    }

    /// Random kernels on `alphabet` with the given state coupling.
    pub fn random<R: Rng + ?Sized>(
        alphabet: &AlphabetSpec,
        coupling: StateCoupling,
        rng: &mut R,
    ) -> Result<Self> {
        alphabet.validate()?;
        let a = alphabet;
        Ok(DmFactorization {
            alphabet: *a,
            state: coupling.random_state(a, rng)?,
            k2: Cpt::random("k2", K2_NC.0, K2_NC.1, a, rng),
            q2: Cpt::random("q2", Q2_NC.0, Q2_NC.1, a, rng),
            x2: Cpt::random("x2", X2_NC.0, X2_NC.1, a, rng),
            t: Cpt::random("t", T_NC.0, T_NC.1, a, rng),
            x1: Cpt::random("x1", X1_NC.0, X1_NC.1, a, rng),
            channel: Cpt::random("channel", CHANNEL.0, CHANNEL.1, a, rng),
            yhat2: Cpt::random("yhat2", YHAT.0, YHAT.1, a, rng),
        })
    }
}

/// Flat tables of a [`CausalFactorization`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalTables {
    /// `p(s, s1, s2)`
    pub state: Vec<f64>,
    /// `p(k2)`
    pub k2: Vec<f64>,
    /// `p(q2 | k2)`
    pub q2: Vec<f64>,
    /// `p(t1, t2)`
    pub t: Vec<f64>,
    /// `p(y2, y3 | x1, x2, s)`
    pub channel: Vec<f64>,
    /// `p(yhat2 | y2, q2, k2, s2, t2)`
    pub yhat2: Vec<f64>,
    /// `x1 = f1(t1, t2, s1)`, row-major over `(t1, t2, s1)`.
    pub f1: Vec<usize>,
    /// `x2 = f2(q2, k2, s2)`, row-major over `(q2, k2, s2)`.
    pub f2: Vec<usize>,
}

/// The causal chain `p(s,s1,s2) p(k2) p(q2|k2) p(t1,t2) p(y2,y3|x1,x2,s)
/// p(ŷ2|y2,q2,k2,s2,t2)` with `X1 = f1(T1,T2,S1)` and `X2 = f2(Q2,K2,S2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalFactorization {
    pub alphabet: AlphabetSpec,
    pub state: Cpt,
    pub k2: Cpt,
    pub q2: Cpt,
    pub t: Cpt,
    pub channel: Cpt,
    pub yhat2: Cpt,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
}

impl CausalFactorization {
    pub fn from_tables(alphabet: AlphabetSpec, tables: CausalTables) -> Result<Self> {
        alphabet.validate()?;
        let a = &alphabet;
        let fact = CausalFactorization {
            state: Cpt::new("state", STATE.0, STATE.1, tables.state, a)?,
            k2: Cpt::new("k2", K2_C.0, K2_C.1, tables.k2, a)?,
            q2: Cpt::new("q2", Q2_C.0, Q2_C.1, tables.q2, a)?,
            t: Cpt::new("t", T_C.0, T_C.1, tables.t, a)?,
            channel: Cpt::new("channel", CHANNEL.0, CHANNEL.1, tables.channel, a)?,
            yhat2: Cpt::new("yhat2", YHAT.0, YHAT.1, tables.yhat2, a)?,
            f1: tables.f1,
            f2: tables.f2,
            alphabet,
        };
        fact.validate()?;
        Ok(fact)
    }

    pub fn to_tables(&self) -> CausalTables {
        CausalTables {
            state: self.state.table().to_vec(),
            k2: self.k2.table().to_vec(),
            q2: self.q2.table().to_vec(),
            t: self.t.table().to_vec(),
            channel: self.channel.table().to_vec(),
            yhat2: self.yhat2.table().to_vec(),
            f1: self.f1.clone(),
            f2: self.f2.clone(),
        }
    }

    /// Kernel shapes (which encode the independence of the codewords from
    /// the state) and totality of the two encoding maps.
    pub fn validate(&self) -> Result<()> {
        self.alphabet.validate()?;
        self.state.check_shape(STATE.0, STATE.1)?;
        self.k2.check_shape(K2_C.0, K2_C.1)?;
        self.q2.check_shape(Q2_C.0, Q2_C.1)?;
        self.t.check_shape(T_C.0, T_C.1)?;
        self.channel.check_shape(CHANNEL.0, CHANNEL.1)?;
        self.yhat2.check_shape(YHAT.0, YHAT.1)?;
        self.encoders().map(|_| ())
    }

    /// The encoding maps as point-mass kernels `p(x1 | t1, t2, s1)` and
    /// `p(x2 | q2, k2, s2)`.
    pub fn encoders(&self) -> Result<(Cpt, Cpt)> {
        Ok((
            Cpt::deterministic("f1", F1_ARGS, X1, &self.f1, &self.alphabet)?,
            Cpt::deterministic("f2", F2_ARGS, X2, &self.f2, &self.alphabet)?,
        ))
    }

    /// The same distribution written as a non-causal chain: codeword kernels
    /// repeated for every state value, encoders as point masses.
    pub fn lift(&self) -> Result<DmFactorization> {
        let a = &self.alphabet;
        let (x1, x2) = self.encoders()?;
        fn repeat(
            name: &'static str,
            (given, out): (&[DmVar], &[DmVar]),
            base: &Cpt,
            reps: usize,
            a: &AlphabetSpec,
        ) -> Result<Cpt> {
            let table = base
                .table()
                .chunks(a.count(out))
                .flat_map(|row| std::iter::repeat_n(row, reps).flatten().copied())
                .collect();
            Cpt::new(name, given, out, table, a)
        }
        // p(k2 | s2) = p(k2) for every s2.
        let k2 = repeat("k2", K2_NC, &self.k2, a.s2, a)?;
        // p(q2 | k2, s2) = p(q2 | k2), the s2 index varying fastest among the givens.
        let q2 = repeat("q2", Q2_NC, &self.q2, a.s2, a)?;
        let t = repeat("t", T_NC, &self.t, a.s1, a)?;
        Ok(DmFactorization {
            alphabet: *a,
            state: self.state.clone(),
            k2,
            q2,
            x2,
            t,
            x1,
            channel: self.channel.clone(),
            yhat2: self.yhat2.clone(),
        })
    }

    /// Random kernels and encoding maps on `alphabet`.
    pub fn random<R: Rng + ?Sized>(
        alphabet: &AlphabetSpec,
        coupling: StateCoupling,
        rng: &mut R,
    ) -> Result<Self> {
        alphabet.validate()?;
        let a = alphabet;
        let f1 = (0..a.count(F1_ARGS)).map(|_| rng.random_range(0..a.x1)).collect();
        let f2 = (0..a.count(F2_ARGS)).map(|_| rng.random_range(0..a.x2)).collect();
        let fact = CausalFactorization {
            alphabet: *a,
            state: coupling.random_state(a, rng)?,
            k2: Cpt::random("k2", K2_C.0, K2_C.1, a, rng),
            q2: Cpt::random("q2", Q2_C.0, Q2_C.1, a, rng),
            t: Cpt::random("t", T_C.0, T_C.1, a, rng),
            channel: Cpt::random("channel", CHANNEL.0, CHANNEL.1, a, rng),
            yhat2: Cpt::random("yhat2", YHAT.0, YHAT.1, a, rng),
            f1,
            f2,
        };
        Ok(fact)
    }
}
