use std::collections::HashMap;
use std::sync::Mutex;

use std::borrow::Cow;

use super::{AlphabetSpec, CausalFactorization, Cpt, DmFactorization, DmSet, DmVar};
use crate::error::{Error, Result};

/// Total mass of a joint table must be within this of one.
pub const MASS_TOL: f64 = 1e-10;

/// Dense probability table over all twelve variables, row-major in
/// [`DmVar`] order.
#[derive(Debug)]
pub struct JointPmf {
    sizes: [usize; DmVar::COUNT],
    probs: Vec<f64>,
    // Marginal entropies in bits, keyed by variable-set bitmask.
    entropies: Mutex<HashMap<u16, f64>>,
}

impl Clone for JointPmf {
    fn clone(&self) -> Self {
        JointPmf {
            sizes: self.sizes,
            probs: self.probs.clone(),
            entropies: Mutex::new(self.entropies.lock().expect("entropy cache").clone()),
        }
    }
}

impl JointPmf {
    pub fn sizes(&self) -> &[usize; DmVar::COUNT] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Marginal over `set`, row-major in [`DmVar`] order.
    pub fn marginal(&self, set: DmSet) -> Vec<f64> {
        let vars: Vec<DmVar> = set.iter().collect();
        let len: usize = vars.iter().map(|v| self.sizes[v.index()]).product();
        let mut out = vec![0.0; len];
        // Stride of every joint variable inside the marginal (0 when summed out).
        let mut strides = [0usize; DmVar::COUNT];
        let mut stride = 1;
        for v in vars.iter().rev() {
            strides[v.index()] = stride;
            stride *= self.sizes[v.index()];
        }
        let mut digits = [0usize; DmVar::COUNT];
        let mut idx = 0usize;
        for &p in &self.probs {
            out[idx] += p;
            // Odometer over the joint, last variable fastest.
            for k in (0..DmVar::COUNT).rev() {
                digits[k] += 1;
                idx += strides[k];
                if digits[k] < self.sizes[k] {
                    break;
                }
                idx -= strides[k] * digits[k];
                digits[k] = 0;
            }
        }
        out
    }

    /// `H(set)` in bits.
    pub fn entropy(&self, set: DmSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        if let Some(h) = self.entropies.lock().expect("entropy cache").get(&set.bits()) {
            return *h;
        }
        let h = -self
            .marginal(set)
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>();
        self.entropies
            .lock()
            .expect("entropy cache")
            .insert(set.bits(), h);
        h
    }
}

/// A product of conditional tables over the joint variables.
pub trait KernelChain {
    fn alphabet(&self) -> &AlphabetSpec;
    /// Checks shapes and returns the kernels in chain order.
    fn chain(&self) -> Result<Vec<Cow<'_, Cpt>>>;
}

impl KernelChain for DmFactorization {
    fn alphabet(&self) -> &AlphabetSpec {
        &self.alphabet
    }

    fn chain(&self) -> Result<Vec<Cow<'_, Cpt>>> {
        self.validate()?;
        Ok(self.kernels().into_iter().map(Cow::Borrowed).collect())
    }
}

impl KernelChain for CausalFactorization {
    fn alphabet(&self) -> &AlphabetSpec {
        &self.alphabet
    }

    fn chain(&self) -> Result<Vec<Cow<'_, Cpt>>> {
        self.validate()?;
        let (f1, f2) = self.encoders()?;
        Ok(vec![
            Cow::Borrowed(&self.state),
            Cow::Borrowed(&self.k2),
            Cow::Borrowed(&self.q2),
            Cow::Owned(f2),
            Cow::Borrowed(&self.t),
            Cow::Owned(f1),
            Cow::Borrowed(&self.channel),
            Cow::Borrowed(&self.yhat2),
        ])
    }
}

/// Multiplies the kernels of a factorization into a joint table.
pub fn build_joint<F: KernelChain + ?Sized>(fact: &F) -> Result<JointPmf> {
    let alphabet = fact.alphabet();
    alphabet.validate()?;
    let kernels = fact.chain()?;
    let sizes = alphabet.sizes();
    let cells = alphabet.cells() as usize;
    let mut probs = Vec::with_capacity(cells);
    let mut digits = [0usize; DmVar::COUNT];
    for _ in 0..cells {
        let mut p = 1.0;
        for k in &kernels {
            p *= k.prob(&digits);
            if p == 0.0 {
                break;
            }
        }
        probs.push(p);
        for k in (0..DmVar::COUNT).rev() {
            digits[k] += 1;
            if digits[k] < sizes[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    let joint = JointPmf {
        sizes,
        probs,
        entropies: Mutex::new(HashMap::new()),
    };
    let mass = joint.total_mass();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::MalformedKernel {
            kernel: "joint".into(),
            reason: format!("kernels multiply to total mass {mass}"),
        });
    }
    Ok(joint)
}

/// `I(A; B | C)` in bits, from `H(AC) + H(BC) − H(C) − H(ABC)`.
///
/// # Panics
///
/// Panics if the three sets are not pairwise disjoint.
pub fn pmf_conditional_mi(joint: &JointPmf, a: DmSet, b: DmSet, c: DmSet) -> f64 {
    assert!(
        a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c),
        "mutual information sets must be disjoint"
    );
    // Constant variables carry no information.
    let informative = |set: DmSet| DmSet::of(&set.iter().filter(|v| joint.sizes[v.index()] > 1).collect::<Vec<_>>());
    let (a, b, c) = (informative(a), informative(b), informative(c));
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let i = joint.entropy(a | c) + joint.entropy(b | c) - joint.entropy(c) - joint.entropy(a | b | c);
    i.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dm::StateCoupling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use DmVar::*;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn singleton_alphabets_give_one_cell() {
        let fact = DmFactorization::random(&AlphabetSpec::uniform(1), StateCoupling::Free, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let joint = build_joint(&fact).unwrap();
        assert_eq!(joint.probs(), &[1.0]);
    }

    #[test]
    fn binary_symmetric_channel() {
        // X1 uniform through a BSC(0.11) to Y3; everything else trivial.
        let mut a = AlphabetSpec::uniform(1);
        a.x1 = 2;
        a.y3 = 2;
        let mut tables = DmFactorization::random(&a, StateCoupling::Free, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap()
            .to_tables();
        tables.x1 = vec![0.5, 0.5];
        let e = 0.11;
        tables.channel = vec![1.0 - e, e, e, 1.0 - e];
        let fact = DmFactorization::from_tables(a, tables).unwrap();
        let joint = build_joint(&fact).unwrap();
        let mi = pmf_conditional_mi(&joint, X1.into(), Y3.into(), DmSet::EMPTY);
        assert!((mi - (1.0 - h2(e))).abs() < 1e-12);
        assert!((mi - 0.5).abs() < 1e-3);
    }

    #[test]
    fn marginals_match_kernel_chaining() {
        // Oracle: p(s2) from the state kernel, then p(k2) = Σ p(s2) p(k2|s2).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fact = DmFactorization::random(&AlphabetSpec::uniform(2), StateCoupling::Free, &mut rng).unwrap();
        let joint = build_joint(&fact).unwrap();
        let st = fact.state.table();
        let p_s2: Vec<f64> = (0..2).map(|s2| (0..4).map(|i| st[i * 2 + s2]).sum()).collect();
        let k = fact.k2.table();
        let p_k2: Vec<f64> = (0..2)
            .map(|k2| (0..2).map(|s2| p_s2[s2] * k[s2 * 2 + k2]).sum())
            .collect();
        let m = joint.marginal(K2.into());
        for i in 0..2 {
            assert!((m[i] - p_k2[i]).abs() < 1e-14);
        }
        assert!((joint.total_mass() - 1.0).abs() < MASS_TOL);
    }

    #[test]
    #[should_panic]
    fn overlapping_sets_panic() {
        let fact = DmFactorization::random(&AlphabetSpec::uniform(1), StateCoupling::Free, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let joint = build_joint(&fact).unwrap();
        pmf_conditional_mi(&joint, S.into(), S | S1, DmSet::EMPTY);
    }
}
