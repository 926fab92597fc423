//! Fourier–Motzkin elimination for small systems of linear inequalities.

/// One inequality `coeffs · x ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Inequality {
    pub fn new(coeffs: Vec<f64>, rhs: f64) -> Self {
        Inequality { coeffs, rhs }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

/// A system `A x ≤ b` over a fixed number of real unknowns.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    vars: usize,
    rows: Vec<Inequality>,
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        LinearSystem {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    /// Adds `Σ coeffs[i]·x[var_i] ≤ rhs` from sparse `(var, coeff)` terms.
    pub fn le(&mut self, terms: &[(usize, f64)], rhs: f64) -> &mut Self {
        let mut coeffs = vec![0.0; self.vars];
        for &(v, c) in terms {
            coeffs[v] += c;
        }
        self.rows.push(Inequality::new(coeffs, rhs));
        self
    }

    /// Adds `Σ coeffs[i]·x[var_i] ≥ rhs`.
    pub fn ge(&mut self, terms: &[(usize, f64)], rhs: f64) -> &mut Self {
        let neg: Vec<(usize, f64)> = terms.iter().map(|&(v, c)| (v, -c)).collect();
        self.le(&neg, -rhs)
    }

    /// Projects the system onto the remaining unknowns by eliminating `var`.
    pub fn eliminate(&mut self, var: usize) {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let mut kept = Vec::new();
        for row in self.rows.drain(..) {
            let c = row.coeffs[var];
            if c > 0.0 {
                upper.push(row);
            } else if c < 0.0 {
                lower.push(row);
            } else {
                kept.push(row);
            }
        }
        for u in &upper {
            for l in &lower {
                let (cu, cl) = (u.coeffs[var], -l.coeffs[var]);
                // cl·u + cu·l cancels the eliminated unknown.
                let coeffs: Vec<f64> = u
                    .coeffs
                    .iter()
                    .zip(&l.coeffs)
                    .enumerate()
                    .map(|(i, (a, b))| if i == var { 0.0 } else { (cl * a + cu * b) / (cl * cu) })
                    .collect();
                let rhs = (cl * u.rhs + cu * l.rhs) / (cl * cu);
                let row = Inequality::new(coeffs, rhs);
                if !kept.contains(&row) {
                    kept.push(row);
                }
            }
        }
        self.rows = kept;
    }

    /// Whether some real vector satisfies every inequality.
    pub fn is_feasible(&self) -> bool {
        let mut sys = self.clone();
        for v in 0..sys.vars {
            sys.eliminate(v);
        }
        sys.rows.iter().all(|r| r.is_trivial() && r.rhs >= 0.0)
    }
}
