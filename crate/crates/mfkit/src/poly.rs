//! Sparse exact multivariate polynomials.
//!
//! Representation: a term map `Monomial -> Scalar` with no stored zeros,
//! ordered graded-lexicographically so printing and equality are canonical.
//! A `PolyRing` fixes the variable names and an optional positive integer
//! weight vector; weighted degrees make truncation exact on quasi-homogeneous
//! input.

use crate::scalar::{Field, Scalar};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Exponent vector, one entry per ring variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, idx: usize) -> Self {
        let mut e = vec![0; arity];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn weighted_degree(&self, weights: Option<&[u64]>) -> u64 {
        match weights {
            None => self.total_degree(),
            Some(w) => self.0.iter().zip(w).map(|(&e, &wi)| e as u64 * wi).sum(),
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Quotient monomial; caller must ensure divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

// Graded-lex: total degree first, then lexicographic on exponents.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial ring: named variables plus an optional weight vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    pub vars: Vec<String>,
    pub weights: Option<Vec<u64>>,
}

impl PolyRing {
    pub fn new(vars: &[&str]) -> Arc<PolyRing> {
        Arc::new(PolyRing {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            weights: None,
        })
    }

    pub fn with_weights(vars: &[&str], weights: Vec<u64>) -> Arc<PolyRing> {
        assert_eq!(vars.len(), weights.len());
        assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
        Arc::new(PolyRing {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            weights: Some(weights),
        })
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// Sparse multivariate polynomial over a fixed ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    pub ring: Arc<PolyRing>,
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        MultiPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Scalar) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.arity()), c);
        }
        p
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, Scalar::from_int(1))
    }

    pub fn var(ring: &Arc<PolyRing>, idx: usize) -> Self {
        let mut p = Self::zero(ring);
        p.terms
            .insert(Monomial::var(ring.arity(), idx), Scalar::from_int(1));
        p
    }

    pub fn monomial(ring: &Arc<PolyRing>, m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            assert_eq!(m.0.len(), ring.arity());
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_one() && c.is_one())
    }

    fn same_ring(&self, other: &MultiPoly) {
        assert!(
            self.ring == other.ring,
            "ring mismatch: {:?} vs {:?}",
            self.ring.vars,
            other.ring.vars
        );
    }

    fn insert_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.same_ring(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.same_ring(other);
        let mut out = Self::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        let mut out = Self::zero(&self.ring);
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a.mul(c));
        }
        out
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut out = Self::one(&self.ring);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial_derivative(&self, var: usize) -> MultiPoly {
        assert!(var < self.ring.arity(), "variable index out of range");
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.insert_term(m2, c.mul(&Scalar::from_int(e as i64)));
        }
        out
    }

    /// Constant term (value at the origin).
    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&Monomial::one(self.ring.arity()))
            .cloned()
            .unwrap_or_else(|| Scalar::from_int(0))
    }

    /// Largest (weighted) degree of any term; zero polynomial has degree 0.
    pub fn degree(&self) -> u64 {
        let w = self.ring.weights.as_deref();
        self.terms
            .keys()
            .map(|m| m.weighted_degree(w))
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Drops all terms of (weighted) degree greater than `bound`.
    pub fn truncate(&self, bound: u64) -> MultiPoly {
        let w = self.ring.weights.as_deref();
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.weighted_degree(w) <= bound {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// True if every term has the same (weighted) degree. Zero counts as
    /// homogeneous of any degree.
    pub fn is_homogeneous(&self) -> bool {
        let w = self.ring.weights.as_deref();
        let mut degs = self.terms.keys().map(|m| m.weighted_degree(w));
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Leading term in graded-lex order, if nonzero.
    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Remainder of division by a single polynomial `g` (graded-lex leading
    /// term). A single generator is enough for the quadric quotients used by
    /// the Clifford pipeline; this is plain division, not a Groebner engine.
    pub fn reduce_mod(&self, g: &MultiPoly) -> MultiPoly {
        self.same_ring(g);
        let (lm, lc) = g.leading().expect("reduction modulo zero");
        let lm = lm.clone();
        let lc = lc.clone();
        let mut rem = self.clone();
        loop {
            let hit = rem
                .terms
                .iter()
                .rev()
                .find(|(m, _)| lm.divides(m))
                .map(|(m, c)| (m.clone(), c.clone()));
            match hit {
                None => return rem,
                Some((m, c)) => {
                    let q = MultiPoly::monomial(&self.ring, m.div(&lm), c.div(&lc));
                    rem = rem.sub(&q.mul(g));
                }
            }
        }
    }

    /// Re-expresses the polynomial in `target`, sending variable `i` of the
    /// current ring to variable `map[i]` of the target.
    pub fn lift_to(&self, target: &Arc<PolyRing>, map: &[usize]) -> MultiPoly {
        assert_eq!(map.len(), self.ring.arity());
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.arity()];
            for (i, &exp) in m.0.iter().enumerate() {
                e[map[i]] += exp;
            }
            out.insert_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn field(&self) -> Field {
        self.terms
            .values()
            .next()
            .map(|c| c.field())
            .unwrap_or(Field::Char0)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Print leading term first: descending graded-lex.
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let cabs = if neg { c.neg() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !cabs.is_one() || m.is_one() {
                factors.push(cabs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(self.ring.vars[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.ring.vars[i], e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Infers a positive integer weight vector making `f` quasi-homogeneous, and
/// returns `(weights, weighted degree)`. The weights are scaled so the degree
/// is even (so matrix-factorization gradings stay integral).
///
/// Returns `None` if no such weights exist (e.g. `x^3 - 3x`) or `f` has fewer
/// than one term.
pub fn infer_weights(f: &MultiPoly) -> Option<(Vec<u64>, u64)> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    let n = f.ring.arity();
    if f.is_zero() || n == 0 {
        return None;
    }
    let exps: Vec<&Monomial> = f.terms.keys().collect();
    // Solve e_j . w = e_0 . w for all j, with w rational, by eliminating in
    // the difference space, then pick a strictly positive solution.
    // For the small systems here, least-squares-free approach: treat w as
    // unknowns and row-reduce the (t-1) x n difference matrix over Q.
    let rows: Vec<Vec<BigRational>> = exps
        .windows(2)
        .map(|pair| {
            (0..n)
                .map(|i| {
                    BigRational::from_integer(BigInt::from(
                        pair[1].0[i] as i64 - pair[0].0[i] as i64,
                    ))
                })
                .collect()
        })
        .collect();
    // Gaussian elimination; record pivots.
    let mut mat = rows;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, pr);
        let piv = mat[row][col].clone();
        for c in 0..n {
            mat[row][c] = &mat[row][c] / &piv;
        }
        for r in 0..mat.len() {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in 0..n {
                    let sub = &mat[row][c] * &factor;
                    mat[r][c] = &mat[r][c] - sub;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == mat.len() {
            break;
        }
    }
    // Free variables get weight 1; pivot variables are determined.
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut w = vec![BigRational::zero(); n];
    for i in 0..n {
        if !pivot_cols.contains(&i) {
            w[i] = BigRational::one();
        }
    }
    for &(r, c) in pivots.iter().rev() {
        let mut val = BigRational::zero();
        for j in (c + 1)..n {
            let t = &mat[r][j] * &w[j];
            val = val - t;
        }
        w[c] = val;
    }
    if w.iter().any(|wi| !wi.is_positive()) {
        return None;
    }
    // Clear denominators.
    let mut scale = BigInt::one();
    for wi in &w {
        scale = num_integer::lcm(scale.clone(), wi.denom().clone());
    }
    let mut weights: Vec<u64> = w
        .iter()
        .map(|wi| {
            let v = wi * BigRational::from_integer(scale.clone());
            u64::try_from(v.to_integer()).expect("weight overflow")
        })
        .collect();
    let mut deg: u64 = exps[0]
        .0
        .iter()
        .zip(&weights)
        .map(|(&e, &wi)| e as u64 * wi)
        .sum();
    // Verify all terms agree (the system only forced consecutive pairs).
    for m in &exps {
        let d: u64 = m.0.iter().zip(&weights).map(|(&e, &wi)| e as u64 * wi).sum();
        if d != deg {
            return None;
        }
    }
    if deg % 2 == 1 {
        for wi in &mut weights {
            *wi *= 2;
        }
        deg *= 2;
    }
    Some((weights, deg))
}
