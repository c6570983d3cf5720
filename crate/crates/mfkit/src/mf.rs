//! Matrix factorizations and the functorial constructions on them.
//!
//! A matrix factorization of `f` is a pair of square polynomial matrices
//! `(p, q)` with `p q = q p = f * I`, exactly. We read it as the 2-periodic
//! curved data with even part `V0`, odd part `V1`, `p : V1 -> V0` and
//! `q : V0 -> V1`; the honest complex underneath has differential `q` (so the
//! cokernel of `q` is the pushforward module) and the degree `+1` operator
//! `p` witnesses the curvature splitting `q p + p q = f`.
//!
//! Sign conventions, fixed once:
//! * `dual(p, q) = (p^T, -q^T)`, a factorization of `-f`; applying it twice
//!   gives back the input on the nose.
//! * `shift(p, q) = (-q, -p)`: parity swap with the differential negated.
//! * `ts_tensor` uses the Koszul rule `d(v ⊗ w) = dv ⊗ w + (-1)^{|v|} v ⊗ dw`.

use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::parse::parse_poly_in;
use crate::poly::{infer_weights, MultiPoly, PolyRing};
use crate::scalar::Field;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// An LG pair: a polynomial ring together with a superpotential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LGPair {
    pub ring: Arc<PolyRing>,
    pub f: MultiPoly,
}

impl LGPair {
    pub fn new(f: MultiPoly) -> Self {
        LGPair {
            ring: f.ring.clone(),
            f,
        }
    }
}

/// Internal grading data making both `p` and `q` homogeneous of degree `h`
/// with respect to `weights`. Lets the Ext machinery split into finite
/// degree pieces instead of sweeping windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    /// Same variables as the factorization's ring, with the weights pinned.
    pub ring: Arc<PolyRing>,
    pub h: i64,
    pub deg0: Vec<i64>,
    pub deg1: Vec<i64>,
}

/// A matrix factorization `p q = q p = f * I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFactorization {
    pub f: MultiPoly,
    pub p: PolyMatrix,
    pub q: PolyMatrix,
    pub grading: Option<Grading>,
}

impl MatrixFactorization {
    /// Builds and validates; grading is inferred opportunistically.
    pub fn new(f: MultiPoly, p: PolyMatrix, q: PolyMatrix) -> Result<Self> {
        let mut mf = MatrixFactorization {
            f,
            p,
            q,
            grading: None,
        };
        mf.validate()?;
        mf.grading = infer_grading(&mf.f, &mf.p, &mf.q);
        Ok(mf)
    }

    pub fn rank(&self) -> usize {
        self.p.rows
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.f.ring
    }

    /// Checks `p q = q p = f * I` exactly.
    pub fn validate(&self) -> Result<()> {
        let r = self.p.rows;
        if self.p.cols != r || self.q.rows != r || self.q.cols != r {
            return Err(Error::Invalid("p and q must be square of equal size".into()));
        }
        let target = PolyMatrix::scalar_identity(self.ring(), r, &self.f);
        if let Some((i, j)) = self.p.mul(&self.q).first_difference(&target) {
            return Err(Error::NotAFactorization { row: i, col: j });
        }
        if let Some((i, j)) = self.q.mul(&self.p).first_difference(&target) {
            return Err(Error::NotAFactorization { row: i, col: j });
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// `(p, q) = ([1], [f])`: the factorization presenting the structure
    /// sheaf of the zero fiber. Perfect, hence killed by inverting beta.
    pub fn trivial(f: MultiPoly) -> Self {
        let ring = f.ring.clone();
        let p = PolyMatrix::identity(&ring, 1);
        let q = PolyMatrix::from_fn(&ring, 1, 1, |_, _| f.clone());
        Self::new(f, p, q).expect("trivial factorization is always valid")
    }

    /// Grothendieck duality: `(p, q) -> (p^T, -q^T)`, a factorization of `-f`.
    pub fn dual(&self) -> Self {
        Self::new(self.f.neg(), self.p.transpose(), self.q.transpose().neg())
            .expect("dual of a valid factorization is valid")
    }

    /// Parity swap; the differential changes sign so the composite stays
    /// `f * I`.
    pub fn shift(&self) -> Self {
        Self::new(self.f.clone(), self.q.neg(), self.p.neg())
            .expect("shift of a valid factorization is valid")
    }

    /// Block-diagonal sum of factorizations of the same superpotential.
    pub fn direct_sum(&self, other: &MatrixFactorization) -> Result<Self> {
        if self.f != other.f {
            return Err(Error::SuperpotentialMismatch(format!(
                "{} vs {}",
                self.f, other.f
            )));
        }
        Self::new(
            self.f.clone(),
            self.p.direct_sum(&other.p),
            self.q.direct_sum(&other.q),
        )
    }
}

/// Koszul factorization of `sum a_i b_i` on the exterior algebra of n
/// generators: the differential is (contract with a) + (wedge with b), split
/// into odd/even halves. Rank `2^(n-1)`.
pub fn koszul_mf(a: &[MultiPoly], b: &[MultiPoly]) -> Result<MatrixFactorization> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::Invalid(format!(
            "need equal nonempty coefficient lists, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let ring = a[0].ring.clone();
    for g in a.iter().chain(b.iter()) {
        if g.ring != ring {
            return Err(Error::RingMismatch("koszul coefficients".into()));
        }
    }
    let n = a.len();
    let mut f = MultiPoly::zero(&ring);
    for i in 0..n {
        f = f.add(&a[i].mul(&b[i]));
    }

    // Basis: subsets as bitmasks, ascending, split by popcount parity.
    let even: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() % 2 == 0).collect();
    let odd: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() % 2 == 1).collect();
    let pos = |list: &[u32], s: u32| list.iter().position(|&t| t == s).unwrap();

    // sign of moving e_i past the generators of s below i
    let sign_below = |s: u32, i: usize| -> i64 {
        let below = (s & ((1u32 << i) - 1)).count_ones();
        if below % 2 == 0 {
            1
        } else {
            -1
        }
    };

    let mut p = PolyMatrix::zero(&ring, even.len(), odd.len());
    let mut q = PolyMatrix::zero(&ring, odd.len(), even.len());
    // delta(e_S) = sum_i a_i * contract_i(e_S) + sum_i b_i * (e_i wedge e_S)
    for (src_list, dst_list, mat, src_is_even) in [
        (&even, &odd, &mut q, true),
        (&odd, &even, &mut p, false),
    ] {
        let _ = src_is_even;
        for (col, &s) in src_list.iter().enumerate() {
            for i in 0..n {
                let bit = 1u32 << i;
                if s & bit != 0 {
                    // contraction, coefficient a_i
                    let t = s & !bit;
                    let row = pos(dst_list, t);
                    let term = a[i].scale(&crate::scalar::Scalar::from_int(sign_below(s, i)));
                    *mat.at_mut(row, col) = mat.at(row, col).add(&term);
                } else {
                    // wedge, coefficient b_i
                    let t = s | bit;
                    let row = pos(dst_list, t);
                    let term = b[i].scale(&crate::scalar::Scalar::from_int(sign_below(s, i)));
                    *mat.at_mut(row, col) = mat.at(row, col).add(&term);
                }
            }
        }
    }
    MatrixFactorization::new(f, p, q)
}

/// The stabilized residue field at the origin: splits `f = sum x_i f_i` by
/// assigning every term to its lowest-index variable, then takes the Koszul
/// factorization on `(x_1..x_n, f_1..f_n)`. Requires `f(0) = 0`.
pub fn stabilized_residue_field(pair: &LGPair) -> Result<MatrixFactorization> {
    let f = &pair.f;
    let ring = &pair.ring;
    if !f.constant_term().is_zero() {
        return Err(Error::Invalid(
            "superpotential must vanish at the origin".into(),
        ));
    }
    let n = ring.arity();
    if n == 0 {
        return Err(Error::Invalid("need at least one variable".into()));
    }
    let mut parts = vec![MultiPoly::zero(ring); n];
    for (m, c) in &f.terms {
        let i = m
            .0
            .iter()
            .position(|&e| e > 0)
            .expect("constant term was excluded");
        let mut m2 = m.clone();
        m2.0[i] -= 1;
        parts[i] = parts[i].add(&MultiPoly::monomial(ring, m2, c.clone()));
    }
    let vars: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(ring, i)).collect();
    koszul_mf(&vars, &parts)
}

/// Thom-Sebastiani tensor product: a factorization of `f + g` over the merged
/// ring, with the Koszul sign on the second factor. Variable sets must be
/// disjoint; renaming is the caller's job (silent capture is the classic
/// computer-algebra bug).
pub fn ts_tensor(
    m: &MatrixFactorization,
    n: &MatrixFactorization,
) -> Result<MatrixFactorization> {
    let rm = m.ring();
    let rn = n.ring();
    for v in &rn.vars {
        if rm.vars.contains(v) {
            return Err(Error::VariableCollision(v.clone()));
        }
    }
    let vars: Vec<String> = rm.vars.iter().chain(rn.vars.iter()).cloned().collect();
    let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let merged = PolyRing::new(&var_refs);
    let map_m: Vec<usize> = (0..rm.arity()).collect();
    let map_n: Vec<usize> = (rm.arity()..rm.arity() + rn.arity()).collect();

    let f = m.f.lift_to(&merged, &map_m).add(&n.f.lift_to(&merged, &map_n));
    let pm = m.p.lift_to(&merged, &map_m);
    let qm = m.q.lift_to(&merged, &map_m);
    let pn = n.p.lift_to(&merged, &map_n);
    let qn = n.q.lift_to(&merged, &map_n);
    let (r, s) = (m.rank(), n.rank());

    // New even part: V0 (x) W0 then V1 (x) W1; new odd: V1 (x) W0 then V0 (x) W1.
    // d(v (x) w) = dv (x) w + (-1)^{|v|} v (x) dw in block form:
    let kron = |a: &PolyMatrix, b: &PolyMatrix| -> PolyMatrix {
        PolyMatrix::from_fn(
            &merged,
            a.rows * b.rows,
            a.cols * b.cols,
            |i, j| {
                let (ai, bi) = (i / b.rows, i % b.rows);
                let (aj, bj) = (j / b.cols, j % b.cols);
                a.at(ai, aj).mul(b.at(bi, bj))
            },
        )
    };
    let ident = |k: usize| PolyMatrix::identity(&merged, k);

    // p_new : (V1W0 + V0W1) -> (V0W0 + V1W1)
    let blocks_p = [
        [kron(&pm, &ident(s)), kron(&ident(r), &pn)],
        [kron(&ident(r), &qn).neg(), kron(&qm, &ident(s))],
    ];
    // q_new : (V0W0 + V1W1) -> (V1W0 + V0W1)
    let blocks_q = [
        [kron(&qm, &ident(s)), kron(&ident(r), &pn).neg()],
        [kron(&ident(r), &qn), kron(&pm, &ident(s))],
    ];
    let assemble = |blocks: &[[PolyMatrix; 2]; 2]| -> PolyMatrix {
        let top = horizontal(&blocks[0]);
        let bottom = horizontal(&blocks[1]);
        vertical(&[top, bottom])
    };
    fn horizontal(row: &[PolyMatrix; 2]) -> PolyMatrix {
        let mut m = PolyMatrix::zero(&row[0].ring, row[0].rows, row[0].cols + row[1].cols);
        for (k, b) in row.iter().enumerate() {
            let off = if k == 0 { 0 } else { row[0].cols };
            for i in 0..b.rows {
                for j in 0..b.cols {
                    *m.at_mut(i, off + j) = b.at(i, j).clone();
                }
            }
        }
        m
    }
    fn vertical(col: &[PolyMatrix]) -> PolyMatrix {
        let mut m = PolyMatrix::zero(&col[0].ring, col[0].rows + col[1].rows, col[0].cols);
        for (k, b) in col.iter().enumerate() {
            let off = if k == 0 { 0 } else { col[0].rows };
            for i in 0..b.rows {
                for j in 0..b.cols {
                    *m.at_mut(off + i, j) = b.at(i, j).clone();
                }
            }
        }
        m
    }

    MatrixFactorization::new(f, assemble(&blocks_p), assemble(&blocks_q))
}

/// Tensoring with the rank-one factorization of `u v` on two fresh variables:
/// the Knorrer double, a factorization of `f + u v` of twice the rank.
pub fn knorrer_double(m: &MatrixFactorization) -> Result<MatrixFactorization> {
    let taken = &m.ring().vars;
    let fresh = |base: &str| -> String {
        if !taken.contains(&base.to_string()) {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|name| !taken.contains(name))
            .unwrap()
    };
    let (u, v) = (fresh("u"), fresh("v"));
    let ring_uv = PolyRing::new(&[&u, &v]);
    let k_uv = koszul_mf(
        &[MultiPoly::var(&ring_uv, 0)],
        &[MultiPoly::var(&ring_uv, 1)],
    )?;
    ts_tensor(m, &k_uv)
}

/// Tries to find weights and generator degrees making `p` and `q`
/// homogeneous of one common degree `h`. Candidates: the ring's own weights,
/// weights inferred from `f`, and plain total degree.
fn infer_grading(f: &MultiPoly, p: &PolyMatrix, q: &PolyMatrix) -> Option<Grading> {
    let ring = &f.ring;
    let mut candidates: Vec<Vec<u64>> = Vec::new();
    if let Some(w) = &ring.weights {
        candidates.push(w.clone());
        let mut doubled = w.clone();
        doubled.iter_mut().for_each(|x| *x *= 2);
        candidates.push(doubled);
    }
    if let Some((w, _)) = infer_weights(f) {
        candidates.push(w);
    }
    candidates.push(vec![1; ring.arity()]);
    candidates.push(vec![2; ring.arity()]);
    for w in candidates {
        if let Some(g) = try_grading(f, p, q, &w) {
            return Some(g);
        }
    }
    None
}

fn try_grading(f: &MultiPoly, p: &PolyMatrix, q: &PolyMatrix, weights: &[u64]) -> Option<Grading> {
    let ring = &f.ring;
    let var_refs: Vec<&str> = ring.vars.iter().map(|s| s.as_str()).collect();
    let wring = PolyRing::with_weights(&var_refs, weights.to_vec());
    let wdeg = |g: &MultiPoly| -> Option<i64> {
        // homogeneous degree of a nonzero polynomial under `weights`
        let mut degs = g
            .terms
            .keys()
            .map(|m| m.weighted_degree(Some(weights)) as i64);
        let d0 = degs.next()?;
        degs.all(|d| d == d0).then_some(d0)
    };
    let h = if f.is_zero() {
        0
    } else {
        let df = wdeg(f)?;
        if df % 2 != 0 {
            return None;
        }
        df / 2
    };
    let r = p.rows;
    // Constraint graph: deg q[j][i] = h + deg0[i] - deg1[j],
    //                   deg p[i][j] = h + deg1[j] - deg0[i].
    // BFS from each unassigned generator.
    let mut deg0: Vec<Option<i64>> = vec![None; r];
    let mut deg1: Vec<Option<i64>> = vec![None; r];
    for start in 0..r {
        if deg0[start].is_some() {
            continue;
        }
        deg0[start] = Some(0);
        let mut stack = vec![(false, start)]; // (is_odd_side, index)
        while let Some((odd_side, idx)) = stack.pop() {
            if !odd_side {
                let di = deg0[idx].unwrap();
                for j in 0..r {
                    if let Some(dq) = nonzero_wdeg(q.at(j, idx), weights) {
                        let dq = dq?;
                        let want = h + di - dq;
                        match deg1[j] {
                            None => {
                                deg1[j] = Some(want);
                                stack.push((true, j));
                            }
                            Some(have) if have != want => return None,
                            _ => {}
                        }
                    }
                    if let Some(dp) = nonzero_wdeg(p.at(idx, j), weights) {
                        let dp = dp?;
                        let want = dp - h + di;
                        match deg1[j] {
                            None => {
                                deg1[j] = Some(want);
                                stack.push((true, j));
                            }
                            Some(have) if have != want => return None,
                            _ => {}
                        }
                    }
                }
            } else {
                let dj = deg1[idx].unwrap();
                for i in 0..r {
                    if let Some(dq) = nonzero_wdeg(q.at(idx, i), weights) {
                        let dq = dq?;
                        let want = dq - h + dj;
                        match deg0[i] {
                            None => {
                                deg0[i] = Some(want);
                                stack.push((false, i));
                            }
                            Some(have) if have != want => return None,
                            _ => {}
                        }
                    }
                    if let Some(dp) = nonzero_wdeg(p.at(i, idx), weights) {
                        let dp = dp?;
                        let want = h + dj - dp;
                        match deg0[i] {
                            None => {
                                deg0[i] = Some(want);
                                stack.push((false, i));
                            }
                            Some(have) if have != want => return None,
                            _ => {}
                        }
                    }
                }
            }
        }
        // Odd generators in this component got degrees; stragglers pick 0.
    }
    let deg0: Vec<i64> = deg0.into_iter().map(|d| d.unwrap_or(0)).collect();
    let deg1: Vec<i64> = deg1.into_iter().map(|d| d.unwrap_or(0)).collect();
    Some(Grading {
        ring: wring,
        h,
        deg0,
        deg1,
    })
}

/// `Some(Some(d))` if nonzero and homogeneous of degree d, `Some(None)` if
/// nonzero but inhomogeneous, `None` if zero.
fn nonzero_wdeg(g: &MultiPoly, weights: &[u64]) -> Option<Option<i64>> {
    if g.is_zero() {
        return None;
    }
    let mut degs = g
        .terms
        .keys()
        .map(|m| m.weighted_degree(Some(weights)) as i64);
    let d0 = degs.next().unwrap();
    if degs.all(|d| d == d0) {
        Some(Some(d0))
    } else {
        Some(None)
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// On-disk form: `{ "f": .., "rank": .., "p": [[..]], "q": [[..]], "vars": [..] }`.
/// The reader re-validates; invalid files are rejected.
#[derive(Debug, Serialize, Deserialize)]
pub struct MfFile {
    pub f: String,
    pub rank: usize,
    pub p: Vec<Vec<String>>,
    pub q: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
}

impl MatrixFactorization {
    pub fn to_file(&self) -> MfFile {
        let r = self.rank();
        let grid = |m: &PolyMatrix| -> Vec<Vec<String>> {
            (0..r)
                .map(|i| (0..r).map(|j| m.at(i, j).to_string()).collect())
                .collect()
        };
        MfFile {
            f: self.f.to_string(),
            rank: r,
            p: grid(&self.p),
            q: grid(&self.q),
            vars: Some(self.ring().vars.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serialization cannot fail")
    }

    pub fn from_file(file: &MfFile, field: Field) -> Result<Self> {
        let ring = match &file.vars {
            Some(vars) => {
                let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
                PolyRing::new(&refs)
            }
            None => {
                // Infer variables from f then matrix entries, in reading order.
                let mut probe: Vec<String> = Vec::new();
                let mut scan = |src: &str| {
                    if let Ok(p) = crate::parse::parse_poly(src, field) {
                        for v in &p.ring.vars {
                            if !probe.contains(v) {
                                probe.push(v.clone());
                            }
                        }
                    }
                };
                scan(&file.f);
                for row in file.p.iter().chain(file.q.iter()) {
                    for e in row {
                        scan(e);
                    }
                }
                let refs: Vec<&str> = probe.iter().map(|s| s.as_str()).collect();
                PolyRing::new(&refs)
            }
        };
        let parse = |src: &str| parse_poly_in(src, field, &ring);
        let f = parse(&file.f)?;
        let r = file.rank;
        if file.p.len() != r || file.q.len() != r {
            return Err(Error::Invalid("matrix size disagrees with rank".into()));
        }
        let mut p = PolyMatrix::zero(&ring, r, r);
        let mut q = PolyMatrix::zero(&ring, r, r);
        for i in 0..r {
            if file.p[i].len() != r || file.q[i].len() != r {
                return Err(Error::Invalid("matrix size disagrees with rank".into()));
            }
            for j in 0..r {
                *p.at_mut(i, j) = parse(&file.p[i][j])?;
                *q.at_mut(i, j) = parse(&file.q[i][j])?;
            }
        }
        Self::new(f, p, q)
    }

    pub fn from_json(src: &str, field: Field) -> Result<Self> {
        let file: MfFile = serde_json::from_str(src)?;
        Self::from_file(&file, field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::scalar::Field;

    fn poly(s: &str) -> MultiPoly {
        parse_poly(s, Field::Char0).unwrap()
    }

    /// Parse in the fixed two-variable ring so lists share a ring.
    fn pxy(s: &str) -> MultiPoly {
        parse_poly_in(s, Field::Char0, &PolyRing::new(&["x", "y"])).unwrap()
    }

    #[test]
    fn trivial_and_rank_one() {
        let f = poly("x^3");
        assert!(MatrixFactorization::trivial(f).is_valid());
        let x = poly("x");
        let m = koszul_mf(&[x.clone()], &[x.clone()]).unwrap();
        assert_eq!(m.f, poly("x^2"));
        assert!(m.is_valid());
        // (p=[x], q=[x]) is not a factorization of x^3
        let bad = MatrixFactorization::new(
            poly("x^3"),
            m.p.clone(),
            m.q.clone(),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn koszul_two_pairs() {
        let m = koszul_mf(&[pxy("x"), pxy("y")], &[pxy("x"), pxy("y^2")]).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.f, pxy("x^2 + y^3"));
        assert!(m.is_valid());
        assert!(m.grading.is_some());
    }

    #[test]
    fn srf_term_assignment() {
        // f = xy: the xy term goes to x, so parts = (y, 0).
        let f = poly("x*y");
        let m = stabilized_residue_field(&LGPair::new(f.clone())).unwrap();
        assert!(m.is_valid());
        assert_eq!(m.rank(), 2);
        assert_eq!(m.f, f);
        // f = x^2 in one variable: the classical (x, x).
        let m2 = stabilized_residue_field(&LGPair::new(poly("x^2"))).unwrap();
        assert_eq!(m2.p.at(0, 0), &poly("x"));
        assert_eq!(m2.q.at(0, 0), &poly("x"));
        // constant obstruction
        assert!(stabilized_residue_field(&LGPair::new(poly("x + 1"))).is_err());
    }

    #[test]
    fn dual_is_involutive_and_flips_sign() {
        let m = koszul_mf(&[pxy("x"), pxy("y")], &[pxy("x"), pxy("y^2")]).unwrap();
        let d = m.dual();
        assert!(d.is_valid());
        assert_eq!(d.f, m.f.neg());
        assert_eq!(d.dual(), m);
        // dual of trivial is (1, -f)
        let t = MatrixFactorization::trivial(poly("x^3")).dual();
        assert_eq!(t.q.at(0, 0), &poly("-x^3"));
    }

    #[test]
    fn shift_squares_to_identity() {
        let m = koszul_mf(&[poly("x")], &[poly("x^2")]).unwrap();
        let s = m.shift();
        assert!(s.is_valid());
        assert_eq!(s.shift(), m);
    }

    #[test]
    fn ts_tensor_of_rank_ones() {
        let mx = koszul_mf(&[poly("x")], &[poly("x")]).unwrap();
        let my = koszul_mf(&[poly("y")], &[poly("y")]).unwrap();
        let t = ts_tensor(&mx, &my).unwrap();
        assert_eq!(t.rank(), 2);
        assert_eq!(t.f.to_string(), "x^2 + y^2");
        assert!(t.is_valid());
        // collision rejected
        assert!(matches!(
            ts_tensor(&mx, &mx),
            Err(Error::VariableCollision(_))
        ));
    }

    #[test]
    fn knorrer_double_shape() {
        let m = koszul_mf(&[poly("x")], &[poly("x")]).unwrap();
        let k = knorrer_double(&m).unwrap();
        assert_eq!(k.rank(), 2 * m.rank());
        assert_eq!(k.f.to_string(), "x^2 + u*v");
        assert!(k.is_valid());
        // fresh names pick u1 when u is taken
        let mu = koszul_mf(&[poly("u")], &[poly("u")]).unwrap();
        let ku = knorrer_double(&mu).unwrap();
        assert_eq!(ku.f.to_string(), "u^2 + u1*v");
    }

    #[test]
    fn direct_sum_and_mismatch() {
        let m = koszul_mf(&[poly("x")], &[poly("x")]).unwrap();
        let s = m.direct_sum(&m).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(s.is_valid());
        let other = MatrixFactorization::trivial(poly("x^3"));
        assert!(m.direct_sum(&other).is_err());
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let m = koszul_mf(&[pxy("x"), pxy("y")], &[pxy("x"), pxy("y^2")]).unwrap();
        let js = m.to_json();
        let back = MatrixFactorization::from_json(&js, Field::Char0).unwrap();
        assert_eq!(back, m);
        // Corrupt one entry: the reader must reject.
        let bad = js.replace("y^2", "y^3");
        assert!(MatrixFactorization::from_json(&bad, Field::Char0).is_err());
    }
}
