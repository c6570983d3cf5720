//! Fraction-free exact linear algebra over `Scalar`.
//!
//! One backend for every rank/kernel/determinant question in the crate:
//! sparse row-echelon reduction with the Bareiss one-step update
//! `new = (piv * old - a * b) / prev_piv`, whose divisions are exact over any
//! integral domain (entries stay subdeterminants of the input), and are of
//! course exact over our coefficient fields. No rounding anywhere.

use crate::scalar::Scalar;

/// Rank and kernel of a scalar matrix in one call: the advertised entry
/// point of the elimination backend.
pub fn exact_rank_kernel(m: &ScalarMat) -> (usize, Vec<Vec<Scalar>>) {
    let ech = m.echelon();
    (ech.rank(), ech.kernel())
}

/// Sparse matrix: per-row sorted `(col, value)` lists.
#[derive(Debug, Clone)]
pub struct ScalarMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Vec<(usize, Scalar)>>,
}

impl ScalarMat {
    pub fn new(rows: usize, cols: usize) -> Self {
        ScalarMat {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn from_dense(entries: &[Vec<i64>]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map(|r| r.len()).unwrap_or(0);
        let mut m = Self::new(rows, cols);
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.data[i].push((j, Scalar::from_int(v)));
                }
            }
        }
        m
    }

    /// Accumulates `val` into entry `(i, j)`.
    pub fn add_entry(&mut self, i: usize, j: usize, val: Scalar) {
        if val.is_zero() {
            return;
        }
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => {
                let s = row[k].1.add(&val);
                if s.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = s;
                }
            }
            Err(k) => row.insert(k, (j, val)),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.data[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.data[i][k].1.clone())
            .unwrap_or_else(|_| Scalar::from_int(0))
    }

    pub fn transpose(&self) -> ScalarMat {
        let mut t = ScalarMat::new(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                t.data[*j].push((i, v.clone()));
            }
        }
        t
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    /// Fraction-free row echelon form.
    pub fn echelon(&self) -> Echelon {
        let mut rows: Vec<(usize, Vec<(usize, Scalar)>)> = self
            .data
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(i, r)| (i, r.clone()))
            .collect();
        let mut pivots: Vec<(usize, Vec<(usize, Scalar)>)> = Vec::new();
        let mut pivot_origins: Vec<usize> = Vec::new();
        let mut prev_piv = Scalar::from_int(1);

        while !rows.is_empty() {
            // Column of the global leading entry; pivot columns come out in
            // strictly increasing order.
            let col = rows.iter().map(|(_, r)| r[0].0).min().unwrap();
            // Pivot choice: unit leading coefficient if possible, then fewest
            // nonzeros, then smallest coefficient; keeps fill-in and growth down.
            let mut best: Option<(usize, (u8, usize, u64))> = None;
            for (i, (_, r)) in rows.iter().enumerate() {
                if r[0].0 != col {
                    continue;
                }
                let key = (u8::from(!r[0].1.abs_is_one()), r.len(), r[0].1.bit_size());
                if best.as_ref().map(|(_, k)| key < *k).unwrap_or(true) {
                    best = Some((i, key));
                }
            }
            let (pi, _) = best.unwrap();
            let (orig, piv_row) = rows.swap_remove(pi);
            let piv = piv_row[0].1.clone();

            for (_, r) in rows.iter_mut() {
                if r[0].0 == col {
                    let a = r[0].1.clone();
                    *r = row_combine(&piv, r, &a, &piv_row, &prev_piv);
                } else {
                    // Bareiss rescales untouched rows too; the divisions stay
                    // exact (entries remain minors of the input).
                    for (_, v) in r.iter_mut() {
                        *v = piv.mul(v).div(&prev_piv);
                    }
                }
            }
            rows.retain(|(_, r)| !r.is_empty());
            prev_piv = piv;
            pivots.push((col, piv_row));
            pivot_origins.push(orig);
        }

        // Sign of the row permutation (pivot order vs. original order).
        let mut sign_flips = 0usize;
        for i in 0..pivot_origins.len() {
            for j in (i + 1)..pivot_origins.len() {
                if pivot_origins[i] > pivot_origins[j] {
                    sign_flips += 1;
                }
            }
        }

        Echelon {
            cols: self.cols,
            pivots,
            last_pivot: prev_piv,
            sign_flips,
        }
    }

    /// Rank by sparse fraction-free elimination with Markowitz pivoting.
    ///
    /// Same Bareiss one-step update as [`ScalarMat::echelon`], with the
    /// previous-pivot division tracked per row (rows untouched by a step keep
    /// their old divisor), which is what makes free pivot choice possible.
    /// Pivot selection minimizes (row fill) x (column fill), preferring unit
    /// entries, so the Koszul-structured matrices this crate produces
    /// eliminate with very little fill-in.
    pub fn rank(&self) -> usize {
        // (row entries, divisor for the next update touching this row)
        let mut rows: Vec<Option<(Vec<(usize, Scalar)>, Scalar)>> = self
            .data
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| Some((r.clone(), Scalar::from_int(1))))
            .collect();
        let mut col_count = vec![0usize; self.cols];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); self.cols];
        for (i, row) in rows.iter().enumerate() {
            if let Some((r, _)) = row {
                for (c, _) in r {
                    col_count[*c] += 1;
                    col_rows[*c].push(i);
                }
            }
        }
        let mut rank = 0usize;
        loop {
            // Markowitz: minimize (row_nnz - 1) * (col_nnz - 1); units first.
            let mut best: Option<(usize, usize, (u8, usize, u64))> = None;
            for (i, row) in rows.iter().enumerate() {
                let Some((r, _)) = row else { continue };
                for (c, v) in r {
                    let key = (
                        u8::from(!v.abs_is_one()),
                        (r.len() - 1) * (col_count[*c].saturating_sub(1)),
                        v.bit_size(),
                    );
                    if best.as_ref().map(|(_, _, k)| key < *k).unwrap_or(true) {
                        best = Some((i, *c, key));
                    }
                }
            }
            let Some((pi, pc, _)) = best else { break };
            let (piv_row, _piv_prev) = rows[pi].take().unwrap();
            for (c, _) in &piv_row {
                col_count[*c] -= 1;
            }
            let piv = piv_row
                .iter()
                .find(|(c, _)| c == &pc)
                .unwrap()
                .1
                .clone();
            rank += 1;

            let mut victims: Vec<usize> = col_rows[pc]
                .iter()
                .copied()
                .filter(|&i| {
                    rows[i]
                        .as_ref()
                        .map(|(r, _)| r.binary_search_by_key(&pc, |&(c, _)| c).is_ok())
                        .unwrap_or(false)
                })
                .collect();
            victims.sort_unstable();
            victims.dedup();
            col_rows[pc].clear();
            for i in victims {
                let (r, prev) = rows[i].take().unwrap();
                let a = r
                    .iter()
                    .find(|(c, _)| c == &pc)
                    .unwrap()
                    .1
                    .clone();
                for (c, _) in &r {
                    col_count[*c] -= 1;
                }
                let combined = row_combine(&piv, &r, &a, &piv_row, &prev);
                if !combined.is_empty() {
                    for (c, _) in &combined {
                        col_count[*c] += 1;
                        col_rows[*c].push(i);
                    }
                    rows[i] = Some((combined, piv.clone()));
                }
            }
        }
        rank
    }

    /// Kernel basis, as dense coordinate vectors.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        self.echelon().kernel()
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return Scalar::from_int(1);
        }
        let ech = self.echelon();
        if ech.rank() < self.rows {
            return Scalar::from_int(0);
        }
        // With the Bareiss update the last pivot is det up to the swap sign.
        let d = ech.last_pivot.clone();
        if ech.sign_flips % 2 == 1 {
            d.neg()
        } else {
            d
        }
    }
}

/// `(piv * target - a * source) / prev`, merging sparse rows. The leading
/// entry of `target` (same column as `source`) cancels by construction.
fn row_combine(
    piv: &Scalar,
    target: &[(usize, Scalar)],
    a: &Scalar,
    source: &[(usize, Scalar)],
    prev: &Scalar,
) -> Vec<(usize, Scalar)> {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < target.len() || j < source.len() {
        let ct = target.get(i).map(|&(c, _)| c);
        let cs = source.get(j).map(|&(c, _)| c);
        match (ct, cs) {
            (Some(c1), Some(c2)) if c1 == c2 => {
                let v = piv.mul(&target[i].1).sub(&a.mul(&source[j].1)).div(prev);
                if !v.is_zero() {
                    out.push((c1, v));
                }
                i += 1;
                j += 1;
            }
            (Some(c1), Some(c2)) if c1 < c2 => {
                out.push((c1, piv.mul(&target[i].1).div(prev)));
                i += 1;
            }
            (Some(_), Some(c2)) => {
                out.push((c2, a.mul(&source[j].1).div(prev).neg()));
                j += 1;
            }
            (Some(c1), None) => {
                out.push((c1, piv.mul(&target[i].1).div(prev)));
                i += 1;
            }
            (None, Some(c2)) => {
                out.push((c2, a.mul(&source[j].1).div(prev).neg()));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Result of fraction-free elimination: pivot rows, pivot columns strictly
/// increasing in discovery order.
pub struct Echelon {
    cols: usize,
    pivots: Vec<(usize, Vec<(usize, Scalar)>)>,
    last_pivot: Scalar,
    sign_flips: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.iter().map(|&(c, _)| c).collect()
    }

    /// Columns without a pivot, i.e. indices of the quotient/kernel basis.
    pub fn free_columns(&self) -> Vec<usize> {
        let piv = self.pivot_columns();
        (0..self.cols).filter(|c| !piv.contains(c)).collect()
    }

    /// One kernel vector per free column, by back-substitution.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let zero = Scalar::from_int(0);
        let mut basis = Vec::new();
        for &free in &self.free_columns() {
            let mut v = vec![zero.clone(); self.cols];
            v[free] = Scalar::from_int(1);
            for (c, row) in self.pivots.iter().rev() {
                let mut acc = zero.clone();
                for (j, coef) in row.iter().skip(1) {
                    if !v[*j].is_zero() {
                        acc = acc.add(&coef.mul(&v[*j]));
                    }
                }
                if !acc.is_zero() {
                    v[*c] = acc.div(&row[0].1).neg();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Reduces `v` modulo the row span: the result vanishes on pivot columns.
    pub fn reduce(&self, v: &mut Vec<Scalar>) {
        for (c, row) in self.pivots.iter() {
            if v[*c].is_zero() {
                continue;
            }
            let factor = v[*c].div(&row[0].1);
            for (j, coef) in row.iter() {
                let t = factor.mul(coef);
                v[*j] = v[*j].sub(&t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank_and_empty_kernel() {
        let m = ScalarMat::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(m.rank(), 3);
        assert!(m.kernel().is_empty());
    }

    #[test]
    fn proportional_rows() {
        // [[1,2],[2,4]]: rank 1, kernel spanned by (2, -1) up to scale.
        let m = ScalarMat::from_dense(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        // Check m v = 0 and v proportional to (2, -1).
        assert!(v[0].mul(&Scalar::from_int(1)).add(&v[1].mul(&Scalar::from_int(2))).is_zero());
        let cross = v[0].mul(&Scalar::from_int(-1)).sub(&v[1].mul(&Scalar::from_int(2)));
        assert!(cross.is_zero());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = ScalarMat::from_dense(&[
            vec![2, 3, 5, 7, 1, 0, 2, 4],
            vec![1, 0, 0, 2, 9, 3, 1, 1],
            vec![0, 1, 4, 4, 2, 2, 0, 3],
            vec![3, 3, 5, 9, 10, 3, 3, 5],
            vec![1, 1, 1, 1, 1, 1, 1, 1],
            vec![0, 0, 2, 0, 0, 5, 0, 0],
        ]);
        let ech = m.echelon();
        let ker = ech.kernel();
        assert_eq!(ech.rank() + ker.len(), 8);
        for v in &ker {
            for i in 0..m.rows {
                let mut acc = Scalar::from_int(0);
                for j in 0..m.cols {
                    acc = acc.add(&m.entry(i, j).mul(&v[j]));
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn determinant_small() {
        let m = ScalarMat::from_dense(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(m.det(), Scalar::from_int(1));
        let s = ScalarMat::from_dense(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(s.det(), Scalar::from_int(-1));
        let z = ScalarMat::from_dense(&[vec![1, 2], vec![2, 4]]);
        assert!(z.det().is_zero());
    }
}
