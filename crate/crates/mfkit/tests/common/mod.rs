//! Independent oracles for the integration suites.
//!
//! Everything here recomputes quantities along a different route from the
//! library pipelines it checks: dense naive Gaussian elimination instead of
//! sparse fraction-free Bareiss, explicit polynomial matrix arithmetic
//! instead of slot-level differentials, and module-theoretic Ext from
//! presentations instead of Hom complexes. Shared ground: only the scalar
//! and polynomial substrate.

#![allow(dead_code)]

use mfkit::mf::MatrixFactorization;
use mfkit::poly::{Monomial, MultiPoly, PolyRing};
use mfkit::scalar::Scalar;
use std::collections::BTreeMap;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Dense naive Gaussian elimination (the rank oracle)
// ---------------------------------------------------------------------------

/// Plain row reduction over the field with partial pivoting; returns the rank.
pub fn naive_rank(mat: &mut Vec<Vec<Scalar>>) -> usize {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, p);
        let inv = mat[row][col].inv();
        for c in col..cols {
            mat[row][c] = mat[row][c].mul(&inv);
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..cols {
                    let t = factor.mul(&mat[row][c]);
                    mat[r][c] = mat[r][c].sub(&t);
                }
            }
        }
        row += 1;
        rank += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Monomials of exact weighted degree `d`.
pub fn monomials_of(ring: &Arc<PolyRing>, d: u64) -> Vec<Monomial> {
    fn rec(i: usize, rem: u64, w: &[u64], e: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == w.len() {
            if rem == 0 {
                out.push(Monomial(e.clone()));
            }
            return;
        }
        let mut k = 0u32;
        while k as u64 * w[i] <= rem {
            e[i] = k;
            rec(i + 1, rem - k as u64 * w[i], w, e, out);
            k += 1;
        }
        e[i] = 0;
    }
    let n = ring.arity();
    if n == 0 {
        return if d == 0 { vec![Monomial(vec![])] } else { vec![] };
    }
    let w = ring.weights.clone().unwrap_or_else(|| vec![1; n]);
    let mut out = Vec::new();
    rec(0, d, &w, &mut vec![0; n], &mut out);
    out
}

// ---------------------------------------------------------------------------
// Graded homology oracle for complexes of free modules
// ---------------------------------------------------------------------------

/// A free graded module: generator degrees per index.
pub struct FreeGraded {
    pub ring: Arc<PolyRing>,
    pub degs: Vec<i64>,
}

/// Dense matrix of a graded map between the degree-`t` pieces: rows indexed
/// by (target gen, monomial), columns by (source gen, monomial), entries from
/// a polynomial matrix; `step` is the internal degree the map adds.
pub fn graded_piece_matrix(
    src: &FreeGraded,
    tgt: &FreeGraded,
    map: &mfkit::matrix::PolyMatrix,
    t: i64,
    step: i64,
) -> (usize, usize, Vec<Vec<Scalar>>) {
    let src_basis: Vec<(usize, Monomial)> = src
        .degs
        .iter()
        .enumerate()
        .flat_map(|(g, &dg)| {
            let need = t - dg;
            if need < 0 {
                vec![]
            } else {
                monomials_of(&src.ring, need as u64)
                    .into_iter()
                    .map(move |m| (g, m))
                    .collect()
            }
        })
        .collect();
    let tgt_basis: Vec<(usize, Monomial)> = tgt
        .degs
        .iter()
        .enumerate()
        .flat_map(|(g, &dg)| {
            let need = t + step - dg;
            if need < 0 {
                vec![]
            } else {
                monomials_of(&tgt.ring, need as u64)
                    .into_iter()
                    .map(move |m| (g, m))
                    .collect()
            }
        })
        .collect();
    let index: BTreeMap<(usize, Monomial), usize> = tgt_basis
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    let mut dense = vec![vec![Scalar::from_int(0); src_basis.len()]; tgt_basis.len()];
    for (col, (g, m)) in src_basis.iter().enumerate() {
        for tg in 0..tgt.degs.len() {
            let entry = map.at(tg, *g);
            if entry.is_zero() {
                continue;
            }
            let prod = MultiPoly::monomial(&src.ring, m.clone(), Scalar::from_int(1)).mul(entry);
            for (mm, c) in &prod.terms {
                let row = index[&(tg, mm.clone())];
                dense[row][col] = dense[row][col].add(c);
            }
        }
    }
    (tgt_basis.len(), src_basis.len(), dense)
}

// ---------------------------------------------------------------------------
// Module Ext oracle from presentations
// ---------------------------------------------------------------------------

/// Graded coordinates of the module `coker(q : F0 -> F1)` in a fixed degree:
/// quotient of the degree-`d` piece of `F1` by the image of `q`.
/// Returns (total dim of the piece, a reduced echelon of the image rows, the
/// piece basis) so homomorphism spaces can be computed on top.
pub struct ModulePiece {
    pub basis: Vec<(usize, Monomial)>,
    /// Dense image rows after reduction (used for membership checks).
    pub image: Vec<Vec<Scalar>>,
    pub quotient_dim: usize,
}

/// Degree-`d` piece of `coker(q : F0 -> F1)` where `q` is homogeneous of
/// degree `h`: quotient of `(F1)_d` by `q((F0)_{d-h})`.
pub fn module_piece(
    ring: &Arc<PolyRing>,
    q: &mfkit::matrix::PolyMatrix,
    deg0: &[i64],
    deg1: &[i64],
    h: i64,
    d: i64,
) -> ModulePiece {
    let basis: Vec<(usize, Monomial)> = deg1
        .iter()
        .enumerate()
        .flat_map(|(g, &dg)| {
            let need = d - dg;
            if need < 0 {
                vec![]
            } else {
                monomials_of(ring, need as u64)
                    .into_iter()
                    .map(move |m| (g, m))
                    .collect()
            }
        })
        .collect();
    let index: BTreeMap<(usize, Monomial), usize> = basis
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (g0, &dg0) in deg0.iter().enumerate() {
        let need = d - h - dg0;
        if need < 0 {
            continue;
        }
        for m in monomials_of(ring, need as u64) {
            let mut row = vec![Scalar::from_int(0); basis.len()];
            for g1 in 0..deg1.len() {
                let entry = q.at(g1, g0);
                if entry.is_zero() {
                    continue;
                }
                let prod = MultiPoly::monomial(ring, m.clone(), Scalar::from_int(1)).mul(entry);
                for (mm, c) in &prod.terms {
                    let i = index[&(g1, mm.clone())];
                    row[i] = row[i].add(c);
                }
            }
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    let rank = naive_rank(&mut rows);
    rows.retain(|r| r.iter().any(|c| !c.is_zero()));
    let quotient_dim = basis.len() - rank;
    ModulePiece {
        basis,
        image: rows,
        quotient_dim,
    }
}

/// Reduces a dense vector modulo reduced image rows (in place).
pub fn reduce_by(rows: &[Vec<Scalar>], v: &mut [Scalar]) {
    for row in rows {
        let Some(lead) = row.iter().position(|c| !c.is_zero()) else {
            continue;
        };
        if v[lead].is_zero() {
            continue;
        }
        let factor = v[lead].div(&row[lead]);
        for (c, rv) in v.iter_mut().zip(row.iter()) {
            let t = factor.mul(rv);
            *c = c.sub(&t);
        }
    }
}

/// Rank of the precomposition map
/// `Hom(F1_m, N)_d -> Hom(F0_m, N)_{d+h}`, `phi -> phi . q_m`, in quotient
/// coordinates of `N = coker(q_n)`, together with the source and target
/// quotient dimensions.
fn precompose_rank(
    m: &MatrixFactorization,
    n: &MatrixFactorization,
    d: i64,
) -> (usize, usize, usize) {
    let gm = m.grading.as_ref().expect("graded source");
    let gn = n.grading.as_ref().expect("graded target");
    assert_eq!(gm.ring, gn.ring, "gradings must share weights");
    let h = gm.h;
    let ring = &gm.ring;
    let idmap: Vec<usize> = (0..ring.arity()).collect();
    let qm = m.q.lift_to(ring, &idmap);
    let qn = n.q.lift_to(ring, &idmap);
    let r = m.rank();

    let mut src_pieces = Vec::new();
    let mut src_dim = 0usize;
    for a in 0..r {
        let piece = module_piece(ring, &qn, &gn.deg0, &gn.deg1, gn.h, d + gm.deg1[a]);
        src_dim += piece.basis.len();
        src_pieces.push(piece);
    }
    let mut tgt_offsets = Vec::new();
    let mut tgt_pieces = Vec::new();
    let mut tgt_dim = 0usize;
    for b in 0..r {
        let piece = module_piece(ring, &qn, &gn.deg0, &gn.deg1, gn.h, d + h + gm.deg0[b]);
        tgt_offsets.push(tgt_dim);
        tgt_dim += piece.basis.len();
        tgt_pieces.push(piece);
    }

    // Columns of the ambient map, as dense target vectors.
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    for a in 0..r {
        for (g1, mono) in src_pieces[a].basis.iter() {
            let mut v = vec![Scalar::from_int(0); tgt_dim];
            for b in 0..r {
                let entry = qm.at(a, b);
                if entry.is_zero() {
                    continue;
                }
                let prod =
                    MultiPoly::monomial(ring, mono.clone(), Scalar::from_int(1)).mul(entry);
                let piece = &tgt_pieces[b];
                let index: BTreeMap<(usize, Monomial), usize> = piece
                    .basis
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, key)| (key, i))
                    .collect();
                for (mm, c) in &prod.terms {
                    let i = tgt_offsets[b] + index[&(*g1, mm.clone())];
                    v[i] = v[i].add(c);
                }
            }
            columns.push(v);
        }
    }
    let _ = src_dim;
    // Rank modulo the target images: rank[cols | images] - rank[images].
    let mut images_only: Vec<Vec<Scalar>> = Vec::new();
    for (b, piece) in tgt_pieces.iter().enumerate() {
        for img in &piece.image {
            let mut v = vec![Scalar::from_int(0); tgt_dim];
            for (i, c) in img.iter().enumerate() {
                v[tgt_offsets[b] + i] = c.clone();
            }
            images_only.push(v);
        }
    }
    let mut with_images = columns;
    with_images.extend(images_only.iter().cloned());
    let rank_with = naive_rank(&mut with_images);
    let rank_images = naive_rank(&mut images_only);
    let map_rank = rank_with - rank_images;
    let src_q: usize = src_pieces.iter().map(|p| p.quotient_dim).sum();
    let tgt_q: usize = tgt_pieces.iter().map(|p| p.quotient_dim).sum();
    (src_q, tgt_q, map_rank)
}

/// Graded dims `(Hom_d, Ext1_d)` of the pushforward modules:
/// `Hom_d = ker[Hom(F1,N)_d -> Hom(F0,N)_{d+h}]` and
/// `Ext1_d = coker[Hom(F1,N)_{d-h} -> Hom(F0,N)_d]`.
pub fn module_ext_piece(
    m: &MatrixFactorization,
    n: &MatrixFactorization,
    d: i64,
) -> (usize, usize) {
    let h = m.grading.as_ref().expect("graded").h;
    let (src_q, _, rank_here) = precompose_rank(m, n, d);
    let (_, tgt_q, rank_below) = precompose_rank(m, n, d - h);
    (src_q - rank_here, tgt_q - rank_below)
}

/// Sums the per-degree module Ext dims over a degree range.
pub fn module_ext_range(
    m: &MatrixFactorization,
    n: &MatrixFactorization,
    lo: i64,
    hi: i64,
) -> (usize, usize) {
    let mut hom = 0;
    let mut ext1 = 0;
    for d in lo..=hi {
        let (h, e) = module_ext_piece(m, n, d);
        hom += h;
        ext1 += e;
    }
    (hom, ext1)
}

// ---------------------------------------------------------------------------
// Signed permutation intertwiners between matrix factorizations
// ---------------------------------------------------------------------------

/// Searches for a signed permutation `(T0, T1)` with
/// `T0 p_A = p_B T1` and `T1 q_A = q_B T0`: an isomorphism of factorizations
/// given by basis relabeling and signs. Backtracking over images of the
/// even basis; practical for ranks up to about 8.
pub fn find_signed_permutation(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
) -> Option<(Vec<(usize, i64)>, Vec<(usize, i64)>)> {
    let r = a.rank();
    if b.rank() != r {
        return None;
    }
    // state: t0[i] = Some((image index, sign)), same for t1
    let mut t0: Vec<Option<(usize, i64)>> = vec![None; r];
    let mut t1: Vec<Option<(usize, i64)>> = vec![None; r];
    let mut used0 = vec![false; r];
    let mut used1 = vec![false; r];
    if backtrack(a, b, &mut t0, &mut t1, &mut used0, &mut used1) {
        Some((
            t0.into_iter().map(|x| x.unwrap()).collect(),
            t1.into_iter().map(|x| x.unwrap()).collect(),
        ))
    } else {
        None
    }
}

fn backtrack(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t0: &mut Vec<Option<(usize, i64)>>,
    t1: &mut Vec<Option<(usize, i64)>>,
    used0: &mut Vec<bool>,
    used1: &mut Vec<bool>,
) -> bool {
    let r = a.rank();
    // next unassigned even index
    let Some(i) = (0..r).find(|&i| t0[i].is_none()) else {
        // all assigned: t1 must be complete too (propagation fills it)
        if t1.iter().any(|x| x.is_none()) {
            return false;
        }
        return check_intertwine(a, b, t0, t1);
    };
    for img in 0..r {
        if used0[img] {
            continue;
        }
        for sign in [1i64, -1] {
            t0[i] = Some((img, sign));
            used0[img] = true;
            // propagate through q: column i of q_A vs column img of q_B
            if propagate(a, b, t0, t1, used1)
                && backtrack(a, b, t0, t1, used0, used1)
            {
                return true;
            }
            // undo propagation: clear t1 entries derivable only from t0;
            // simplest correct undo: recompute t1 from scratch on the next
            // attempt. Reset everything not forced by assigned t0 entries.
            t0[i] = None;
            used0[img] = false;
            rebuild_t1(a, b, t0, t1, used1);
        }
    }
    false
}

/// Fills `t1` entries forced by assigned `t0` entries (via nonzero q
/// columns); false on contradiction.
fn propagate(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t0: &[Option<(usize, i64)>],
    t1: &mut Vec<Option<(usize, i64)>>,
    used1: &mut Vec<bool>,
) -> bool {
    let r = a.rank();
    // q_A : V0 -> V1. T1 q_A = q_B T0: column i: T1 (qA e_i) = sign * qB e_img.
    for i in 0..r {
        let Some((img, sign)) = t0[i] else { continue };
        for row in 0..r {
            let entry = a.q.at(row, i);
            if entry.is_zero() {
                continue;
            }
            // T1 maps basis `row` to some (row', s'): need
            // s' * entry = sign * qB[row', img] for a unique row'.
            let mut matched = false;
            for rowp in 0..r {
                let target = b.q.at(rowp, img);
                if target.is_zero() {
                    continue;
                }
                let s_entry = entry.scale(&Scalar::from_int(1));
                let plus = target.clone();
                let minus = target.neg();
                let want = if *entry == plus.scale(&Scalar::from_int(sign)) {
                    Some(1)
                } else if s_entry == minus.scale(&Scalar::from_int(sign)) {
                    Some(-1)
                } else {
                    None
                };
                if let Some(s1) = want {
                    match t1[row] {
                        None => {
                            if used1[rowp] {
                                continue;
                            }
                            t1[row] = Some((rowp, s1));
                            used1[rowp] = true;
                            matched = true;
                            break;
                        }
                        Some((have, hs)) => {
                            if have == rowp && hs == s1 {
                                matched = true;
                                break;
                            }
                        }
                    }
                }
            }
            if !matched {
                return false;
            }
        }
    }
    true
}

fn rebuild_t1(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t0: &[Option<(usize, i64)>],
    t1: &mut Vec<Option<(usize, i64)>>,
    used1: &mut Vec<bool>,
) {
    for x in t1.iter_mut() {
        *x = None;
    }
    for u in used1.iter_mut() {
        *u = false;
    }
    let _ = propagate(a, b, t0, t1, used1);
}

fn check_intertwine(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    t0: &[Option<(usize, i64)>],
    t1: &[Option<(usize, i64)>],
) -> bool {
    use mfkit::matrix::PolyMatrix;
    let ring = a.ring();
    let r = a.rank();
    let perm = |t: &[Option<(usize, i64)>]| -> PolyMatrix {
        PolyMatrix::from_fn(ring, r, r, |i, j| {
            match t[j] {
                Some((img, sign)) if img == i => {
                    MultiPoly::constant(ring, Scalar::from_int(sign))
                }
                _ => MultiPoly::zero(ring),
            }
        })
    };
    let m0 = perm(t0);
    let m1 = perm(t1);
    m0.mul(&a.p) == b.p.mul(&m1) && m1.mul(&a.q) == b.q.mul(&m0)
}

// ---------------------------------------------------------------------------
// Shared constructors
// ---------------------------------------------------------------------------

pub fn poly(s: &str) -> MultiPoly {
    mfkit::parse::parse_poly(s, mfkit::scalar::Field::Char0).unwrap()
}

pub fn poly_in(s: &str, ring: &Arc<PolyRing>) -> MultiPoly {
    mfkit::parse::parse_poly_in(s, mfkit::scalar::Field::Char0, ring).unwrap()
}

pub fn srf(s: &str) -> MatrixFactorization {
    mfkit::mf::stabilized_residue_field(&mfkit::mf::LGPair::new(poly(s))).unwrap()
}

pub fn trivial(s: &str) -> MatrixFactorization {
    MatrixFactorization::trivial(poly(s))
}

/// Thom-Sebastiani sum of two superpotentials on disjoint fresh variables.
pub fn box_plus(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let mut vars: Vec<String> = f.ring.vars.clone();
    for v in &g.ring.vars {
        let mut name = v.clone();
        let mut k = 0;
        while vars.contains(&name) {
            k += 1;
            name = format!("{v}{k}");
        }
        vars.push(name);
    }
    let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let merged = PolyRing::new(&refs);
    let fmap: Vec<usize> = (0..f.ring.arity()).collect();
    let gmap: Vec<usize> = (f.ring.arity()..f.ring.arity() + g.ring.arity()).collect();
    f.lift_to(&merged, &fmap).add(&g.lift_to(&merged, &gmap))
}
