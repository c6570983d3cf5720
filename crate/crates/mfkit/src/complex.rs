//! Degree-truncated homology of 2-periodic complexes.
//!
//! Everything downstream (Ext of matrix factorizations, twisted de Rham
//! complexes, Clifford endomorphism algebras) presents itself as a Z/2-graded
//! complex of free modules over a polynomial ring. A complex is described by
//! "slots" (module generators, with an internal degree shift) and a
//! differential that sends a slot times a monomial to an exact polynomial
//! combination of slots.
//!
//! Two evaluation strategies, one certificate:
//!
//! * graded: when the differential is homogeneous of a fixed internal degree,
//!   the complex splits into finite pieces indexed by internal degree, each
//!   computed exactly;
//! * windowed: otherwise, cycles are exact kernels on a degree window and
//!   boundaries are intersected with the window from a slightly larger one.
//!
//! In both modes the reported dimensions come with a stabilization
//! certificate: the running totals must agree at `window` consecutive degree
//! bounds. The tool never claims exactness without the certificate.

use crate::linalg::ScalarMat;
use crate::poly::{Monomial, MultiPoly, PolyRing};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// A Z/2-graded complex of free modules over a polynomial ring.
///
/// Implementors provide the slot layout and the differential; the engine does
/// the truncated linear algebra.
pub trait TwoPeriodicComplex {
    fn ring(&self) -> &Arc<PolyRing>;

    /// Number of free-module generators in the given parity.
    fn slot_count(&self, par: Parity) -> usize;

    /// Internal degree of a generator.
    fn slot_shift(&self, par: Parity, slot: usize) -> i64;

    /// Image of `mono * e_slot` under the differential, as pairs
    /// `(target slot, polynomial coefficient)`. Targets live in the opposite
    /// parity.
    fn apply(&self, par: Parity, slot: usize, mono: &Monomial) -> Vec<(usize, MultiPoly)>;

    /// `Some(h)` when the differential is homogeneous: every image term of an
    /// element of internal degree `t` has internal degree exactly `t + h`.
    fn degree_step(&self) -> Option<i64>;

    /// Upper bound on how much the differential can raise internal degree
    /// (used to size windows in the non-graded mode).
    fn degree_raise_bound(&self) -> i64;

    /// Optional single homogeneous modulus: coefficients live in
    /// `P/(modulus)`, represented by monomials not divisible by its leading
    /// term.
    fn modulus(&self) -> Option<&MultiPoly> {
        None
    }
}

/// Outcome of a truncation sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySweep {
    pub even: usize,
    pub odd: usize,
    /// Dimensions agreed at `window` consecutive bounds.
    pub stabilized: bool,
    /// Degree bound actually used (last bound of the certificate window).
    pub d_used: i64,
}

/// An ordered basis of a degree-truncated free-module piece: labels are
/// (slot, monomial) pairs; linear maps against it are plain scalar matrices.
/// Built per internal degree (graded mode) or per degree window.
pub struct TruncatedVectorSpace {
    labels: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
}

impl TruncatedVectorSpace {
    fn new() -> Self {
        TruncatedVectorSpace {
            labels: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn push(&mut self, slot: usize, mono: Monomial) {
        let key = (slot, mono.clone());
        if !self.index.contains_key(&key) {
            self.index.insert(key, self.labels.len());
            self.labels.push((slot, mono));
        }
    }

    pub fn labels(&self) -> &[(usize, Monomial)] {
        &self.labels
    }

    pub fn position(&self, slot: usize, mono: &Monomial) -> Option<usize> {
        self.index.get(&(slot, mono.clone())).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

// Basis labels stay unique by construction; every assembled matrix gets its
// dimensions from the source/target bases.
type Basis = TruncatedVectorSpace;

/// Enumerates monomials of exact weighted degree `d`, with exponents filtered
/// so that no monomial is divisible by `excluded` (the reduced basis of a
/// quotient by one homogeneous polynomial).
fn monomials_of_degree(
    ring: &PolyRing,
    d: u64,
    excluded: Option<&Monomial>,
    out: &mut Vec<Monomial>,
) {
    let n = ring.arity();
    let weights: Vec<u64> = match &ring.weights {
        Some(w) => w.clone(),
        None => vec![1; n],
    };
    let mut exps = vec![0u32; n];
    fn rec(
        i: usize,
        rem: u64,
        weights: &[u64],
        exps: &mut Vec<u32>,
        excluded: Option<&Monomial>,
        out: &mut Vec<Monomial>,
    ) {
        if i == weights.len() {
            if rem == 0 {
                let m = Monomial(exps.clone());
                if excluded.map(|e| !e.divides(&m)).unwrap_or(true) {
                    out.push(m);
                }
            }
            return;
        }
        let mut e = 0u32;
        loop {
            let used = e as u64 * weights[i];
            if used > rem {
                break;
            }
            exps[i] = e;
            rec(i + 1, rem - used, weights, exps, excluded, out);
            e += 1;
        }
        exps[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(Monomial(vec![]));
        }
        return;
    }
    rec(0, d, &weights, &mut exps, excluded, out);
}

fn excluded_monomial(cpx: &dyn TwoPeriodicComplex) -> Option<Monomial> {
    cpx.modulus().map(|q| {
        q.leading()
            .expect("modulus must be nonzero")
            .0
            .clone()
    })
}

/// Reduces an image polynomial into basis coordinates, applying the modulus
/// reduction when present.
fn push_image(
    cpx: &dyn TwoPeriodicComplex,
    target: &mut Basis,
    mat: &mut Vec<(usize, usize, crate::scalar::Scalar)>,
    col: usize,
    slot: usize,
    poly: &MultiPoly,
) {
    let reduced = match cpx.modulus() {
        Some(q) => poly.reduce_mod(q),
        None => poly.clone(),
    };
    for (m, c) in &reduced.terms {
        target.push(slot, m.clone());
        let row = target.index[&(slot, m.clone())];
        mat.push((row, col, c.clone()));
    }
}

/// Basis of the given parity at exact internal degree `t`.
fn basis_at_degree(cpx: &dyn TwoPeriodicComplex, par: Parity, t: i64) -> Basis {
    let mut basis = Basis::new();
    let excl = excluded_monomial(cpx);
    let mut monos = Vec::new();
    for slot in 0..cpx.slot_count(par) {
        let need = t - cpx.slot_shift(par, slot);
        if need < 0 {
            continue;
        }
        monos.clear();
        monomials_of_degree(cpx.ring(), need as u64, excl.as_ref(), &mut monos);
        for m in monos.drain(..) {
            basis.push(slot, m);
        }
    }
    basis
}

/// Basis of the given parity with internal degree at most `bound`.
fn basis_up_to(cpx: &dyn TwoPeriodicComplex, par: Parity, bound: i64) -> Basis {
    let mut basis = Basis::new();
    let excl = excluded_monomial(cpx);
    let mut monos = Vec::new();
    for slot in 0..cpx.slot_count(par) {
        let shift = cpx.slot_shift(par, slot);
        let mut d = 0i64;
        while shift + d <= bound {
            monos.clear();
            monomials_of_degree(cpx.ring(), d as u64, excl.as_ref(), &mut monos);
            for m in monos.drain(..) {
                basis.push(slot, m);
            }
            d += 1;
        }
    }
    basis
}

fn shift_range(cpx: &dyn TwoPeriodicComplex) -> (i64, i64) {
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for par in [Parity::Even, Parity::Odd] {
        for s in 0..cpx.slot_count(par) {
            lo = lo.min(cpx.slot_shift(par, s));
            hi = hi.max(cpx.slot_shift(par, s));
        }
    }
    if lo == i64::MAX {
        (0, 0)
    } else {
        (lo, hi)
    }
}

fn max_weight(ring: &PolyRing) -> i64 {
    ring.weights
        .as_ref()
        .and_then(|w| w.iter().max().copied())
        .unwrap_or(1) as i64
}

/// Graded mode: rank of the differential out of the degree-`t` piece.
fn graded_rank(cpx: &dyn TwoPeriodicComplex, par: Parity, t: i64, h: i64) -> (usize, usize) {
    let src = basis_at_degree(cpx, par, t);
    if src.len() == 0 {
        return (0, 0);
    }
    let mut tgt = basis_at_degree(cpx, par.flip(), t + h);
    let mut triplets = Vec::new();
    for (col, (slot, mono)) in src.labels.iter().enumerate() {
        for (tslot, poly) in cpx.apply(par, *slot, mono) {
            push_image(cpx, &mut tgt, &mut triplets, col, tslot, &poly);
        }
    }
    let mut mat = ScalarMat::new(tgt.len(), src.len());
    for (r, c, v) in triplets {
        mat.add_entry(r, c, v);
    }
    (src.len(), mat.rank())
}

/// Windowed mode: (dim of cycles in degree <= bound, dim of boundaries of
/// degree <= bound coming from sources of degree <= bound + slack).
fn window_cycles_boundaries(
    cpx: &dyn TwoPeriodicComplex,
    par: Parity,
    bound: i64,
    slack: i64,
) -> (usize, usize) {
    // Cycles: exact kernel of d restricted to the window (images untruncated).
    let src = basis_up_to(cpx, par, bound);
    let cycles = if src.len() == 0 {
        0
    } else {
        let mut tgt = Basis::new();
        let mut triplets = Vec::new();
        for (col, (slot, mono)) in src.labels.iter().enumerate() {
            for (tslot, poly) in cpx.apply(par, *slot, mono) {
                push_image(cpx, &mut tgt, &mut triplets, col, tslot, &poly);
            }
        }
        let mut mat = ScalarMat::new(tgt.len(), src.len());
        for (r, c, v) in triplets {
            mat.add_entry(r, c, v);
        }
        src.len() - mat.rank()
    };

    // Boundaries landing inside the window, from a larger source window:
    // dim(im ∩ window) = rank(d) - rank(project-above-window . d).
    let wide = basis_up_to(cpx, par.flip(), bound + slack);
    let boundaries = if wide.len() == 0 {
        0
    } else {
        let mut tgt = Basis::new();
        let mut triplets = Vec::new();
        for (col, (slot, mono)) in wide.labels.iter().enumerate() {
            for (tslot, poly) in cpx.apply(par.flip(), *slot, mono) {
                push_image(cpx, &mut tgt, &mut triplets, col, tslot, &poly);
            }
        }
        let mut full = ScalarMat::new(tgt.len(), wide.len());
        let mut high = ScalarMat::new(tgt.len(), wide.len());
        for (r, c, v) in triplets {
            let (slot, mono) = &tgt.labels[r];
            let deg = mono.weighted_degree(cpx.ring().weights.as_deref()) as i64
                + cpx.slot_shift(par, *slot);
            full.add_entry(r, c, v.clone());
            if deg > bound {
                high.add_entry(r, c, v);
            }
        }
        full.rank() - high.rank()
    };
    (cycles, boundaries)
}

/// Sweeps degree bounds until the per-parity totals are unchanged at enough
/// consecutive bounds, or the budget runs out.
///
/// `d_budget` is a plain-degree budget: the internal-degree cap scales it by
/// the largest variable weight and starts past the highest generator shift,
/// so weighted rings get comparable monomial coverage.
pub fn homology_dims(cpx: &dyn TwoPeriodicComplex, d_budget: i64, window: usize) -> HomologySweep {
    sweep(cpx, d_budget, window, true)
}

/// Same as [`homology_dims`] but never exits early; use when several related
/// sweeps must be truncated at exactly the same bound (e.g. the beta-level
/// family feeding one module fit).
pub fn homology_dims_full(
    cpx: &dyn TwoPeriodicComplex,
    d_budget: i64,
    window: usize,
) -> HomologySweep {
    sweep(cpx, d_budget, window, false)
}

/// Raw graded totals over an explicit internal-degree range, no certificate.
/// Panics if the complex is not graded; meant for cross-pipeline comparisons
/// where both sides must truncate identically.
pub fn homology_dims_range(cpx: &dyn TwoPeriodicComplex, lo: i64, hi: i64) -> (usize, usize) {
    let h = cpx
        .degree_step()
        .expect("range evaluation needs a graded complex");
    let mut rank_cache: HashMap<(Parity, i64), (usize, usize)> = HashMap::new();
    let mut totals = (0usize, 0usize);
    for t in lo..=hi {
        for par in [Parity::Even, Parity::Odd] {
            let (dim, rank_out) = *rank_cache
                .entry((par, t))
                .or_insert_with(|| graded_rank(cpx, par, t, h));
            let (_, rank_in) = *rank_cache
                .entry((par.flip(), t - h))
                .or_insert_with(|| graded_rank(cpx, par.flip(), t - h, h));
            let hom = dim
                .checked_sub(rank_out)
                .and_then(|k| k.checked_sub(rank_in))
                .expect("differential does not square to zero");
            match par {
                Parity::Even => totals.0 += hom,
                Parity::Odd => totals.1 += hom,
            }
        }
    }
    totals
}

/// The internal-degree floor and cap a sweep with the given budget would use.
pub fn sweep_range(cpx: &dyn TwoPeriodicComplex, d_budget: i64, window: usize) -> (i64, i64) {
    let (t_min, t_max_shift) = shift_range(cpx);
    (
        t_min,
        t_max_shift + window as i64 + d_budget * max_weight(cpx.ring()),
    )
}

fn sweep(
    cpx: &dyn TwoPeriodicComplex,
    d_budget: i64,
    window: usize,
    early_exit: bool,
) -> HomologySweep {
    let (t_min, t_max_shift) = shift_range(cpx);
    let cap = t_max_shift + window as i64 + d_budget * max_weight(cpx.ring());
    match cpx.degree_step() {
        Some(h) => graded_sweep(cpx, h, t_min, t_max_shift, cap, window, early_exit),
        None => window_sweep(cpx, t_min, t_max_shift, cap, window, early_exit),
    }
}

fn graded_sweep(
    cpx: &dyn TwoPeriodicComplex,
    h: i64,
    t_min: i64,
    max_shift: i64,
    cap: i64,
    window: usize,
    early_exit: bool,
) -> HomologySweep {
    // Zero-contribution run needed before an early exit, and the degree floor
    // below which runs do not count (low degrees are legitimately quiet
    // before any slot has monomials).
    let run_needed = window as i64 + h.abs();
    let floor = max_shift + run_needed;
    let mut rank_cache: HashMap<(Parity, i64), (usize, usize)> = HashMap::new();
    let mut totals = (0usize, 0usize);
    let mut run = 0i64;
    let mut t = t_min;
    while t <= cap {
        let mut contrib = (0usize, 0usize);
        for par in [Parity::Even, Parity::Odd] {
            let (dim, rank_out) = *rank_cache
                .entry((par, t))
                .or_insert_with(|| graded_rank(cpx, par, t, h));
            let (_, rank_in) = *rank_cache
                .entry((par.flip(), t - h))
                .or_insert_with(|| graded_rank(cpx, par.flip(), t - h, h));
            let hom = dim
                .checked_sub(rank_out)
                .and_then(|k| k.checked_sub(rank_in))
                .expect("differential does not square to zero");
            match par {
                Parity::Even => contrib.0 += hom,
                Parity::Odd => contrib.1 += hom,
            }
        }
        totals.0 += contrib.0;
        totals.1 += contrib.1;
        run = if contrib == (0, 0) { run + 1 } else { 0 };
        if early_exit && run >= run_needed && t >= floor {
            return HomologySweep {
                even: totals.0,
                odd: totals.1,
                stabilized: true,
                d_used: t,
            };
        }
        t += 1;
    }
    HomologySweep {
        even: totals.0,
        odd: totals.1,
        stabilized: run >= run_needed,
        d_used: cap,
    }
}

fn window_sweep(
    cpx: &dyn TwoPeriodicComplex,
    t_min: i64,
    max_shift: i64,
    cap: i64,
    window: usize,
    early_exit: bool,
) -> HomologySweep {
    let slack = cpx.degree_raise_bound() + 1;
    let run_needed = window.max(2);
    let floor = max_shift + slack + run_needed as i64;
    let mut history: Vec<(usize, usize)> = Vec::new();
    let mut bound = t_min;
    while bound <= cap {
        let (zc_e, bd_e) = window_cycles_boundaries(cpx, Parity::Even, bound, slack);
        let (zc_o, bd_o) = window_cycles_boundaries(cpx, Parity::Odd, bound, slack);
        let dims = (zc_e - bd_e, zc_o - bd_o);
        history.push(dims);
        let settled = history.len() >= run_needed
            && history[history.len() - run_needed..].iter().all(|&d| d == dims);
        if early_exit && settled && bound >= floor {
            return HomologySweep {
                even: dims.0,
                odd: dims.1,
                stabilized: true,
                d_used: bound,
            };
        }
        bound += 1;
    }
    let last = history.last().copied().unwrap_or((0, 0));
    let settled = history.len() >= run_needed
        && history[history.len() - run_needed..].iter().all(|&d| d == last);
    HomologySweep {
        even: last.0,
        odd: last.1,
        stabilized: settled,
        d_used: cap,
    }
}
