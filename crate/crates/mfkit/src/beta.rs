//! Finitely generated graded modules over `k[[b]]` described by numerical
//! data: free ranks per parity plus a multiset of torsion orders.
//!
//! A module is never manipulated structurally; it is *fitted* from the
//! dimension sequence over `k[[b]]/b^N`, `N = 1..N_max`, using the structure
//! law
//!
//! ```text
//! dim_par(N) = N * free_rank(par) + sum over torsion (order a, par) of min(a, N)
//! ```
//!
//! The increments `dim(N+1) - dim(N)` of any such sequence are non-increasing
//! and eventually equal to the free rank, which makes the fit unique; a
//! sequence violating that signals a truncation artifact and is reported as
//! an error instead of being forced.

use crate::complex::Parity;
use crate::error::{Error, Result};
use serde::Serialize;

/// Fitted description of a `k[[b]]`-module: free ranks and torsion orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaModule {
    /// Free rank in (even, odd) parity: the `k((b))`-dimension.
    pub free_rank: (usize, usize),
    /// Torsion summands `k[[b]]/b^a` as (order, parity), sorted.
    pub torsion: Vec<(usize, Parity)>,
}

impl BetaModule {
    pub fn free(even: usize, odd: usize) -> Self {
        BetaModule {
            free_rank: (even, odd),
            torsion: Vec::new(),
        }
    }

    /// Dimension over `k[[b]]/b^N` in each parity predicted by the module.
    pub fn dims_at(&self, n: usize) -> (usize, usize) {
        let mut even = n * self.free_rank.0;
        let mut odd = n * self.free_rank.1;
        for &(a, par) in &self.torsion {
            match par {
                Parity::Even => even += a.min(n),
                Parity::Odd => odd += a.min(n),
            }
        }
        (even, odd)
    }

    pub fn tate_dims(&self) -> (usize, usize) {
        self.free_rank
    }
}

/// Fits a `BetaModule` to per-parity dimension sequences indexed by
/// `N = 1..=N_max`. The fit must reproduce every sample exactly.
pub fn fit_beta_module(even: &[usize], odd: &[usize]) -> Result<BetaModule> {
    let (free_even, tors_even) = fit_parity(even)?;
    let (free_odd, tors_odd) = fit_parity(odd)?;
    let mut torsion: Vec<(usize, Parity)> = tors_even
        .into_iter()
        .map(|a| (a, Parity::Even))
        .chain(tors_odd.into_iter().map(|a| (a, Parity::Odd)))
        .collect();
    torsion.sort_by_key(|&(a, p)| (a, p == Parity::Odd));
    Ok(BetaModule {
        free_rank: (free_even, free_odd),
        torsion,
    })
}

fn fit_parity(dims: &[usize]) -> Result<(usize, Vec<usize>)> {
    if dims.len() < 2 {
        return Err(Error::BetaFit(format!(
            "need at least two truncation levels, got {}",
            dims.len()
        )));
    }
    // Increments delta(N) = dim(N+1) - dim(N) must be non-increasing; the
    // final increment is the free rank provided the tail is flat.
    let mut deltas = Vec::with_capacity(dims.len() - 1);
    for w in dims.windows(2) {
        if w[1] < w[0] {
            return Err(Error::BetaFit(format!(
                "dimension sequence decreases: {dims:?}"
            )));
        }
        deltas.push(w[1] - w[0]);
    }
    for w in deltas.windows(2) {
        if w[1] > w[0] {
            return Err(Error::BetaFit(format!(
                "dimension increments grow: {dims:?}"
            )));
        }
    }
    let free = *deltas.last().unwrap();
    if deltas.len() >= 2 && deltas[deltas.len() - 2] != free {
        return Err(Error::BetaFit(format!(
            "free rank undetermined at N_max = {}: increments {deltas:?} not yet flat",
            dims.len()
        )));
    }
    // delta(N) = free + #{orders > N}; dims(1) = free + #{orders >= 1}.
    // ge[n] = #{orders >= n}, with the flat tail certifying ge = 0 beyond.
    let nmax = dims.len();
    let mut ge = vec![0usize; nmax + 2];
    if dims[0] < free {
        return Err(Error::BetaFit(format!("free rank exceeds N=1 dim: {dims:?}")));
    }
    ge[1] = dims[0] - free;
    for n in 2..=nmax {
        let d = deltas[n - 2];
        if d < free {
            return Err(Error::BetaFit(format!("increments fall below free rank: {dims:?}")));
        }
        ge[n] = d - free;
    }
    let mut torsion = Vec::new();
    for n in 1..=nmax {
        if ge[n] < ge[n + 1] {
            return Err(Error::BetaFit(format!(
                "order counts increase: {dims:?}"
            )));
        }
        for _ in 0..(ge[n] - ge[n + 1]) {
            torsion.push(n);
        }
    }
    // The fit must reproduce every sample exactly.
    for (i, &d) in dims.iter().enumerate() {
        let n = i + 1;
        let predicted: usize = n * free + torsion.iter().map(|&a| a.min(n)).sum::<usize>();
        if predicted != d {
            return Err(Error::BetaFit(format!(
                "law does not reproduce N={n} sample: {dims:?}"
            )));
        }
    }
    Ok((free, torsion))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_free_module() {
        let m = fit_beta_module(&[1, 2, 3, 4], &[1, 2, 3, 4]).unwrap();
        assert_eq!(m.free_rank, (1, 1));
        assert!(m.torsion.is_empty());
        assert_eq!(m.dims_at(3), (3, 3));
    }

    #[test]
    fn pure_torsion() {
        // One even torsion class of order 1: dims (1,0) at every N.
        let m = fit_beta_module(&[1, 1, 1], &[0, 0, 0]).unwrap();
        assert_eq!(m.free_rank, (0, 0));
        assert_eq!(m.torsion, vec![(1, Parity::Even)]);
    }

    #[test]
    fn mixed_fit_reproduces_samples() {
        // free (1,0), torsion {(2,even), (1,odd), (1,odd)}.
        let target = BetaModule {
            free_rank: (1, 0),
            torsion: vec![(1, Parity::Odd), (1, Parity::Odd), (2, Parity::Even)],
        };
        let evens: Vec<usize> = (1..=6).map(|n| target.dims_at(n).0).collect();
        let odds: Vec<usize> = (1..=6).map(|n| target.dims_at(n).1).collect();
        let fitted = fit_beta_module(&evens, &odds).unwrap();
        assert_eq!(fitted, target);
        for n in 1..=6 {
            assert_eq!(fitted.dims_at(n), target.dims_at(n));
        }
    }

    #[test]
    fn rejects_growing_increments() {
        assert!(fit_beta_module(&[1, 2, 4], &[0, 0, 0]).is_err());
    }

    #[test]
    fn rejects_unflattened_tail() {
        // Increments 3,2: can't certify the free rank.
        assert!(fit_beta_module(&[3, 6, 8], &[0, 0, 0]).is_err());
    }
}
