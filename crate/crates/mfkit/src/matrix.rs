//! Dense matrices of polynomials.

use crate::poly::{MultiPoly, PolyRing};
use crate::scalar::Scalar;
use std::fmt;
use std::sync::Arc;

/// Row-major dense matrix with `MultiPoly` entries, all over one ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    pub ring: Arc<PolyRing>,
    pub rows: usize,
    pub cols: usize,
    data: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zero(ring: &Arc<PolyRing>, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![MultiPoly::zero(ring); rows * cols],
        }
    }

    pub fn from_fn(
        ring: &Arc<PolyRing>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> MultiPoly,
    ) -> Self {
        let mut m = Self::zero(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = f(i, j);
            }
        }
        m
    }

    /// `f * I_n`.
    pub fn scalar_identity(ring: &Arc<PolyRing>, n: usize, f: &MultiPoly) -> Self {
        Self::from_fn(ring, n, n, |i, j| {
            if i == j {
                f.clone()
            } else {
                MultiPoly::zero(ring)
            }
        })
    }

    pub fn identity(ring: &Arc<PolyRing>, n: usize) -> Self {
        Self::scalar_identity(ring, n, &MultiPoly::one(ring))
    }

    pub fn at(&self, i: usize, j: usize) -> &MultiPoly {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut MultiPoly {
        &mut self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> PolyMatrix {
        Self::from_fn(&self.ring, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn neg(&self) -> PolyMatrix {
        Self::from_fn(&self.ring, self.rows, self.cols, |i, j| self.at(i, j).neg())
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self::from_fn(&self.ring, self.rows, self.cols, |i, j| {
            self.at(i, j).add(other.at(i, j))
        })
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must match");
        Self::from_fn(&self.ring, self.rows, other.cols, |i, j| {
            let mut acc = MultiPoly::zero(&self.ring);
            for k in 0..self.cols {
                acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
            }
            acc
        })
    }

    pub fn scale(&self, c: &Scalar) -> PolyMatrix {
        Self::from_fn(&self.ring, self.rows, self.cols, |i, j| self.at(i, j).scale(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    /// First entry where the two matrices differ, if any.
    pub fn first_difference(&self, other: &PolyMatrix) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.at(i, j) != other.at(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &PolyMatrix) -> PolyMatrix {
        let mut m = Self::zero(&self.ring, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = self.at(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                *m.at_mut(self.rows + i, self.cols + j) = other.at(i, j).clone();
            }
        }
        m
    }

    /// Re-expresses every entry in `target` via the variable map.
    pub fn lift_to(&self, target: &Arc<PolyRing>, map: &[usize]) -> PolyMatrix {
        PolyMatrix::from_fn(target, self.rows, self.cols, |i, j| {
            self.at(i, j).lift_to(target, map)
        })
    }

    /// Largest (weighted) degree over all entries.
    pub fn max_degree(&self) -> u64 {
        self.data.iter().map(|p| p.degree()).max().unwrap_or(0)
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
