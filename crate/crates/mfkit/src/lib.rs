//! mfkit: exact computations with matrix factorizations of polynomial
//! superpotentials.
//!
//! The crate computes, over exact rationals (or a prime field as a
//! cross-check), the standard functorial constructions on matrix
//! factorizations (Koszul factorizations, Thom-Sebastiani tensor, duality,
//! Knorrer doubling), Ext groups over `k`, `k[[b]]/b^N` and `k((b))`,
//! Hochschild-type invariants via twisted de Rham complexes, and
//! Clifford-algebra descriptions of quadratic potentials.
//!
//! See the `book/` guide for worked examples; every snippet there runs as a
//! doc-test of this crate.

pub mod beta;
pub mod cli;
pub mod clifford;
pub mod complex;
pub mod error;
pub mod hochschild;
pub mod hom;
pub mod linalg;
pub mod matrix;
pub mod mf;
pub mod parse;
pub mod poly;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::PolyMatrix;
pub use parse::{parse_poly, parse_poly_in};
pub use poly::{infer_weights, Monomial, MultiPoly, PolyRing};
pub use scalar::{Field, Scalar};
