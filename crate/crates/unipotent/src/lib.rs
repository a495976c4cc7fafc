//! Exact computational algebra for group rings with quadratic and cubic
//! unipotent conditions.
//!
//! The crate builds and verifies the quotient rings of free-group rings by
//! conditions `(x-1)^n = 0` (n = 2, 3) imposed on a finite set of group
//! elements: noncommutative rewriting for the 2-generator cubic ring, its
//! 18-dimensional matrix model, the recursive `2^d` integer representations
//! of the quadratic case, the affine variety of solutions of `X^3 = 0`, and
//! the spanning-set machinery for general cubic conditions.
//!
//! All arithmetic is exact. Core polynomial and matrix types are generic
//! over a [`scalar::Scalar`]; the aliases below fix the instantiations used
//! throughout.

pub mod coeff;
pub mod freealg;
pub mod grouprel;
pub mod linalg;
pub mod quadratic;
pub mod rewrite;
pub mod ringmodel;
pub mod scalar;
pub mod spanning;
pub mod variety;

pub use coeff::{Coeff, CoeffError, CoeffRing};
pub use scalar::{Int64, Scalar};

/// Polynomial over the ring-checked exact fractions; the workhorse type.
pub type Poly = freealg::Polynomial<Coeff>;
/// Exact integer matrix (arbitrary precision).
pub type IntMatrix = linalg::Matrix<num_bigint::BigInt>;
/// Machine-integer matrix with overflow tripwires, for the quadratic
/// representations.
pub type FastMatrix = linalg::Matrix<Int64>;
/// Matrix over the ring-checked fractions, for the 18-dimensional model.
pub type CoeffMatrix = linalg::Matrix<Coeff>;
