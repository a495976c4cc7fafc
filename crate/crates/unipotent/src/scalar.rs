//! Scalar abstraction shared by polynomials and matrices.
//!
//! Everything in this crate computes with exact scalars: arbitrary-precision
//! integers, rationals, or ring-restricted fractions ([`crate::coeff::Coeff`]).
//! The trait is a thin bundle of `num-traits` bounds so the same polynomial
//! and matrix code serves all of them; the crate root exposes concrete
//! aliases for the instantiations actually used.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// An exact scalar: a commutative ring element with decidable equality.
pub trait Scalar:
    Clone
    + Eq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_i64(n: i64) -> Self;
}

impl Scalar for BigInt {
    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }
}

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Machine integer with loud overflow semantics.
///
/// Silent wrap-around would be a soundness bug in an exact-arithmetic
/// artifact, so all arithmetic panics on overflow. The quadratic-condition
/// matrices keep entries far below this bound; the panic is a tripwire,
/// not a code path.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct Int64(pub i64);

impl Display for Int64 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Int64 {
    type Output = Int64;
    fn add(self, rhs: Int64) -> Int64 {
        Int64(self.0.checked_add(rhs.0).expect("Int64 overflow in add"))
    }
}

impl Sub for Int64 {
    type Output = Int64;
    fn sub(self, rhs: Int64) -> Int64 {
        Int64(self.0.checked_sub(rhs.0).expect("Int64 overflow in sub"))
    }
}

impl Mul for Int64 {
    type Output = Int64;
    fn mul(self, rhs: Int64) -> Int64 {
        Int64(self.0.checked_mul(rhs.0).expect("Int64 overflow in mul"))
    }
}

impl Neg for Int64 {
    type Output = Int64;
    fn neg(self) -> Int64 {
        Int64(self.0.checked_neg().expect("Int64 overflow in neg"))
    }
}

impl Zero for Int64 {
    fn zero() -> Self {
        Int64(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Int64 {
    fn one() -> Self {
        Int64(1)
    }
}

impl Scalar for Int64 {
    fn from_i64(n: i64) -> Self {
        Int64(n)
    }
}
