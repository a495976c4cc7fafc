//! Exact coefficient arithmetic over ℤ, localizations of ℤ, and ℚ.
//!
//! All three rings share one representation: a reduced fraction with
//! positive denominator. Which denominators are legal is a property of the
//! [`CoeffRing`], checked on construction or division, never silently. The
//! localization we actually care about is ℤ[1/6] (primes 2 and 3 inverted):
//! that is where the cubic-condition derivation lives, and
//! [`CoeffError::InversionRequired`] is how the code reports *why* plain ℤ
//! is not enough.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Which denominators are permitted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CoeffRing {
    /// ℤ: denominator 1 only.
    Integers,
    /// ℤ localized at a nonempty set of primes; denominators are products
    /// of powers of those primes.
    Localized(Vec<u64>),
    /// ℚ: unrestricted.
    Rationals,
}

impl CoeffRing {
    /// ℤ[1/6], the ring of Theorem 3.
    pub fn z_one_sixth() -> Self {
        CoeffRing::Localized(vec![2, 3])
    }

    /// Builds a localization, validating that every listed number is prime.
    pub fn localized(primes: &[u64]) -> Result<Self, CoeffError> {
        if primes.is_empty() {
            return Err(CoeffError::EmptyLocalization);
        }
        let mut ps: Vec<u64> = primes.to_vec();
        ps.sort_unstable();
        ps.dedup();
        for &p in &ps {
            if !is_prime_u64(p) {
                return Err(CoeffError::NotPrime(p));
            }
        }
        Ok(CoeffRing::Localized(ps))
    }

    pub fn name(&self) -> String {
        match self {
            CoeffRing::Integers => "Z".to_string(),
            CoeffRing::Localized(ps) => {
                let prod: u64 = ps.iter().product();
                format!("Z[1/{prod}]")
            }
            CoeffRing::Rationals => "Q".to_string(),
        }
    }

    /// Does this ring invert `p`?
    pub fn inverts(&self, p: u64) -> bool {
        match self {
            CoeffRing::Integers => false,
            CoeffRing::Localized(ps) => ps.contains(&p),
            CoeffRing::Rationals => true,
        }
    }

    /// Checks that `c` is a legal element of this ring.
    pub fn check(&self, c: &Coeff) -> Result<(), CoeffError> {
        match self {
            CoeffRing::Rationals => Ok(()),
            CoeffRing::Integers => {
                if c.0.denom().is_one() {
                    Ok(())
                } else {
                    Err(CoeffError::InversionRequired(smallest_prime_factor(
                        c.0.denom(),
                    )))
                }
            }
            CoeffRing::Localized(ps) => {
                let mut d = c.0.denom().clone();
                for &p in ps {
                    let bp = BigInt::from(p);
                    while (&d % &bp).is_zero() {
                        d /= &bp;
                    }
                }
                if d.is_one() {
                    Ok(())
                } else {
                    Err(CoeffError::InversionRequired(smallest_prime_factor(&d)))
                }
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum CoeffError {
    /// A division needs the inverse of this prime, which the ring lacks.
    #[error("inversion of {0} required but not available in the coefficient ring")]
    InversionRequired(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("a localization needs at least one prime")]
    EmptyLocalization,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse coefficient `{0}`")]
    Parse(String),
}

/// A reduced exact fraction. `num-rational` maintains the gcd-1 /
/// positive-denominator invariants; this type adds ring checks, integer
/// division with [`CoeffError::InversionRequired`], and the `n`/`n/d` text
/// form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct Coeff(pub BigRational);

impl Coeff {
    pub fn from_int(n: i64) -> Self {
        Coeff(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coeff(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.denom().is_one()
    }

    /// Exact division by a nonzero integer, allowed only when the result
    /// stays inside `ring`.
    pub fn div_int(&self, n: i64, ring: &CoeffRing) -> Result<Coeff, CoeffError> {
        if n == 0 {
            return Err(CoeffError::DivisionByZero);
        }
        let q = Coeff(&self.0 / BigRational::from_integer(BigInt::from(n)));
        ring.check(&q)?;
        Ok(q)
    }

    /// Exact division by another coefficient, subject to the same ring check.
    pub fn div_coeff(&self, c: &Coeff, ring: &CoeffRing) -> Result<Coeff, CoeffError> {
        if c.0.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        let q = Coeff(&self.0 / &c.0);
        ring.check(&q)?;
        Ok(q)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Coeff {
    type Err = CoeffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_int = |t: &str| -> Result<BigInt, CoeffError> {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| CoeffError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Coeff(BigRational::from_integer(parse_int(s)?))),
            Some((n, d)) => {
                let den = parse_int(d)?;
                if den.is_zero() {
                    return Err(CoeffError::DivisionByZero);
                }
                Ok(Coeff(BigRational::new(parse_int(n)?, den)))
            }
        }
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Coeff) -> Coeff {
        Coeff(self.0 + rhs.0)
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        Coeff(self.0 - rhs.0)
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        Coeff(self.0 * rhs.0)
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(-self.0)
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff(BigRational::one())
    }
}

impl Scalar for Coeff {
    fn from_i64(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

impl Serialize for Coeff {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Smallest prime factor of a positive integer. Denominators in this crate
/// stay tiny, so trial division is plenty.
fn smallest_prime_factor(n: &BigInt) -> u64 {
    let n = n.abs();
    let mut k = BigInt::from(2u64);
    loop {
        if (&n % &k).is_zero() {
            return u64::try_from(&k).expect("prime factor exceeds u64");
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Coeff {
        s.parse().unwrap()
    }

    #[test]
    fn addition_stays_in_ring() {
        let z16 = CoeffRing::z_one_sixth();
        let sum = c("1/2") + c("1/3");
        assert_eq!(sum, c("5/6"));
        z16.check(&sum).unwrap();

        assert_eq!(c("0") + c("7/4"), c("7/4"));
        assert_eq!(c("2/3") + c("-2/3"), Coeff::zero());
    }

    #[test]
    fn division_respects_ring() {
        let z = CoeffRing::Integers;
        let z16 = CoeffRing::z_one_sixth();

        assert_eq!(c("3").div_int(3, &z).unwrap(), c("1"));
        assert_eq!(
            c("1").div_int(3, &z),
            Err(CoeffError::InversionRequired(3))
        );
        assert_eq!(c("1").div_int(6, &z16).unwrap(), c("1/6"));
        assert_eq!(
            c("1").div_int(5, &z16),
            Err(CoeffError::InversionRequired(5))
        );
        // 1/10 = 1/(2*5): the 2 is fine in Z[1/6], the 5 is the culprit.
        assert_eq!(
            c("1").div_int(10, &z16),
            Err(CoeffError::InversionRequired(5))
        );
        assert_eq!(c("1").div_int(5, &CoeffRing::Rationals).unwrap(), c("1/5"));
    }

    #[test]
    fn div_round_trips() {
        let q = CoeffRing::Rationals;
        for n in [-7i64, -2, 1, 3, 12] {
            let a = c("35/6");
            let d = a.clone().div_int(n, &q).unwrap();
            assert_eq!(d * Coeff::from_int(n), a);
        }
    }

    #[test]
    fn parse_render_round_trip() {
        for s in ["0", "17", "-5/6", "22/7", "-1"] {
            let v = c(s);
            assert_eq!(v.to_string(), s);
            assert_eq!(c(&v.to_string()), v);
        }
    }

    #[test]
    fn localization_validates_primes() {
        assert!(CoeffRing::localized(&[2, 3]).is_ok());
        assert_eq!(
            CoeffRing::localized(&[4]),
            Err(CoeffError::NotPrime(4))
        );
        assert_eq!(
            CoeffRing::localized(&[]),
            Err(CoeffError::EmptyLocalization)
        );
    }
}
