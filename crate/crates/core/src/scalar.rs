//! Scalar traits shared by every exact coefficient type in the crate.
//!
//! Everything here is exact: the crate never touches floating point. The
//! traits build on `num_traits::{Zero, One}` so that the additive and
//! multiplicative identities exist without a context object. Types whose
//! arithmetic does depend on a context (the cyclotomic order, the prime
//! modulus) therefore carry that context inside each value and treat the
//! identities as context-free constants that adopt the context of whatever
//! they are combined with.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Commutative ring with identity.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + AddAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn from_int(v: i64) -> Self;

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    /// Rough size used for pivot selection in fraction-free elimination.
    fn weight(&self) -> usize {
        1
    }
}

/// Ring in which a known-exact quotient can be computed.
pub trait ExactDiv: Ring {
    /// Returns `q` with `q * d == self`, or `None` when no such `q` exists.
    fn div_exact(&self, d: &Self) -> Option<Self>;
}

pub trait Field: ExactDiv {
    /// Multiplicative inverse; `None` exactly when the element is not a unit.
    fn inv(&self) -> Option<Self>;

    fn is_unit(&self) -> bool {
        self.inv().is_some()
    }
}

impl Ring for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl ExactDiv for BigRational {
    fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            None
        } else {
            Some(self / d)
        }
    }
}

impl Field for BigRational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Parses `"a/b"` or `"a"` into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Formats a rational as `"num/den"` in lowest terms (den always present).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
