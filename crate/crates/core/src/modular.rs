//! Prime-field scalars.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::scalar::{ExactDiv, Field, Ring};

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// An element of F_p.
///
/// The modulus travels with the value. `p == 0` marks a small integer
/// constant (from `Zero`, `One`, `Ring::from_int`) that has not yet met a
/// bound value; its integer is kept in `v` as two's-complement bits.
#[derive(Clone, Copy)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl Fp {
    pub fn new(v: u64, p: u64) -> Self {
        assert!(p > 1, "modulus must be at least 2");
        Fp { v: v % p, p }
    }

    pub fn from_i64(v: i64, p: u64) -> Self {
        Fp { v: v.rem_euclid(p as i64) as u64, p }
    }

    pub fn value(&self) -> u64 {
        assert!(self.p != 0, "unbound constant has no residue");
        self.v
    }

    pub fn modulus(&self) -> Option<u64> {
        (self.p != 0).then_some(self.p)
    }

    fn bind(self, p: u64) -> Self {
        if self.p == 0 {
            Fp::from_i64(self.v as i64, p)
        } else {
            debug_assert_eq!(self.p, p, "mixing prime fields");
            self
        }
    }

    fn pair(self, other: Self) -> (Self, Self, u64) {
        let p = self.p.max(other.p);
        if p == 0 {
            (self, other, 0)
        } else {
            (self.bind(p), other.bind(p), p)
        }
    }
}

impl PartialEq for Fp {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = self.pair(*other);
        a.v == b.v
    }
}

impl Eq for Fp {}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "{}", self.v as i64)
        } else {
            write!(f, "{} (mod {})", self.v, self.p)
        }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "{}", self.v as i64)
        } else {
            write!(f, "{}", self.v)
        }
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp { v: 0, p: 0 }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp { v: 1, p: 0 }
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let (a, b, p) = self.pair(rhs);
        if p == 0 {
            return Fp { v: (a.v as i64).wrapping_add(b.v as i64) as u64, p: 0 };
        }
        let s = a.v as u128 + b.v as u128;
        Fp { v: (s % p as u128) as u64, p }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.p == 0 {
            Fp { v: (self.v as i64).wrapping_neg() as u64, p: 0 }
        } else if self.v == 0 {
            self
        } else {
            Fp { v: self.p - self.v, p: self.p }
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        let (a, b, p) = self.pair(rhs);
        if p == 0 {
            return Fp { v: (a.v as i64).wrapping_mul(b.v as i64) as u64, p: 0 };
        }
        Fp { v: mul_mod(a.v, b.v, p), p }
    }
}

impl<'a> Add<&'a Fp> for Fp {
    type Output = Fp;
    fn add(self, rhs: &'a Fp) -> Fp {
        self + *rhs
    }
}

impl<'a> Sub<&'a Fp> for Fp {
    type Output = Fp;
    fn sub(self, rhs: &'a Fp) -> Fp {
        self - *rhs
    }
}

impl<'a> Mul<&'a Fp> for Fp {
    type Output = Fp;
    fn mul(self, rhs: &'a Fp) -> Fp {
        self * *rhs
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl<'a> AddAssign<&'a Fp> for Fp {
    fn add_assign(&mut self, rhs: &'a Fp) {
        *self = *self + *rhs;
    }
}

impl<'a> SubAssign<&'a Fp> for Fp {
    fn sub_assign(&mut self, rhs: &'a Fp) {
        *self = *self - *rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

impl Ring for Fp {
    fn from_int(v: i64) -> Self {
        Fp { v: v as u64, p: 0 }
    }
}

impl ExactDiv for Fp {
    fn div_exact(&self, d: &Self) -> Option<Self> {
        Some(*self * d.inv()?)
    }
}

impl Field for Fp {
    fn inv(&self) -> Option<Self> {
        if self.p == 0 {
            return match self.v as i64 {
                1 | -1 => Some(*self),
                _ => None,
            };
        }
        inv_mod(self.v, self.p).map(|v| Fp { v, p: self.p })
    }
}
