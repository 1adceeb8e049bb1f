//! Exact arithmetic in the cyclotomic field Q(eps) = Q[t]/(Phi_l(t)).
//!
//! Values are stored as an integer coordinate vector over a common positive
//! denominator, reduced modulo the monic integer polynomial Phi_l. Fields are
//! interned per order `l`, so a `CycNum` carries a `&'static` handle to its
//! field and arithmetic never needs an external context.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::modular::{mul_mod, pow_mod};
use crate::scalar::{format_rational, parse_rational, ExactDiv, Field, Ring};

/// The field Q(eps) for a primitive `l`-th root of unity eps.
#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    l: u32,
    /// Coefficients of Phi_l, lowest degree first; monic.
    phi: Vec<BigInt>,
}

static FIELDS: OnceLock<Mutex<HashMap<u32, &'static CyclotomicField>>> = OnceLock::new();

/// Builds (or fetches the interned copy of) Q(eps) for order `l`.
pub fn make_field(l: i64) -> Result<&'static CyclotomicField> {
    if l < 2 || l > u32::MAX as i64 {
        return Err(Error::InvalidOrder(l));
    }
    Ok(CyclotomicField::get(l as u32))
}

impl CyclotomicField {
    fn get(l: u32) -> &'static CyclotomicField {
        let registry = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = registry.lock().unwrap().get(&l) {
            return f;
        }
        let phi = cyclotomic_poly(l);
        let mut guard = registry.lock().unwrap();
        *guard
            .entry(l)
            .or_insert_with(|| Box::leak(Box::new(CyclotomicField { l, phi })))
    }

    pub fn order(&self) -> u32 {
        self.l
    }

    /// phi(l), the dimension of Q(eps) over Q.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn phi_coeffs(&self) -> &[BigInt] {
        &self.phi
    }

    pub fn eps(&'static self) -> CycNum {
        self.eps_pow(1)
    }

    /// eps^k for any integer k (negative powers wrap modulo l).
    pub fn eps_pow(&'static self, k: i64) -> CycNum {
        let k = k.rem_euclid(self.l as i64) as usize;
        let mut num = vec![BigInt::zero(); k + 1];
        num[k] = BigInt::one();
        CycNum::from_parts(Some(self), num, BigInt::one())
    }

    pub fn from_rational(&'static self, r: BigRational) -> CycNum {
        CycNum::from_parts(Some(self), vec![r.numer().clone()], r.denom().clone())
    }

    pub fn from_int(&'static self, v: i64) -> CycNum {
        CycNum::from_parts(Some(self), vec![BigInt::from(v)], BigInt::one())
    }

    /// Element with the given coordinates in the power basis 1, eps, eps^2, ...
    pub fn from_coords(&'static self, coords: &[BigRational]) -> CycNum {
        let den = coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        CycNum::from_parts(Some(self), num, den)
    }

    /// Evaluates Phi_l at `x` modulo `p`.
    pub fn phi_mod(&self, x: u64, p: u64) -> u64 {
        let mut acc = 0u64;
        for c in self.phi.iter().rev() {
            acc = (mul_mod(acc, x, p) + bigint_mod(c, p)) % p;
        }
        acc
    }

    /// Parses the JSON form: an array of phi(l) strings `"num/den"`.
    pub fn parse_json(&'static self, v: &Value) -> Result<CycNum> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Invalid(format!("expected coordinate array, got {v}")))?;
        if arr.len() != self.degree() {
            return Err(Error::Invalid(format!(
                "expected {} coordinates for l={}, got {}",
                self.degree(),
                self.l,
                arr.len()
            )));
        }
        let coords = arr
            .iter()
            .map(|c| match c {
                Value::String(s) => parse_rational(s),
                Value::Number(n) => n.as_i64().map(BigRational::from_integer_i64),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Invalid(format!("bad rational in {v}")))?;
        Ok(self.from_coords(&coords))
    }
}

trait FromI64 {
    fn from_integer_i64(v: i64) -> Self;
}

impl FromI64 for BigRational {
    fn from_integer_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

fn cyclotomic_poly(l: u32) -> Vec<BigInt> {
    // t^l - 1 divided by Phi_d for every proper divisor d of l.
    let mut poly = vec![BigInt::zero(); l as usize + 1];
    poly[0] = -BigInt::one();
    poly[l as usize] = BigInt::one();
    for d in 1..l {
        if l % d == 0 {
            let divisor = if d == 1 {
                vec![-BigInt::one(), BigInt::one()]
            } else {
                CyclotomicField::get(d).phi.clone()
            };
            poly = div_monic_exact(&poly, &divisor);
        }
    }
    poly
}

fn div_monic_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db].clone();
        if !c.is_zero() {
            for (k, bk) in b.iter().enumerate() {
                rem[i + k] -= &c * bk;
            }
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

pub(crate) fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// An element of Q(eps): `sum(num[i] * eps^i) / den`.
///
/// Constants built through `Zero`/`One`/`Ring::from_int` have no field
/// attached; they behave as rationals and pick up the field of whatever they
/// are combined with.
#[derive(Clone)]
pub struct CycNum {
    field: Option<&'static CyclotomicField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycNum {
    fn from_parts(field: Option<&'static CyclotomicField>, mut num: Vec<BigInt>, den: BigInt) -> Self {
        if let Some(f) = field {
            reduce_mod_phi(&mut num, &f.phi);
        }
        let mut out = CycNum { field, num, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        while self.num.last().is_some_and(Zero::is_zero) {
            self.num.pop();
        }
        if self.num.is_empty() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den = &self.den / &g;
            for c in &mut self.num {
                *c = &*c / &g;
            }
        }
    }

    pub fn field(&self) -> Option<&'static CyclotomicField> {
        self.field
    }

    fn join(&self, other: &Self) -> Option<&'static CyclotomicField> {
        match (self.field, other.field) {
            (Some(a), Some(b)) => {
                debug_assert_eq!(a.l, b.l, "mixing cyclotomic fields");
                Some(a)
            }
            (a, b) => a.or(b),
        }
    }

    /// Coordinates in the power basis, padded to exactly phi(l) entries.
    pub fn coords(&self, field: &CyclotomicField) -> Vec<BigRational> {
        (0..field.degree())
            .map(|i| match self.num.get(i) {
                Some(c) => BigRational::new(c.clone(), self.den.clone()),
                None => BigRational::zero(),
            })
            .collect()
    }

    /// The rational value if this element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.num.len() {
            0 => Some(BigRational::zero()),
            1 => Some(BigRational::new(self.num[0].clone(), self.den.clone())),
            _ => None,
        }
    }

    pub fn to_json(&self, field: &CyclotomicField) -> Value {
        Value::Array(
            self.coords(field)
                .iter()
                .map(|c| Value::String(format_rational(c)))
                .collect(),
        )
    }

    fn add_ref(&self, other: &Self) -> Self {
        if other.num.is_empty() {
            return self.clone();
        }
        if self.num.is_empty() {
            let mut o = other.clone();
            o.field = self.join(other);
            return o;
        }
        let n = self.num.len().max(other.num.len());
        let mut num = Vec::with_capacity(n);
        if self.den == other.den {
            for i in 0..n {
                num.push(get(&self.num, i) + get(&other.num, i));
            }
            let mut out = CycNum { field: self.join(other), num, den: self.den.clone() };
            out.normalize();
            out
        } else {
            for i in 0..n {
                num.push(get(&self.num, i) * &other.den + get(&other.num, i) * &self.den);
            }
            let mut out = CycNum { field: self.join(other), num, den: &self.den * &other.den };
            out.normalize();
            out
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let field = self.join(other);
        if self.num.is_empty() || other.num.is_empty() {
            return CycNum { field, num: Vec::new(), den: BigInt::one() };
        }
        let mut num = vec![BigInt::zero(); self.num.len() + other.num.len() - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                num[i + j] += a * b;
            }
        }
        if let Some(f) = field {
            reduce_mod_phi(&mut num, &f.phi);
        }
        let mut out = CycNum { field, num, den: &self.den * &other.den };
        out.normalize();
        out
    }

    fn neg_ref(&self) -> Self {
        CycNum {
            field: self.field,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    /// Inverse via the extended Euclidean algorithm against Phi_l.
    pub fn try_inv(&self) -> Result<Self> {
        if self.num.is_empty() {
            return Err(Error::DivisionByZero);
        }
        if self.num.len() == 1 {
            return Ok(CycNum::from_parts(
                self.field,
                vec![self.den.clone()],
                self.num[0].clone(),
            ));
        }
        let field = self.field.expect("non-constant CycNum always carries its field");
        let a: Vec<BigRational> = self
            .num
            .iter()
            .map(|c| BigRational::new(c * &self.den, BigInt::one()))
            .collect();
        let phi: Vec<BigRational> = field
            .phi
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        // s * a + u * phi = g with g a nonzero constant since Phi_l is irreducible.
        let (g, s) = rat_xgcd(&a, &phi);
        debug_assert_eq!(g.len(), 1);
        let g0 = g[0].clone();
        // num/den * s / g0 = 1  with a = num * den, so inverse = s * den^2 / g0 ... fold the den back.
        let scale = BigRational::from_integer(self.den.clone() * &self.den) / g0;
        let coords: Vec<BigRational> = s.into_iter().map(|c| c * &scale).collect();
        Ok(field.from_coords(&coords))
    }

    /// Image under eps -> root in F_p.
    pub fn to_prime_field(&self, e: &PrimeEmbedding) -> Result<u64> {
        let p = e.p;
        let d = bigint_mod(&self.den, p);
        if d == 0 {
            return Err(Error::BadPrime(p));
        }
        let mut acc = 0u64;
        for c in self.num.iter().rev() {
            acc = (mul_mod(acc, e.root, p) + bigint_mod(c, p)) % p;
        }
        Ok(mul_mod(acc, pow_mod(d, p - 2, p), p))
    }

    /// Galois conjugate eps -> eps^k (k coprime to l).
    pub fn conjugate(&self, k: u32) -> Self {
        let Some(f) = self.field else { return self.clone() };
        let mut num = vec![BigInt::zero(); f.l as usize];
        for (i, c) in self.num.iter().enumerate() {
            num[(i * k as usize) % f.l as usize] += c;
        }
        CycNum::from_parts(Some(f), num, self.den.clone())
    }
}

fn get(v: &[BigInt], i: usize) -> BigInt {
    v.get(i).cloned().unwrap_or_default()
}

fn reduce_mod_phi(num: &mut Vec<BigInt>, phi: &[BigInt]) {
    let d = phi.len() - 1;
    while num.len() > d {
        let c = num.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let shift = num.len() - d;
        for k in 0..d {
            num[shift + k] -= &c * &phi[k];
        }
    }
}

fn rat_trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn rat_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    rat_trim(&mut rem);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if !c.is_zero() {
            for (k, bk) in b.iter().enumerate() {
                let t = &c * bk;
                rem[i + k] -= t;
            }
        }
        quot[i] = c;
    }
    rem.truncate(db);
    rat_trim(&mut rem);
    rat_trim(&mut quot);
    (quot, rem)
}

fn rat_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    rat_trim(&mut out);
    out
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_else(BigRational::zero)
                - b.get(i).cloned().unwrap_or_else(BigRational::zero)
        })
        .collect();
    rat_trim(&mut out);
    out
}

/// Returns `(g, s)` with `s * a == g (mod b)`, g = gcd(a, b).
fn rat_xgcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    rat_trim(&mut r0);
    rat_trim(&mut r1);
    let mut s0 = vec![BigRational::one()];
    let mut s1: Vec<BigRational> = Vec::new();
    while !r1.is_empty() {
        let (q, r) = rat_divrem(&r0, &r1);
        let s2 = rat_sub(&s0, &rat_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for CycNum {}

impl std::hash::Hash for CycNum {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = BigRational::new(c.clone(), self.den.clone());
            let (neg, mag) = if r.is_negative() { (true, -r) } else { (false, r) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "eps".to_string(),
                _ => format!("eps^{i}"),
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Zero for CycNum {
    fn zero() -> Self {
        CycNum { field: None, num: Vec::new(), den: BigInt::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
}

impl One for CycNum {
    fn one() -> Self {
        CycNum { field: None, num: vec![BigInt::one()], den: BigInt::one() }
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a CycNum> for CycNum {
    type Output = CycNum;
    fn add(self, rhs: &'a CycNum) -> CycNum {
        self.add_ref(rhs)
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        self.add_ref(&rhs.neg_ref())
    }
}

impl<'a> Sub<&'a CycNum> for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &'a CycNum) -> CycNum {
        self.add_ref(&rhs.neg_ref())
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a CycNum> for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &'a CycNum) -> CycNum {
        self.mul_ref(rhs)
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        self.neg_ref()
    }
}

impl AddAssign for CycNum {
    fn add_assign(&mut self, rhs: CycNum) {
        *self = self.add_ref(&rhs);
    }
}

impl<'a> AddAssign<&'a CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &'a CycNum) {
        *self = self.add_ref(rhs);
    }
}

impl<'a> SubAssign<&'a CycNum> for CycNum {
    fn sub_assign(&mut self, rhs: &'a CycNum) {
        *self = self.add_ref(&rhs.neg_ref());
    }
}

impl<'a> MulAssign<&'a CycNum> for CycNum {
    fn mul_assign(&mut self, rhs: &'a CycNum) {
        *self = self.mul_ref(rhs);
    }
}

impl Ring for CycNum {
    fn from_int(v: i64) -> Self {
        CycNum::from_parts(None, vec![BigInt::from(v)], BigInt::one())
    }

    fn weight(&self) -> usize {
        self.num.iter().map(|c| c.bits() as usize).sum::<usize>() + self.den.bits() as usize
    }
}

impl ExactDiv for CycNum {
    fn div_exact(&self, d: &Self) -> Option<Self> {
        Some(self.mul_ref(&d.try_inv().ok()?))
    }
}

impl Field for CycNum {
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
}

/// Ring homomorphism Z[eps][1/den] -> F_p sending eps to a fixed root of Phi_l.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeEmbedding {
    pub p: u64,
    pub root: u64,
    pub l: u32,
}

impl PrimeEmbedding {
    pub fn new(field: &CyclotomicField, p: u64, root: u64) -> Result<Self> {
        if !num_prime::nt_funcs::is_prime64(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if field.phi_mod(root % p, p) != 0 {
            return Err(Error::Invalid(format!("{root} is not a root of Phi_{} mod {p}", field.l)));
        }
        Ok(PrimeEmbedding { p, root: root % p, l: field.l })
    }

    /// Random prime p = 1 (mod l) in [2^31, 2^62] with a root of Phi_l.
    pub fn random<R: rand::Rng + ?Sized>(field: &CyclotomicField, rng: &mut R) -> Self {
        let l = field.l as u64;
        let lo = (1u64 << 31) / l + 1;
        let hi = ((1u64 << 62) - 1) / l;
        loop {
            let k = rng.gen_range(lo..=hi);
            let p = k * l + 1;
            if !num_prime::nt_funcs::is_prime64(p) {
                continue;
            }
            // a^((p-1)/l) is an l-th root of unity; it is primitive with
            // probability phi(l)/l.
            loop {
                let a = rng.gen_range(2..p);
                let r = pow_mod(a, (p - 1) / l, p);
                if field.phi_mod(r, p) == 0 {
                    return PrimeEmbedding { p, root: r, l: field.l };
                }
            }
        }
    }

    /// All residues r in [0, p) with Phi_l(r) = 0 (mod p). Brute force; small p only.
    pub fn candidate_roots(field: &CyclotomicField, p: u64) -> Vec<u64> {
        (0..p).filter(|&r| field.phi_mod(r, p) == 0).collect()
    }

    pub fn reduce_rational(&self, r: &BigRational) -> Result<u64> {
        let d = bigint_mod(r.denom(), self.p);
        if d == 0 {
            return Err(Error::BadPrime(self.p));
        }
        Ok(mul_mod(bigint_mod(r.numer(), self.p), pow_mod(d, self.p - 2, self.p), self.p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(make_field(3).unwrap().phi_coeffs(), ints(&[1, 1, 1]).as_slice());
        assert_eq!(make_field(4).unwrap().phi_coeffs(), ints(&[1, 0, 1]).as_slice());
        assert_eq!(make_field(5).unwrap().phi_coeffs(), ints(&[1, 1, 1, 1, 1]).as_slice());
        assert_eq!(make_field(6).unwrap().phi_coeffs(), ints(&[1, -1, 1]).as_slice());
        assert_eq!(make_field(2).unwrap().phi_coeffs(), ints(&[1, 1]).as_slice());
        assert_eq!(make_field(12).unwrap().degree(), 4);
        assert_eq!(make_field(15).unwrap().degree(), 8);
    }

    #[test]
    fn phi_at_one() {
        for l in 2..40u32 {
            let f = make_field(l as i64).unwrap();
            let v: BigInt = f.phi_coeffs().iter().sum();
            let mut m = l;
            let mut prime = None;
            for p in 2..=l {
                if m % p == 0 {
                    while m % p == 0 {
                        m /= p;
                    }
                    prime = if m == 1 && prime.is_none() { Some(p) } else { Some(0) };
                    break;
                }
            }
            match prime {
                Some(p) if p > 0 => assert_eq!(v, BigInt::from(p), "l={l}"),
                _ => assert_eq!(v, BigInt::one(), "l={l}"),
            }
        }
    }

    #[test]
    fn invalid_order() {
        assert_eq!(make_field(1), Err(Error::InvalidOrder(1)));
        assert_eq!(make_field(0), Err(Error::InvalidOrder(0)));
    }

    #[test]
    fn arithmetic_at_l3() {
        let f = make_field(3).unwrap();
        let e = f.eps();
        let m1 = f.from_int(-1);
        assert_eq!(e.clone() * &e, m1.clone() - &e);
        assert_eq!(e.inv().unwrap(), m1 - &e);
        assert_eq!(e.inv().unwrap(), f.eps_pow(2));
        assert_eq!(f.eps_pow(-1), f.eps_pow(2));
    }

    #[test]
    fn cube_of_one_minus_eps() {
        // Oracle: repeated multiplication.
        let f = make_field(3).unwrap();
        let x = CycNum::one() - f.eps();
        let cube = x.clone() * &x * &x;
        // 3 eps^2 - 3 eps, with eps^2 = -1 - eps.
        let expected = f.from_int(3) * &f.eps_pow(2) - f.from_int(3) * &f.eps();
        assert_eq!(cube, expected);
        assert_eq!(cube.coords(f), vec![rat(-3, 1), rat(-6, 1)]);
        assert_eq!(x.pow(3), cube);
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(CycNum::zero().try_inv(), Err(Error::DivisionByZero));
        assert!(CycNum::one().div_exact(&CycNum::zero()).is_none());
    }

    #[test]
    fn eps_has_exact_order() {
        for l in 2..13 {
            let f = make_field(l).unwrap();
            let e = f.eps();
            let mut acc = CycNum::one();
            for k in 1..=l {
                acc = acc * &e;
                assert_eq!(acc.is_one(), k == l, "l={l} k={k}");
            }
        }
    }

    #[test]
    fn inverses_across_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for l in [3, 4, 5, 7, 8, 9, 12] {
            let f = make_field(l).unwrap();
            for _ in 0..20 {
                let coords: Vec<_> = (0..f.degree())
                    .map(|_| rat(rng.gen_range(-9..10), rng.gen_range(1..5)))
                    .collect();
                let a = f.from_coords(&coords);
                if a.is_zero() {
                    continue;
                }
                assert!((a.clone() * &a.inv().unwrap()).is_one(), "l={l} a={a}");
            }
        }
    }

    #[test]
    fn roots_mod_seven() {
        let f = make_field(3).unwrap();
        assert_eq!(PrimeEmbedding::candidate_roots(f, 7), vec![2, 4]);
        let e = PrimeEmbedding::new(f, 7, 2).unwrap();
        let v = f.eps() + &f.eps_pow(2);
        assert_eq!(v.to_prime_field(&e).unwrap(), 6);
        assert_eq!(CycNum::one().to_prime_field(&e).unwrap(), 1);
    }

    #[test]
    fn bad_prime() {
        let f = make_field(3).unwrap();
        let e = PrimeEmbedding::new(f, 7, 2).unwrap();
        let x = f.from_rational(rat(1, 14));
        assert_eq!(x.to_prime_field(&e), Err(Error::BadPrime(7)));
    }

    #[test]
    fn random_embeddings_are_primitive_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for l in [3, 4, 5, 6] {
            let f = make_field(l).unwrap();
            let e = PrimeEmbedding::random(f, &mut rng);
            assert!(e.p >= 1 << 31 && e.p < 1 << 62);
            assert_eq!(e.p % l as u64, 1);
            for k in 1..l as u64 {
                assert_ne!(pow_mod(e.root, k, e.p), 1);
            }
            assert_eq!(pow_mod(e.root, l as u64, e.p), 1);
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = make_field(5).unwrap();
        let a = f.from_coords(&[rat(1, 2), rat(0, 1), rat(-3, 4), rat(5, 1)]);
        let j = a.to_json(f);
        assert_eq!(j, serde_json::json!(["1/2", "0/1", "-3/4", "5/1"]));
        assert_eq!(f.parse_json(&j).unwrap(), a);
    }
}
