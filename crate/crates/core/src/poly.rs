//! Sparse commutative multivariate polynomials.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with variables in declaration order. The last entry is
//! therefore the leading term. Variable names and the optional Z^g grading are
//! kept in a separate [`PolyRing`] so that arithmetic never has to compare
//! metadata.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::cyclotomic::{CycNum, CyclotomicField};
use crate::error::{Error, Result};
use crate::scalar::{ExactDiv, Field, Ring};

/// Exponent vector with trailing zeros removed; ordered by total degree, then
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    deg: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial { deg: exps.iter().sum(), exps }
    }

    pub fn var(i: usize) -> Self {
        Self::var_pow(i, 1)
    }

    pub fn var_pow(i: usize, e: u32) -> Self {
        let mut exps = vec![0; i + 1];
        exps[i] = e;
        Self::new(exps)
    }

    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps.get(i).copied().unwrap_or(0)
    }

    /// Exponents, trimmed; index past the end means 0.
    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn padded(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.exp(i)).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.exps.len().max(other.exps.len());
        Monomial {
            deg: self.deg + other.deg,
            exps: (0..n).map(|i| self.exp(i) + other.exp(i)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Monomial {
        Monomial::new(self.exps.iter().map(|x| x * e).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.exps.len() > self.exps.len() {
            return None;
        }
        let mut exps = self.exps.clone();
        for (i, &e) in other.exps.iter().enumerate() {
            exps[i] = exps[i].checked_sub(e)?;
        }
        Some(Monomial::new(exps))
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.len() <= other.exps.len()
            && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let n = self.exps.len().max(other.exps.len());
        Monomial::new((0..n).map(|i| self.exp(i).max(other.exp(i))).collect())
    }

    pub fn degree_in(&self, grading: &[Vec<i64>]) -> Vec<i64> {
        let g = grading.first().map_or(0, Vec::len);
        let mut out = vec![0i64; g];
        for (i, &e) in self.exps.iter().enumerate() {
            for (o, d) in out.iter_mut().zip(&grading[i]) {
                *o += e as i64 * d;
            }
        }
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// Variable names and optional grading for a family of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    pub vars: Vec<String>,
    pub grading: Option<Vec<Vec<i64>>>,
}

impl PolyRing {
    pub fn new(vars: Vec<String>) -> Self {
        PolyRing { vars, grading: None }
    }

    pub fn with_grading(vars: Vec<String>, grading: Vec<Vec<i64>>) -> Self {
        assert_eq!(vars.len(), grading.len());
        PolyRing { vars, grading: Some(grading) }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .exps()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.vars[i].clone()
                } else {
                    format!("{}^{e}", self.vars[i])
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn format<R: Ring + fmt::Display>(&self, p: &MultiPoly<R>) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = p
            .terms()
            .rev()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("({c})")
                } else if c.is_one() {
                    self.format_monomial(m)
                } else {
                    format!("({c})*{}", self.format_monomial(m))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Result of asking for the multidegree of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multidegree {
    Homogeneous(Vec<i64>),
    Inhomogeneous,
    Zero,
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly<R> {
    terms: BTreeMap<Monomial, R>,
}

impl<R> Default for MultiPoly<R> {
    fn default() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }
}

impl<R: Ring> MultiPoly<R> {
    pub fn monomial(m: Monomial, c: R) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn constant(c: R) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Monomial::var(i), R::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, R)>) -> Self {
        let mut out = MultiPoly { terms: BTreeMap::new() };
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn constant_term(&self) -> R {
        self.coeff(&Monomial::one())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &R)> {
        self.terms.last_key_value()
    }

    pub fn add_term(&mut self, m: Monomial, c: &R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &(x.clone() * c));
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &R) -> Self {
        let mut out = Self::zero();
        for (k, x) in &self.terms {
            out.add_term(k.mul(m), &(x.clone() * c));
        }
        out
    }

    pub fn map_coeffs<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> MultiPoly<S> {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn multidegree(&self, grading: &[Vec<i64>]) -> Multidegree {
        let mut degs = self.terms.keys().map(|m| m.degree_in(grading));
        let Some(first) = degs.next() else {
            return Multidegree::Zero;
        };
        if degs.all(|d| d == first) {
            Multidegree::Homogeneous(first)
        } else {
            Multidegree::Inhomogeneous
        }
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] -= 1;
            out.add_term(Monomial::new(exps), &(c.clone() * &R::from_int(e as i64)));
        }
        out
    }

    /// Substitutes `pt[i]` for variable `i`, mapping coefficients through `coef`.
    pub fn eval_with<S: Ring>(&self, pt: &[S], coef: impl Fn(&R) -> Result<S>) -> Result<S> {
        let mut powers: Vec<Vec<S>> = vec![vec![S::one()]; pt.len()];
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = coef(c)?;
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = pw.last().unwrap().clone() * &pt[i];
                    pw.push(next);
                }
                t = t * &pw[e as usize];
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval(&self, pt: &[R]) -> R {
        self.eval_with(pt, |c| Ok(c.clone())).expect("identity coefficient map is infallible")
    }

    /// Substitutes a polynomial for each variable.
    pub fn compose(&self, subs: &[MultiPoly<R>]) -> MultiPoly<R> {
        self.eval_with(subs, |c| Ok(MultiPoly::constant(c.clone())))
            .expect("identity coefficient map is infallible")
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut out = Self::zero();
        for (a, x) in &small.terms {
            for (b, y) in &big.terms {
                out.add_term(a.mul(b), &(x.clone() * y));
            }
        }
        out
    }
}

impl<R: Field> MultiPoly<R> {
    /// `h` with `g * h == self`, or [`Error::DoesNotDivide`].
    pub fn exact_divide(&self, g: &Self) -> Result<Self> {
        let (lm, lc) = g.leading_term().ok_or(Error::DivisionByZero)?;
        let lc_inv = lc.inv().ok_or(Error::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((m, c)) = rem.leading_term() {
            let Some(t) = m.div(lm) else {
                return Err(Error::DoesNotDivide);
            };
            let tc = c.clone() * &lc_inv;
            rem -= &g.mul_monomial(&t, &tc);
            quot.add_term(t, &tc);
        }
        Ok(quot)
    }

    pub fn divides(&self, f: &Self) -> bool {
        f.exact_divide(self).is_ok()
    }
}

impl MultiPoly<CycNum> {
    pub fn to_json(&self, ring: &PolyRing, field: &CyclotomicField) -> Value {
        json!({
            "vars": ring.vars,
            "terms": self.terms.iter().map(|(m, c)| json!({
                "exp": m.padded(ring.nvars()),
                "coef": c.to_json(field),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn parse_json(field: &'static CyclotomicField, v: &Value) -> Result<(PolyRing, Self)> {
        let vars: Vec<String> = serde_json::from_value(v.get("vars").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Invalid(format!("polynomial vars: {e}")))?;
        let mut out = Self::zero();
        for t in v.get("terms").and_then(Value::as_array).into_iter().flatten() {
            let exp: Vec<u32> = serde_json::from_value(t.get("exp").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Invalid(format!("polynomial exponent: {e}")))?;
            if exp.len() != vars.len() {
                return Err(Error::SizeMismatch(format!(
                    "exponent of length {} for {} variables",
                    exp.len(),
                    vars.len()
                )));
            }
            let c = field.parse_json(t.get("coef").unwrap_or(&Value::Null))?;
            out.add_term(Monomial::new(exp), &c);
        }
        Ok((PolyRing::new(vars), out))
    }
}

impl<R: fmt::Debug> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| format!("({c:?}){m:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<R: Ring> Zero for MultiPoly<R> {
    fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<R: Ring> One for MultiPoly<R> {
    fn one() -> Self {
        Self::constant(R::one())
    }
}

impl<'a, R: Ring> Add<&'a MultiPoly<R>> for MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn add(mut self, rhs: &'a MultiPoly<R>) -> MultiPoly<R> {
        self += rhs;
        self
    }
}

impl<R: Ring> Add for MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn add(self, rhs: MultiPoly<R>) -> MultiPoly<R> {
        self + &rhs
    }
}

impl<'a, R: Ring> Sub<&'a MultiPoly<R>> for MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn sub(mut self, rhs: &'a MultiPoly<R>) -> MultiPoly<R> {
        self -= rhs;
        self
    }
}

impl<R: Ring> Sub for MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn sub(self, rhs: MultiPoly<R>) -> MultiPoly<R> {
        self - &rhs
    }
}

impl<'a, R: Ring> Mul<&'a MultiPoly<R>> for MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn mul(self, rhs: &'a MultiPoly<R>) -> MultiPoly<R> {
        self.mul_ref(rhs)
    }
}

impl<R: Ring> Mul for MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn mul(self, rhs: MultiPoly<R>) -> MultiPoly<R> {
        self.mul_ref(&rhs)
    }
}

impl<R: Ring> Neg for MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn neg(self) -> MultiPoly<R> {
        MultiPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<R: Ring> AddAssign for MultiPoly<R> {
    fn add_assign(&mut self, rhs: MultiPoly<R>) {
        if self.terms.is_empty() {
            *self = rhs;
        } else {
            *self += &rhs;
        }
    }
}

impl<'a, R: Ring> AddAssign<&'a MultiPoly<R>> for MultiPoly<R> {
    fn add_assign(&mut self, rhs: &'a MultiPoly<R>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl<'a, R: Ring> SubAssign<&'a MultiPoly<R>> for MultiPoly<R> {
    fn sub_assign(&mut self, rhs: &'a MultiPoly<R>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), &-c.clone());
        }
    }
}

impl<R: Ring> Ring for MultiPoly<R> {
    fn from_int(v: i64) -> Self {
        Self::constant(R::from_int(v))
    }

    fn weight(&self) -> usize {
        self.terms.len()
    }
}

impl<R: Field> ExactDiv for MultiPoly<R> {
    fn div_exact(&self, d: &Self) -> Option<Self> {
        self.exact_divide(d).ok()
    }
}

/// `scalar * prod base_i^exp_i`, kept unexpanded.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredPoly<R> {
    pub scalar: R,
    pub factors: Vec<(MultiPoly<R>, u64)>,
}

impl<R: Ring> FactoredPoly<R> {
    pub fn new(scalar: R, factors: Vec<(MultiPoly<R>, u64)>) -> Self {
        FactoredPoly { scalar, factors }
    }

    pub fn trivial(f: MultiPoly<R>) -> Self {
        FactoredPoly { scalar: R::one(), factors: vec![(f, 1)] }
    }

    pub fn eval_with<S: Ring>(&self, pt: &[S], coef: impl Fn(&R) -> Result<S> + Copy) -> Result<S> {
        let mut acc = coef(&self.scalar)?;
        for (base, e) in &self.factors {
            acc = acc * &base.eval_with(pt, coef)?.pow(*e);
        }
        Ok(acc)
    }

    pub fn eval(&self, pt: &[R]) -> R {
        self.eval_with(pt, |c| Ok(c.clone())).expect("identity coefficient map is infallible")
    }

    pub fn expand(&self) -> MultiPoly<R> {
        let mut acc = MultiPoly::constant(self.scalar.clone());
        for (base, e) in &self.factors {
            acc = acc * &base.pow(*e);
        }
        acc
    }

    pub fn total_degree(&self) -> u64 {
        self.factors
            .iter()
            .map(|(b, e)| b.total_degree().unwrap_or(0) as u64 * e)
            .sum()
    }

    pub fn multidegree(&self, grading: &[Vec<i64>]) -> Multidegree {
        if self.scalar.is_zero() || self.factors.iter().any(|(b, _)| b.is_zero()) {
            return Multidegree::Zero;
        }
        let g = grading.first().map_or(0, Vec::len);
        let mut out = vec![0i64; g];
        for (b, e) in &self.factors {
            match b.multidegree(grading) {
                Multidegree::Homogeneous(d) => {
                    for (o, x) in out.iter_mut().zip(d) {
                        *o += x * *e as i64;
                    }
                }
                other => return other,
            }
        }
        Multidegree::Homogeneous(out)
    }
}

impl FactoredPoly<CycNum> {
    pub fn to_json(&self, ring: &PolyRing, field: &CyclotomicField) -> Value {
        json!({
            "scalar": self.scalar.to_json(field),
            "factors": self.factors.iter().map(|(b, e)| json!({
                "base": b.to_json(ring, field),
                "exp": e,
            })).collect::<Vec<_>>(),
        })
    }
}
