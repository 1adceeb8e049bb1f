//! Laurent polynomials in q over Q(eps).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::cyclotomic::{CycNum, CyclotomicField};
use crate::error::{Error, Result};
use crate::scalar::Ring;

/// `sum c_k q^k` with finitely many nonzero `c_k`, `k` in Z.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentQ {
    terms: BTreeMap<i32, CycNum>,
}

impl LaurentQ {
    pub fn monomial(exp: i32, coef: CycNum) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(exp, coef);
        }
        LaurentQ { terms }
    }

    pub fn constant(c: CycNum) -> Self {
        Self::monomial(0, c)
    }

    /// q^k
    pub fn q_pow(k: i32) -> Self {
        Self::monomial(k, CycNum::one())
    }

    /// q - q^{-1}
    pub fn q_minus_q_inv() -> Self {
        Self::q_pow(1) - Self::q_pow(-1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &CycNum)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn coeff(&self, exp: i32) -> CycNum {
        self.terms.get(&exp).cloned().unwrap_or_else(CycNum::zero)
    }

    fn add_term(&mut self, exp: i32, c: &CycNum) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Substitutes q -> eps.
    pub fn evaluate_at_eps(&self, field: &'static CyclotomicField) -> CycNum {
        let mut acc = CycNum::zero();
        for (&k, c) in &self.terms {
            acc += c.clone() * &field.eps_pow(k as i64);
        }
        acc
    }

    /// Returns `g` with `(q - eps) g == self`.
    pub fn divide_by_q_minus_eps(&self, field: &'static CyclotomicField) -> Result<LaurentQ> {
        let (Some((&lo, _)), Some((&hi, _))) = (self.terms.first_key_value(), self.terms.last_key_value())
        else {
            return Ok(LaurentQ::default());
        };
        let eps = field.eps();
        // Synthetic division of q^{-lo} * self, highest coefficient first.
        let mut carry = CycNum::zero();
        let mut out = LaurentQ::default();
        for k in (lo + 1..=hi).rev() {
            carry = carry * &eps + &self.coeff(k);
            out.add_term(k - 1, &carry);
        }
        let remainder = carry * &eps + &self.coeff(lo);
        if !remainder.is_zero() {
            return Err(Error::NotDivisible(remainder.to_string()));
        }
        Ok(out)
    }

    pub fn to_json(&self, field: &CyclotomicField) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| json!({"exp": k, "coef": c.to_json(field)}))
                .collect(),
        )
    }

    pub fn parse_json(field: &'static CyclotomicField, v: &Value) -> Result<LaurentQ> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Invalid(format!("expected Laurent term array, got {v}")))?;
        let mut out = LaurentQ::default();
        for t in arr {
            let exp = t
                .get("exp")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Invalid(format!("Laurent term without integer exp: {t}")))?;
            let coef = field.parse_json(
                t.get("coef")
                    .ok_or_else(|| Error::Invalid(format!("Laurent term without coef: {t}")))?,
            )?;
            out.add_term(exp as i32, &coef);
        }
        Ok(out)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = LaurentQ::default();
        for (&a, x) in &self.terms {
            for (&b, y) in &other.terms {
                out.add_term(a + b, &(x.clone() * y));
            }
        }
        out
    }
}

impl fmt::Debug for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*q"),
                _ => format!("({c})*q^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Zero for LaurentQ {
    fn zero() -> Self {
        LaurentQ::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentQ {
    fn one() -> Self {
        LaurentQ::constant(CycNum::one())
    }
}

impl<'a> Add<&'a LaurentQ> for LaurentQ {
    type Output = LaurentQ;
    fn add(mut self, rhs: &'a LaurentQ) -> LaurentQ {
        self += rhs;
        self
    }
}

impl Add for LaurentQ {
    type Output = LaurentQ;
    fn add(self, rhs: LaurentQ) -> LaurentQ {
        self + &rhs
    }
}

impl<'a> Sub<&'a LaurentQ> for LaurentQ {
    type Output = LaurentQ;
    fn sub(mut self, rhs: &'a LaurentQ) -> LaurentQ {
        self -= rhs;
        self
    }
}

impl Sub for LaurentQ {
    type Output = LaurentQ;
    fn sub(self, rhs: LaurentQ) -> LaurentQ {
        self - &rhs
    }
}

impl<'a> Mul<&'a LaurentQ> for LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: &'a LaurentQ) -> LaurentQ {
        self.mul_ref(rhs)
    }
}

impl Mul for LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: LaurentQ) -> LaurentQ {
        self.mul_ref(&rhs)
    }
}

impl Neg for LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        LaurentQ {
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl AddAssign for LaurentQ {
    fn add_assign(&mut self, rhs: LaurentQ) {
        *self += &rhs;
    }
}

impl<'a> AddAssign<&'a LaurentQ> for LaurentQ {
    fn add_assign(&mut self, rhs: &'a LaurentQ) {
        for (&k, c) in &rhs.terms {
            self.add_term(k, c);
        }
    }
}

impl<'a> SubAssign<&'a LaurentQ> for LaurentQ {
    fn sub_assign(&mut self, rhs: &'a LaurentQ) {
        for (&k, c) in &rhs.terms {
            self.add_term(k, &-c.clone());
        }
    }
}

impl Ring for LaurentQ {
    fn from_int(v: i64) -> Self {
        LaurentQ::constant(CycNum::from_int(v))
    }

    fn weight(&self) -> usize {
        self.terms.values().map(Ring::weight).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::make_field;
    use proptest::prelude::*;

    fn q() -> LaurentQ {
        LaurentQ::q_pow(1)
    }

    fn eps_const(f: &'static CyclotomicField, k: i64) -> LaurentQ {
        LaurentQ::constant(f.eps_pow(k))
    }

    #[test]
    fn division_examples() {
        let f = make_field(3).unwrap();
        let d = q() - eps_const(f, 1);
        assert_eq!(d.divide_by_q_minus_eps(f).unwrap(), LaurentQ::one());
        let d2 = q() * &q() - eps_const(f, 2);
        assert_eq!(d2.divide_by_q_minus_eps(f).unwrap(), q() + eps_const(f, 1));
        assert!(matches!(
            LaurentQ::one().divide_by_q_minus_eps(f),
            Err(Error::NotDivisible(_))
        ));
        assert!(LaurentQ::zero().divide_by_q_minus_eps(f).unwrap().is_zero());
    }

    #[test]
    fn division_with_negative_powers() {
        let f = make_field(5).unwrap();
        // q^{-2} (q - eps) (q^3 + 2)
        let g = LaurentQ::q_pow(3) + &LaurentQ::from_int(2);
        let prod = LaurentQ::q_pow(-2) * (q() - eps_const(f, 1)) * &g;
        assert_eq!(prod.divide_by_q_minus_eps(f).unwrap(), LaurentQ::q_pow(-2) * g);
    }

    #[test]
    fn evaluation_examples() {
        let f = make_field(3).unwrap();
        assert_eq!(q().evaluate_at_eps(f), f.eps());
        assert_eq!(LaurentQ::q_pow(-1).evaluate_at_eps(f), f.eps_pow(2));
        let expected = CycNum::one() + f.from_int(2) * &f.eps();
        assert_eq!(LaurentQ::q_minus_q_inv().evaluate_at_eps(f), expected);
        // Oracle via field arithmetic: eps - eps^2.
        assert_eq!(expected, f.eps() - f.eps() * &f.eps());
    }

    #[test]
    fn json_roundtrip() {
        let f = make_field(4).unwrap();
        let x = LaurentQ::monomial(-3, f.eps()) + &LaurentQ::from_int(7);
        assert_eq!(LaurentQ::parse_json(f, &x.to_json(f)).unwrap(), x);
    }

    fn arb_laurent(l: i64) -> impl Strategy<Value = LaurentQ> {
        let f = make_field(l).unwrap();
        prop::collection::vec((-4i32..5, prop::collection::vec(-5i64..6, f.degree())), 0..6).prop_map(
            move |terms| {
                let mut out = LaurentQ::zero();
                for (k, coords) in terms {
                    let c: Vec<_> = coords
                        .into_iter()
                        .map(|v| num_rational::BigRational::from_integer(v.into()))
                        .collect();
                    out += LaurentQ::monomial(k, f.from_coords(&c));
                }
                out
            },
        )
    }

    proptest! {
        #[test]
        fn remove_value_then_divide(fq in arb_laurent(5)) {
            let f = make_field(5).unwrap();
            let g = fq.clone() - LaurentQ::constant(fq.evaluate_at_eps(f));
            prop_assert!(g.evaluate_at_eps(f).is_zero());
            let h = g.divide_by_q_minus_eps(f).unwrap();
            prop_assert_eq!((q() - eps_const(f, 1)) * h, g);
        }

        #[test]
        fn evaluation_is_multiplicative(a in arb_laurent(3), b in arb_laurent(3)) {
            let f = make_field(3).unwrap();
            prop_assert_eq!(
                (a.clone() * &b).evaluate_at_eps(f),
                a.evaluate_at_eps(f) * &b.evaluate_at_eps(f)
            );
            prop_assert_eq!(a.clone() * &b, b * &a);
        }
    }
}
