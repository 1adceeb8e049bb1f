//! Straightening presentations and the PBW normal-form engine.
//!
//! A [`Presentation`] lists generators g_1 < ... < g_N and, for every pair
//! m > j, a rule `g_m g_j = c g_j g_m + tail` whose tail monomials only involve
//! generators strictly between g_j and g_m. Elements are kept as combinations
//! of ordered monomials g_1^k_1 ... g_N^k_N.
//!
//! The coefficient ring is a type parameter. `Presentation<LaurentQ>` is the
//! generic algebra over Q(eps)[q, 1/q]; `Presentation<CycNum>` is its
//! specialization at q = eps. Mixing the two is a type error.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde_json::{json, Value};

use crate::cyclotomic::{make_field, CycNum, CyclotomicField};
use crate::error::{Error, Result};
use crate::laurent::LaurentQ;
use crate::poly::Multidegree;
use crate::scalar::Ring;

/// PBW exponent vector, always of length N.
pub type Exps = Vec<u32>;
type Terms<R> = BTreeMap<Exps, R>;

/// Finite combination of ordered PBW monomials.
#[derive(Clone, PartialEq, Default)]
pub struct NcElement<R> {
    terms: Terms<R>,
}

impl<R: Ring> NcElement<R> {
    pub fn zero() -> Self {
        NcElement { terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Exps, c: R) -> Self {
        let mut out = Self::zero();
        out.add_term(exps, &c);
        out
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(vec![0; n], R::one())
    }

    pub fn scalar(n: usize, c: R) -> Self {
        Self::monomial(vec![0; n], c)
    }

    pub fn generator(n: usize, i: usize) -> Self {
        Self::generator_pow(n, i, 1)
    }

    pub fn generator_pow(n: usize, i: usize, e: u32) -> Self {
        let mut exps = vec![0; n];
        exps[i] = e;
        Self::monomial(exps, R::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exps, R)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &R)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> R {
        self.terms.get(exps).cloned().unwrap_or_else(R::zero)
    }

    pub fn add_term(&mut self, exps: Exps, c: &R) {
        add_into(&mut self.terms, exps, c);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &-c.clone());
        }
        out
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (e.clone(), x.clone() * c)))
    }

    pub fn map_coeffs<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> NcElement<S> {
        NcElement::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn try_map_coeffs<S: Ring>(&self, mut f: impl FnMut(&R) -> Result<S>) -> Result<NcElement<S>> {
        let mut out = NcElement::zero();
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c)?);
        }
        Ok(out)
    }

    pub fn multidegree(&self, degrees: &[Vec<i64>]) -> Multidegree {
        let mut it = self.terms.keys().map(|e| exps_degree(e, degrees));
        let Some(first) = it.next() else {
            return Multidegree::Zero;
        };
        if it.all(|d| d == first) {
            Multidegree::Homogeneous(first)
        } else {
            Multidegree::Inhomogeneous
        }
    }
}

impl<R: std::fmt::Debug> std::fmt::Debug for NcElement<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("({c:?}){e:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn exps_degree(exps: &[u32], degrees: &[Vec<i64>]) -> Vec<i64> {
    let g = degrees.first().map_or(0, Vec::len);
    let mut out = vec![0i64; g];
    for (i, &k) in exps.iter().enumerate() {
        for (o, d) in out.iter_mut().zip(&degrees[i]) {
            *o += k as i64 * d;
        }
    }
    out
}

fn add_into<R: Ring>(terms: &mut Terms<R>, exps: Exps, c: &R) {
    if c.is_zero() {
        return;
    }
    match terms.entry(exps) {
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

fn add_scaled<R: Ring>(acc: &mut Terms<R>, src: &Terms<R>, c: &R) {
    for (e, x) in src {
        add_into(acc, e.clone(), &(x.clone() * c));
    }
}

/// `g_m g_j = c g_j g_m + sum tail`, indices 0-based with `m > j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation<R> {
    pub m: usize,
    pub j: usize,
    pub c: R,
    /// `(coefficient, exponent vector)`; an empty vector is the constant 1.
    pub tail: Vec<(R, Vec<u32>)>,
}

type PairKey = (u32, u32, u32, u32);

pub struct Presentation<R> {
    names: Vec<String>,
    degrees: Vec<Vec<i64>>,
    field: &'static CyclotomicField,
    /// `rels[m][j]` for `j < m`.
    rels: Vec<Vec<(R, Terms<R>)>>,
    relations: Vec<Relation<R>>,
    pair_cache: RwLock<HashMap<PairKey, Arc<Terms<R>>>>,
    mul_cache: RwLock<HashMap<(Exps, Exps), Arc<Terms<R>>>>,
}

impl<R: Ring> Presentation<R> {
    /// Validates and builds a presentation.
    pub fn new(
        field: &'static CyclotomicField,
        names: Vec<String>,
        degrees: Vec<Vec<i64>>,
        relations: Vec<Relation<R>>,
    ) -> Result<Self> {
        let n = names.len();
        if degrees.len() != n {
            return Err(Error::BadPresentation(format!(
                "{} generators but {} degree vectors",
                n,
                degrees.len()
            )));
        }
        let g = degrees.first().map_or(0, Vec::len);
        if degrees.iter().any(|d| d.len() != g) {
            return Err(Error::BadPresentation("degree vectors of unequal length".into()));
        }
        let mut table: Vec<Vec<Option<(R, Terms<R>)>>> = (0..n).map(|m| vec![None; m]).collect();
        for rel in &relations {
            let (m, j) = (rel.m, rel.j);
            if m >= n || j >= m {
                return Err(Error::BadPresentation(format!(
                    "relation indices ({}, {}) must satisfy 1 <= j < m <= {n}",
                    m + 1,
                    j + 1
                )));
            }
            if rel.c.is_zero() {
                return Err(Error::Degenerate { m: m + 1, j: j + 1 });
            }
            let target: Vec<i64> = degrees[m].iter().zip(&degrees[j]).map(|(a, b)| a + b).collect();
            let mut tail = Terms::new();
            for (c, e) in &rel.tail {
                if e.is_empty() || e.iter().all(|&k| k == 0) {
                    if target.iter().any(|&d| d != 0) {
                        return Err(Error::Grading {
                            m: m + 1,
                            j: j + 1,
                            detail: format!("constant tail term but deg g_m + deg g_j = {target:?}"),
                        });
                    }
                    add_into(&mut tail, vec![0; n], c);
                    continue;
                }
                if e.len() != n {
                    return Err(Error::BadPresentation(format!(
                        "tail exponent {e:?} of relation ({}, {}) has length {}, expected {n}",
                        m + 1,
                        j + 1,
                        e.len()
                    )));
                }
                if e.iter().enumerate().any(|(i, &k)| k > 0 && (i <= j || i >= m)) {
                    return Err(Error::NonLsShape { m: m + 1, j: j + 1, tail: e.clone() });
                }
                let d = exps_degree(e, &degrees);
                if d != target {
                    return Err(Error::Grading {
                        m: m + 1,
                        j: j + 1,
                        detail: format!("tail term {e:?} has degree {d:?}, expected {target:?}"),
                    });
                }
                add_into(&mut tail, e.clone(), c);
            }
            if table[m][j].is_some() {
                return Err(Error::BadPresentation(format!("duplicate relation ({}, {})", m + 1, j + 1)));
            }
            table[m][j] = Some((rel.c.clone(), tail));
        }
        let mut rels = Vec::with_capacity(n);
        for (m, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(m);
            for (j, r) in row.into_iter().enumerate() {
                out.push(r.ok_or(Error::MissingRelation { m: m + 1, j: j + 1 })?);
            }
            rels.push(out);
        }
        Ok(Presentation {
            names,
            degrees,
            field,
            rels,
            relations,
            pair_cache: RwLock::new(HashMap::new()),
            mul_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[Vec<i64>] {
        &self.degrees
    }

    pub fn field(&self) -> &'static CyclotomicField {
        self.field
    }

    pub fn relations(&self) -> &[Relation<R>] {
        &self.relations
    }

    pub fn generator(&self, i: usize) -> NcElement<R> {
        NcElement::generator(self.ngens(), i)
    }

    pub fn one(&self) -> NcElement<R> {
        NcElement::one(self.ngens())
    }

    /// Drops memoized products.
    pub fn clear_cache(&self) {
        self.pair_cache.write().unwrap().clear();
        self.mul_cache.write().unwrap().clear();
    }

    /// Straightens `c * g_{w_1} g_{w_2} ...` (0-based indices).
    pub fn normal_form(&self, word: &[usize], c: &R) -> NcElement<R> {
        let n = self.ngens();
        let mut acc = NcElement::scalar(n, c.clone());
        for &i in word {
            acc = self.mul(&acc, &self.generator(i));
        }
        acc
    }

    pub fn mul(&self, a: &NcElement<R>, b: &NcElement<R>) -> NcElement<R> {
        let mut out = Terms::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let prod = self.mul_mono(ea, eb);
                add_scaled(&mut out, &prod, &(ca.clone() * cb));
            }
        }
        NcElement { terms: out }
    }

    pub fn commutator(&self, a: &NcElement<R>, b: &NcElement<R>) -> NcElement<R> {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    pub fn pow(&self, a: &NcElement<R>, e: u32) -> NcElement<R> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Normal form of the product of two ordered monomials.
    pub fn mul_mono(&self, a: &[u32], b: &[u32]) -> Arc<Terms<R>> {
        let last_a = a.iter().rposition(|&k| k > 0);
        let first_b = b.iter().position(|&k| k > 0);
        let (m, j) = match (last_a, first_b) {
            (Some(m), Some(j)) if m > j => (m, j),
            _ => {
                let mut t = Terms::new();
                t.insert(a.iter().zip(b).map(|(x, y)| x + y).collect(), R::one());
                return Arc::new(t);
            }
        };
        let key = (a.to_vec(), b.to_vec());
        if let Some(hit) = self.mul_cache.read().unwrap().get(&key) {
            return hit.clone();
        }
        let mut head = a.to_vec();
        let p = std::mem::take(&mut head[m]);
        let mut rest = b.to_vec();
        let s = std::mem::take(&mut rest[j]);
        let swapped = self.pair_power(m, p, j, s);
        let mut out = Terms::new();
        for (t, c) in swapped.iter() {
            let left = self.mul_mono(&head, t);
            for (u, d) in left.iter() {
                let full = self.mul_mono(u, &rest);
                add_scaled(&mut out, &full, &(c.clone() * d));
            }
        }
        let out = Arc::new(out);
        self.mul_cache.write().unwrap().insert(key, out.clone());
        out
    }

    /// Normal form of `g_m^p g_j^s` for `m > j`.
    fn pair_power(&self, m: usize, p: u32, j: usize, s: u32) -> Arc<Terms<R>> {
        let key = (m as u32, p, j as u32, s);
        if let Some(hit) = self.pair_cache.read().unwrap().get(&key) {
            return hit.clone();
        }
        let n = self.ngens();
        let (c, tail) = &self.rels[m][j];
        let mut out = Terms::new();
        if p == 1 && s == 1 {
            let mut e = vec![0; n];
            e[m] = 1;
            e[j] = 1;
            add_into(&mut out, e, c);
            add_scaled(&mut out, tail, &R::one());
        } else if p == 1 {
            // g_m g_j^s = c g_j (g_m g_j^{s-1}) + tail g_j^{s-1}
            let inner = self.pair_power(m, 1, j, s - 1);
            let mut gj = vec![0; n];
            gj[j] = 1;
            for (t, x) in inner.iter() {
                add_scaled(&mut out, &self.mul_mono(&gj, t), &(c.clone() * x));
            }
            let mut gj_rest = vec![0; n];
            gj_rest[j] = s - 1;
            for (t, x) in tail {
                add_scaled(&mut out, &self.mul_mono(t, &gj_rest), x);
            }
        } else {
            // g_m^p g_j^s = g_m^{p-1} (g_m g_j^s)
            let inner = self.pair_power(m, 1, j, s);
            let mut gm = vec![0; n];
            gm[m] = p - 1;
            for (t, x) in inner.iter() {
                add_scaled(&mut out, &self.mul_mono(&gm, t), x);
            }
        }
        let out = Arc::new(out);
        self.pair_cache.write().unwrap().insert(key, out.clone());
        out
    }

    /// Whether `x` commutes with every generator; on failure reports the first
    /// generator (1-based) that witnesses it.
    pub fn check_central(&self, x: &NcElement<R>) -> std::result::Result<(), usize> {
        for k in 0..self.ngens() {
            let g = self.generator(k);
            if !self.commutator(x, &g).is_zero() {
                return Err(k + 1);
            }
        }
        Ok(())
    }
}

impl Presentation<LaurentQ> {
    /// The presentation at q = eps.
    pub fn specialize(&self) -> Result<Presentation<CycNum>> {
        let f = self.field;
        let relations = self
            .relations
            .iter()
            .map(|r| Relation {
                m: r.m,
                j: r.j,
                c: r.c.evaluate_at_eps(f),
                tail: r.tail.iter().map(|(c, e)| (c.evaluate_at_eps(f), e.clone())).collect(),
            })
            .collect();
        Presentation::new(f, self.names.clone(), self.degrees.clone(), relations)
    }

    pub fn specialize_element(&self, x: &NcElement<LaurentQ>) -> NcElement<CycNum> {
        x.map_coeffs(|c| c.evaluate_at_eps(self.field))
    }

    pub fn to_json(&self) -> Value {
        let f = self.field;
        json!({
            "l": f.order(),
            "mode": "generic",
            "names": self.names,
            "degrees": self.degrees,
            "relations": self.relations.iter().map(|r| json!({
                "m": r.m + 1,
                "j": r.j + 1,
                "c": r.c.to_json(f),
                "tail": r.tail.iter().map(|(c, e)| json!({"coef": c.to_json(f), "exp": e})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// A generic algebra together with its specialization at q = eps.
pub struct Algebra {
    pub name: String,
    pub generic: Option<Presentation<LaurentQ>>,
    pub special: Presentation<CycNum>,
}

impl Algebra {
    pub fn from_generic(name: impl Into<String>, generic: Presentation<LaurentQ>) -> Result<Self> {
        let special = generic.specialize()?;
        Ok(Algebra { name: name.into(), generic: Some(generic), special })
    }

    pub fn field(&self) -> &'static CyclotomicField {
        self.special.field()
    }

    pub fn l(&self) -> u32 {
        self.field().order()
    }

    pub fn ngens(&self) -> usize {
        self.special.ngens()
    }

    pub fn generic(&self) -> Result<&Presentation<LaurentQ>> {
        self.generic.as_ref().ok_or_else(|| {
            Error::Invalid(format!("algebra {} was given only in specialized mode", self.name))
        })
    }

    /// `d_x(sigma(y)) = sigma((x y - y x) / (q - eps))`.
    pub fn lifted_derivation(
        &self,
        x: &NcElement<LaurentQ>,
        y: &NcElement<LaurentQ>,
    ) -> Result<NcElement<CycNum>> {
        let g = self.generic()?;
        let sx = g.specialize_element(x);
        self.special
            .check_central(&sx)
            .map_err(|k| Error::NotCentral { power_of: None, generator: k })?;
        self.divided_commutator(x, y)
    }

    /// `sigma((x y - y x) / (q - eps))` without the centrality precheck.
    pub fn divided_commutator(
        &self,
        x: &NcElement<LaurentQ>,
        y: &NcElement<LaurentQ>,
    ) -> Result<NcElement<CycNum>> {
        let g = self.generic()?;
        let f = self.field();
        g.commutator(x, y)
            .try_map_coeffs(|c| Ok(c.divide_by_q_minus_eps(f)?.evaluate_at_eps(f)))
    }

    /// Parses the algebra spec-file JSON (or a `{"builtin": ...}` object).
    pub fn from_json(v: &Value) -> Result<Self> {
        if v.get("builtin").is_some() {
            return crate::formulas::BuiltinSpec::from_json(v)?.build();
        }
        let l = v
            .get("l")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Invalid("spec needs integer \"l\"".into()))?;
        let field = make_field(l)?;
        let mode = v.get("mode").and_then(Value::as_str).unwrap_or("generic");
        let names: Vec<String> = serde_json::from_value(v.get("names").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Invalid(format!("spec names: {e}")))?;
        let degrees: Vec<Vec<i64>> =
            serde_json::from_value(v.get("degrees").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Invalid(format!("spec degrees: {e}")))?;
        let mut relations = Vec::new();
        for r in v.get("relations").and_then(Value::as_array).into_iter().flatten() {
            let idx = |k: &str| -> Result<usize> {
                let i = r
                    .get(k)
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::Invalid(format!("relation needs positive integer \"{k}\": {r}")))?;
                if i == 0 {
                    return Err(Error::Invalid(format!("relation indices are 1-based: {r}")));
                }
                Ok(i as usize - 1)
            };
            let c = LaurentQ::parse_json(field, r.get("c").unwrap_or(&Value::Null))?;
            let mut tail = Vec::new();
            for t in r.get("tail").and_then(Value::as_array).into_iter().flatten() {
                let coef = LaurentQ::parse_json(field, t.get("coef").unwrap_or(&Value::Null))?;
                let exp: Vec<u32> = serde_json::from_value(t.get("exp").cloned().unwrap_or(json!([])))
                    .map_err(|e| Error::Invalid(format!("tail exponent: {e}")))?;
                tail.push((coef, exp));
            }
            relations.push(Relation { m: idx("m")?, j: idx("j")?, c, tail });
        }
        let name = v.get("name").and_then(Value::as_str).unwrap_or("custom").to_string();
        match mode {
            "generic" => Algebra::from_generic(name, Presentation::new(field, names, degrees, relations)?),
            "specialized" => {
                let relations = relations
                    .into_iter()
                    .map(|r| Relation {
                        m: r.m,
                        j: r.j,
                        c: r.c.evaluate_at_eps(field),
                        tail: r.tail.into_iter().map(|(c, e)| (c.evaluate_at_eps(field), e)).collect(),
                    })
                    .collect();
                Ok(Algebra {
                    name,
                    generic: None,
                    special: Presentation::new(field, names, degrees, relations)?,
                })
            }
            other => Err(Error::Invalid(format!("unknown mode {other:?}"))),
        }
    }
}

impl NcElement<LaurentQ> {
    /// `c q^k`-scaled copy.
    pub fn scale_q(&self, k: i32) -> Self {
        self.scale(&LaurentQ::q_pow(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{qmatrix, qplane, qweyl};
    use num_traits::{One, Zero};
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lq(k: i32) -> LaurentQ {
        LaurentQ::q_pow(k)
    }

    #[test]
    fn weyl_rule() {
        let a = qweyl(3).unwrap();
        let g = a.generic().unwrap();
        let nf = g.normal_form(&[1, 0], &LaurentQ::one());
        let expected = NcElement::from_terms([(vec![1, 1], lq(-1)), (vec![0, 0], -lq(-1))]);
        assert_eq!(nf, expected);
    }

    #[test]
    fn qmatrix_rule() {
        let a = qmatrix(2, 2, 3).unwrap();
        let g = a.generic().unwrap();
        // column-major: x11=0, x21=1, x12=2, x22=3
        let nf = g.normal_form(&[3, 0], &LaurentQ::one());
        let expected = NcElement::from_terms([
            (vec![1, 0, 0, 1], LaurentQ::one()),
            (vec![0, 1, 1, 0], -LaurentQ::q_minus_q_inv()),
        ]);
        assert_eq!(nf, expected);
    }

    #[test]
    fn sorted_words_are_fixed() {
        let a = qmatrix(2, 2, 3).unwrap();
        let g = a.generic().unwrap();
        let nf = g.normal_form(&[0, 0, 1, 2, 2, 3], &LaurentQ::one());
        assert_eq!(nf, NcElement::monomial(vec![2, 1, 2, 1], LaurentQ::one()));
    }

    #[test]
    fn rejects_non_ls_tail() {
        let f = make_field(3).unwrap();
        let names = vec!["a".into(), "b".into(), "c".into()];
        let degrees = vec![vec![0], vec![0], vec![0]];
        let rel = |m, j, tail: Vec<(LaurentQ, Vec<u32>)>| Relation { m, j, c: lq(1), tail };
        let err = Presentation::new(
            f,
            names.clone(),
            degrees.clone(),
            vec![rel(1, 0, vec![(lq(0), vec![0, 0, 1])]), rel(2, 0, vec![]), rel(2, 1, vec![])],
        )
        .err()
        .unwrap();
        assert_eq!(err, Error::NonLsShape { m: 2, j: 1, tail: vec![0, 0, 1] });
        let err = Presentation::new(
            f,
            names.clone(),
            vec![vec![1], vec![1], vec![1]],
            vec![rel(1, 0, vec![]), rel(2, 0, vec![(lq(0), vec![0, 1, 0])]), rel(2, 1, vec![])],
        )
        .err()
        .unwrap();
        assert!(matches!(err, Error::Grading { m: 3, j: 1, .. }));
        let err = Presentation::new(
            f,
            names.clone(),
            degrees.clone(),
            vec![
                Relation { m: 1, j: 0, c: LaurentQ::zero(), tail: vec![] },
                rel(2, 0, vec![]),
                rel(2, 1, vec![]),
            ],
        )
        .err()
        .unwrap();
        assert_eq!(err, Error::Degenerate { m: 2, j: 1 });
        let err = Presentation::new(f, names, degrees, vec![rel(1, 0, vec![])]).err().unwrap();
        assert_eq!(err, Error::MissingRelation { m: 3, j: 1 });
    }

    #[test]
    fn weyl_specialization_example() {
        let a = qweyl(3).unwrap();
        let f = a.field();
        let nf = a.special.normal_form(&[1, 0], &CycNum::one());
        let e2 = f.eps_pow(2);
        let expected = NcElement::from_terms([(vec![1, 1], e2.clone()), (vec![0, 0], -e2)]);
        assert_eq!(nf, expected);
        let generic = a.generic().unwrap().normal_form(&[1, 0], &LaurentQ::one());
        assert_eq!(a.generic().unwrap().specialize_element(&generic), expected);
    }

    #[test]
    fn specialize_scalar_times_generator() {
        let a = qweyl(3).unwrap();
        let g = a.generic().unwrap();
        let x = g.generator(0).scale(&lq(1));
        assert_eq!(g.specialize_element(&x), a.special.generator(0).scale(&a.field().eps()));
    }

    /// Product of [m]_q = 1 + q + ... + q^{m-1} for m = 1..l.
    fn q_factorial(l: u32) -> LaurentQ {
        let mut acc = LaurentQ::one();
        for m in 1..=l {
            let mut qm = LaurentQ::zero();
            for i in 0..m {
                qm += lq(i as i32);
            }
            acc = acc * &qm;
        }
        acc
    }

    #[test]
    fn weyl_constant_term_of_power_commutator() {
        // With x2 ordered before x1 the normal form is sum t_i x2^i x1^i and
        // the constant term is the q-factorial.
        for l in [2u32, 3, 4] {
            let a = crate::formulas::qweyl_reversed(l).unwrap();
            let g = a.generic().unwrap();
            // generators in this presentation: index 0 = x2, index 1 = x1
            let x1l = NcElement::generator_pow(2, 1, l);
            let x2l = NcElement::generator_pow(2, 0, l);
            let lhs = g.mul(&x1l, &x2l).sub(&g.mul(&x2l, &x1l).scale_q((l * l) as i32));
            assert_eq!(lhs.coeff(&[0, 0]), q_factorial(l), "l={l}");
        }
    }

    fn random_word(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<usize> {
        (0..len).map(|_| rng.gen_range(0..n)).collect()
    }

    fn random_element(rng: &mut ChaCha8Rng, g: &Presentation<LaurentQ>, terms: usize) -> NcElement<LaurentQ> {
        let mut acc = NcElement::zero();
        for _ in 0..terms {
            let len = rng.gen_range(0..4);
            let w = random_word(rng, g.ngens(), len);
            let c = lq(rng.gen_range(-2..3)).scale_int(rng.gen_range(-3..4));
            acc = acc.add(&g.normal_form(&w, &c));
        }
        acc
    }

    trait ScaleInt {
        fn scale_int(self, k: i64) -> Self;
    }
    impl ScaleInt for LaurentQ {
        fn scale_int(self, k: i64) -> Self {
            self * &LaurentQ::from_int(k)
        }
    }

    #[test]
    fn associativity_and_specialization() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let algebras = [qweyl(3).unwrap(), qmatrix(2, 2, 3).unwrap(), qplane(4).unwrap()];
        for a in &algebras {
            let g = a.generic().unwrap();
            for _ in 0..50 {
                let x = random_element(&mut rng, g, 2);
                let y = random_element(&mut rng, g, 2);
                let z = random_element(&mut rng, g, 2);
                assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)), "{}", a.name);
                let sx = g.specialize_element(&x);
                let sy = g.specialize_element(&y);
                assert_eq!(g.specialize_element(&g.mul(&x, &y)), a.special.mul(&sx, &sy));
                let one = g.one();
                assert_eq!(g.mul(&one, &y), y);
                assert_eq!(g.mul(&x.add(&y), &z), g.mul(&x, &z).add(&g.mul(&y, &z)));
            }
        }
    }

    #[test]
    fn normal_form_commutes_with_specialization() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = qmatrix(2, 2, 3).unwrap();
        let g = a.generic().unwrap();
        for _ in 0..30 {
            let w = random_word(&mut rng, 4, 6);
            let generic = g.normal_form(&w, &LaurentQ::one());
            assert_eq!(g.specialize_element(&generic), a.special.normal_form(&w, &CycNum::one()));
            // idempotent: re-straightening each monomial leaves it unchanged
            for (e, _) in generic.terms() {
                let word: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat(i).take(k as usize)).collect();
                assert_eq!(g.normal_form(&word, &LaurentQ::one()), NcElement::monomial(e.clone(), LaurentQ::one()));
            }
        }
    }

    #[test]
    fn normal_form_is_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for a in [qweyl(3).unwrap(), qmatrix(2, 3, 3).unwrap()] {
            let g = a.generic().unwrap();
            for _ in 0..30 {
                let w = random_word(&mut rng, g.ngens(), 5);
                let e: Vec<u32> = (0..g.ngens()).map(|i| w.iter().filter(|&&x| x == i).count() as u32).collect();
                let nf = g.normal_form(&w, &LaurentQ::one());
                assert_eq!(nf.multidegree(g.degrees()), Multidegree::Homogeneous(exps_degree(&e, g.degrees())));
            }
        }
    }

    #[test]
    fn lifted_derivation_qmatrix_example() {
        let l = 3;
        let a = qmatrix(2, 2, l).unwrap();
        let g = a.generic().unwrap();
        let f = a.field();
        let x = NcElement::generator_pow(4, 0, l);
        let y = g.generator(3);
        let d = a.lifted_derivation(&x, &y).unwrap();
        // 2 l eps^{-2} x12 x21 x11^{l-1}, straightened in the specialized algebra.
        let mut word = vec![2, 1];
        word.extend(std::iter::repeat(0).take(l as usize - 1));
        let c = f.from_int(2 * l as i64) * &f.eps_pow(-2);
        assert_eq!(d, a.special.normal_form(&word, &c));
        assert!(a.lifted_derivation(&x, &g.one()).unwrap().is_zero());
    }

    #[test]
    fn lifted_derivation_rejects_non_central() {
        let a = qmatrix(2, 2, 3).unwrap();
        let g = a.generic().unwrap();
        let err = a.lifted_derivation(&g.generator(0), &g.generator(3)).unwrap_err();
        assert!(matches!(err, Error::NotCentral { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn lifted_derivation_leibniz(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = qweyl(3).unwrap();
            let g = a.generic().unwrap();
            let x = NcElement::generator_pow(2, rng.gen_range(0..2), 3);
            let y = random_element(&mut rng, g, 2);
            let y2 = random_element(&mut rng, g, 2);
            let lhs = a.lifted_derivation(&x, &g.mul(&y, &y2)).unwrap();
            let sy = g.specialize_element(&y);
            let sy2 = g.specialize_element(&y2);
            let rhs = a.special.mul(&a.lifted_derivation(&x, &y).unwrap(), &sy2)
                .add(&a.special.mul(&sy, &a.lifted_derivation(&x, &y2).unwrap()));
            prop_assert_eq!(lhs, rhs);
            let sum = a.lifted_derivation(&x, &y.add(&y2)).unwrap();
            prop_assert_eq!(sum, a.lifted_derivation(&x, &y).unwrap().add(&a.lifted_derivation(&x, &y2).unwrap()));
        }
    }

    #[test]
    fn spec_json_roundtrip() {
        let a = qmatrix(2, 2, 3).unwrap();
        let j = a.generic().unwrap().to_json();
        let b = Algebra::from_json(&j).unwrap();
        let w = [3usize, 2, 1, 0];
        assert_eq!(
            b.generic().unwrap().normal_form(&w, &LaurentQ::one()),
            a.generic().unwrap().normal_form(&w, &LaurentQ::one())
        );
        let mut spec = j.clone();
        spec["mode"] = json!("specialized");
        let c = Algebra::from_json(&spec).unwrap();
        assert!(c.generic().is_err());
        assert_eq!(c.special.normal_form(&w, &CycNum::one()), a.special.normal_form(&w, &CycNum::one()));
        let mut bad = j;
        bad["l"] = json!(1);
        assert_eq!(Algebra::from_json(&bad).err().unwrap().code(), "invalid-order");
    }
}
