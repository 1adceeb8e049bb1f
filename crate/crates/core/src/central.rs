//! The central subalgebra generated by l-th powers of the generators, the
//! residue basis over it, and the regular-representation trace.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::laurent::LaurentQ;
use crate::ncpbw::{exps_degree, Algebra, Exps, NcElement};
use crate::poly::{Monomial, PolyRing};
use crate::scalar::{Field, Ring};
use crate::Poly;

/// `z_j = u_j g_j^l` together with the basis `[0, l-1]^N`.
pub struct CentralStructure {
    l: u32,
    n: usize,
    units: Vec<CycNum>,
    unit_invs: Vec<CycNum>,
    ring: PolyRing,
    gen_degrees: Vec<Vec<i64>>,
    basis: Vec<Exps>,
    residue_traces: RwLock<HashMap<Exps, Arc<Poly>>>,
}

/// Checks that every `g_j^l` is central and builds the structure with
/// prefactors `u_j = 1`.
pub fn validate_central(alg: &Algebra) -> Result<CentralStructure> {
    validate_central_with_units(alg, vec![CycNum::one(); alg.ngens()])
}

pub fn validate_central_with_units(alg: &Algebra, units: Vec<CycNum>) -> Result<CentralStructure> {
    let sp = &alg.special;
    let n = sp.ngens();
    let l = alg.l();
    if units.len() != n {
        return Err(Error::SizeMismatch(format!("{} prefactors for {n} generators", units.len())));
    }
    for j in 0..n {
        let p = NcElement::generator_pow(n, j, l);
        sp.check_central(&p)
            .map_err(|k| Error::NotCentral { power_of: Some(j + 1), generator: k })?;
    }
    let unit_invs = units
        .iter()
        .map(|u| u.inv().ok_or(Error::DivisionByZero))
        .collect::<Result<Vec<_>>>()?;
    let vars = sp
        .names()
        .iter()
        .map(|s| match s.strip_prefix('x') {
            Some(rest) => format!("z{rest}"),
            None => format!("z_{s}"),
        })
        .collect();
    let grading = sp
        .degrees()
        .iter()
        .map(|d| d.iter().map(|x| x * l as i64).collect())
        .collect();
    let basis = (0..(l as usize).pow(n as u32))
        .map(|mut idx| {
            let mut r = vec![0u32; n];
            for slot in r.iter_mut().rev() {
                *slot = (idx % l as usize) as u32;
                idx /= l as usize;
            }
            r
        })
        .collect();
    Ok(CentralStructure {
        l,
        n,
        units,
        unit_invs,
        ring: PolyRing::with_grading(vars, grading),
        gen_degrees: sp.degrees().to_vec(),
        basis,
        residue_traces: RwLock::new(HashMap::new()),
    })
}

impl CentralStructure {
    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn ngens(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn grading(&self) -> &[Vec<i64>] {
        self.ring.grading.as_deref().unwrap_or(&[])
    }

    pub fn units(&self) -> &[CycNum] {
        &self.units
    }

    /// Residue basis in lexicographic order; `basis()[0]` is the identity.
    pub fn basis(&self) -> &[Exps] {
        &self.basis
    }

    pub fn basis_index(&self, r: &[u32]) -> usize {
        r.iter().fold(0usize, |acc, &k| acc * self.l as usize + k as usize)
    }

    pub fn basis_element(&self, i: usize) -> NcElement<CycNum> {
        NcElement::monomial(self.basis[i].clone(), CycNum::one())
    }

    /// Degree of a PBW monomial in the generator grading.
    pub fn degree_of(&self, exps: &[u32]) -> Vec<i64> {
        exps_degree(exps, &self.gen_degrees)
    }

    /// Generic lift `u_j g_j^l` of the central variable `z_j`.
    pub fn lift(&self, j: usize) -> NcElement<LaurentQ> {
        NcElement::generator_pow(self.n, j, self.l).scale(&LaurentQ::constant(self.units[j].clone()))
    }

    pub fn lift_special(&self, j: usize) -> NcElement<CycNum> {
        NcElement::generator_pow(self.n, j, self.l).scale(&self.units[j])
    }

    /// Splits `k = l a + r` and returns `(r, u^{-a} z^a)`.
    fn split(&self, k: &[u32]) -> (Exps, Monomial, CycNum) {
        let l = self.l;
        let mut r = Vec::with_capacity(k.len());
        let mut a = Vec::with_capacity(k.len());
        let mut c = CycNum::one();
        for (i, &e) in k.iter().enumerate() {
            r.push(e % l);
            let q = e / l;
            a.push(q);
            if q > 0 && !self.unit_invs[i].is_one() {
                c = c * &self.unit_invs[i].pow(q as u64);
            }
        }
        (r, Monomial::new(a), c)
    }

    /// Coefficients over the central subalgebra, keyed by residue exponent.
    pub fn decompose(&self, x: &NcElement<CycNum>) -> BTreeMap<Exps, Poly> {
        let mut out: BTreeMap<Exps, Poly> = BTreeMap::new();
        for (k, c) in x.terms() {
            let (r, a, u) = self.split(k);
            out.entry(r).or_default().add_term(a, &(c.clone() * &u));
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Inverse of [`decompose`](Self::decompose), multiplying out in `alg`.
    pub fn reassemble(&self, alg: &Algebra, parts: &BTreeMap<Exps, Poly>) -> NcElement<CycNum> {
        let sp = &alg.special;
        let mut acc = NcElement::zero();
        for (r, p) in parts {
            let y = NcElement::monomial(r.clone(), CycNum::one());
            for (a, c) in p.terms() {
                let mut z = NcElement::scalar(self.n, c.clone());
                for (i, &e) in a.exps().iter().enumerate() {
                    for _ in 0..e {
                        z = sp.mul(&z, &self.lift_special(i));
                    }
                }
                acc = acc.add(&sp.mul(&z, &y));
            }
        }
        acc
    }

    /// Whether `deg(x^r)` lies in `l Z^g`, the only case with a nonzero trace.
    fn degree_allows_trace(&self, r: &[u32]) -> bool {
        self.degree_of(r).iter().all(|d| d % self.l as i64 == 0)
    }

    /// `tr(x^r)` for a residue exponent `r`, memoized.
    pub fn residue_trace(&self, alg: &Algebra, r: &[u32]) -> Arc<Poly> {
        if let Some(hit) = self.residue_traces.read().unwrap().get(r) {
            return hit.clone();
        }
        let value = if self.degree_allows_trace(r) {
            let x = NcElement::monomial(r.to_vec(), CycNum::one());
            self.basis
                .par_iter()
                .map(|y| {
                    let prod = alg.special.mul(&x, &NcElement::monomial(y.clone(), CycNum::one()));
                    let mut acc = Poly::zero();
                    for (k, c) in prod.terms() {
                        let (res, a, u) = self.split(k);
                        if &res == y {
                            acc.add_term(a, &(c.clone() * &u));
                        }
                    }
                    acc
                })
                .reduce(Poly::zero, |a, b| a + b)
        } else {
            Poly::zero()
        };
        let value = Arc::new(value);
        self.residue_traces.write().unwrap().insert(r.to_vec(), value.clone());
        value
    }

    /// The regular-representation trace over the central subalgebra.
    pub fn trace(&self, alg: &Algebra, x: &NcElement<CycNum>) -> Poly {
        let mut acc = Poly::zero();
        for (k, c) in x.terms() {
            let (r, a, u) = self.split(k);
            let t = self.residue_trace(alg, &r);
            if !t.is_zero() {
                acc += t.mul_monomial(&a, &(c.clone() * &u));
            }
        }
        acc
    }

    /// `sum_y coeff_y(decompose(x y))` evaluated literally.
    pub fn trace_direct(&self, alg: &Algebra, x: &NcElement<CycNum>) -> Poly {
        let mut acc = Poly::zero();
        for y in &self.basis {
            let prod = alg.special.mul(x, &NcElement::monomial(y.clone(), CycNum::one()));
            if let Some(p) = self.decompose(&prod).remove(y) {
                acc += p;
            }
        }
        acc
    }

    /// Central element `z^a` as an algebra element `prod (u_j g_j^l)^{a_j}`.
    pub fn central_element(&self, alg: &Algebra, p: &Poly) -> NcElement<CycNum> {
        let mut parts = BTreeMap::new();
        parts.insert(vec![0; self.n], p.clone());
        self.reassemble(alg, &parts)
    }

    pub fn decomposition_to_json(&self, parts: &BTreeMap<Exps, Poly>, field: &crate::CyclotomicField) -> Value {
        Value::Array(
            parts
                .iter()
                .map(|(r, p)| json!({"basis": r, "coef": p.to_json(&self.ring, field)}))
                .collect(),
        )
    }
}
