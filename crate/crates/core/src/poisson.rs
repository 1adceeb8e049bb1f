//! The Poisson bracket induced on the center, derivation matrices of lifted
//! derivations, and the normality and trace identities as checks.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::central::CentralStructure;
use crate::cyclotomic::{CycNum, CyclotomicField, PrimeEmbedding};
use crate::discriminant::{discriminant_eval, discriminant_of_set, fp_coef, md_pairing, GramData};
use crate::error::{Error, Result};
use crate::laurent::LaurentQ;
use crate::matrix::Dual;
use crate::modular::Fp;
use crate::ncpbw::{Algebra, NcElement};
use crate::poly::PolyRing;
use crate::scalar::Ring;
use crate::{Factored, Poly};

/// `{z_a, z_b}` for `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable {
    n: usize,
    entries: BTreeMap<(usize, usize), Poly>,
    pub ring: PolyRing,
}

impl BracketTable {
    /// A table from explicit entries keyed by `(a, b)` with `a < b`.
    pub fn new(n: usize, ring: PolyRing, entries: BTreeMap<(usize, usize), Poly>) -> Self {
        let entries = entries.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        BracketTable { n, entries, ring }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> Poly {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => Poly::zero(),
            Less => self.entries.get(&(a, b)).cloned().unwrap_or_default(),
            Greater => -self.entries.get(&(b, a)).cloned().unwrap_or_default(),
        }
    }

    /// The biderivation extension of the table.
    pub fn bracket(&self, f: &Poly, g: &Poly) -> Poly {
        let df: Vec<Poly> = (0..self.n).map(|a| f.partial_derivative(a)).collect();
        let dg: Vec<Poly> = (0..self.n).map(|a| g.partial_derivative(a)).collect();
        let mut acc = Poly::zero();
        for ((a, b), t) in &self.entries {
            let s = df[*a].clone() * &dg[*b] - df[*b].clone() * &dg[*a];
            if !s.is_zero() {
                acc += s * t;
            }
        }
        acc
    }

    /// `{z_a, f}`.
    pub fn hamiltonian(&self, a: usize, f: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for b in 0..self.n {
            let t = self.get(a, b);
            if !t.is_zero() {
                acc += f.partial_derivative(b) * &t;
            }
        }
        acc
    }

    /// First generator triple on which the Jacobi identity fails.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let z = |i| Poly::var(i);
        for a in 0..self.n {
            for b in a + 1..self.n {
                for c in b + 1..self.n {
                    let s = self.bracket(&z(a), &self.get(b, c))
                        + self.bracket(&z(b), &self.get(c, a))
                        + self.bracket(&z(c), &self.get(a, b));
                    if !s.is_zero() {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn to_json(&self, field: &CyclotomicField) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|((a, b), p)| {
                    json!({
                        "a": self.ring.vars[*a],
                        "b": self.ring.vars[*b],
                        "value": p.to_json(&self.ring, field),
                    })
                })
                .collect(),
        )
    }
}

/// `{f, g}` under the table.
pub fn bracket_poly(f: &Poly, g: &Poly, t: &BracketTable) -> Poly {
    t.bracket(f, g)
}

/// `sigma((z_a z_b - z_b z_a) / (q - eps))` for the canonical lifts, before
/// any check that it is central.
pub fn divided_bracket(alg: &Algebra, cs: &CentralStructure, a: usize, b: usize) -> Result<NcElement<CycNum>> {
    alg.divided_commutator(&cs.lift(a), &cs.lift(b))
}

fn central_part(
    cs: &CentralStructure,
    x: &NcElement<CycNum>,
) -> std::result::Result<Poly, ()> {
    let mut parts = cs.decompose(x);
    let zero = vec![0u32; cs.ngens()];
    let p = parts.remove(&zero).unwrap_or_default();
    if parts.is_empty() {
        Ok(p)
    } else {
        Err(())
    }
}

/// Brackets of the central generators from divided commutators of lifts.
pub fn bracket_generators(alg: &Algebra, cs: &CentralStructure) -> Result<BracketTable> {
    let n = cs.ngens();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let values: Vec<Result<Poly>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let dc = divided_bracket(alg, cs, a, b)?;
            central_part(cs, &dc).map_err(|()| Error::NotClosed {
                a: a + 1,
                b: b + 1,
                element: format!("{dc:?}"),
            })
        })
        .collect();
    let mut entries = BTreeMap::new();
    for (k, v) in pairs.into_iter().zip(values) {
        entries.insert(k, v?);
    }
    let table = BracketTable::new(n, cs.ring().clone(), entries);
    if let Some((a, b, c)) = table.jacobi_violation() {
        return Err(Error::Invalid(format!(
            "bracket table violates Jacobi on ({}, {}, {})",
            table.ring.vars[a], table.ring.vars[b], table.ring.vars[c]
        )));
    }
    Ok(table)
}

fn lift_coeffs(x: &NcElement<CycNum>) -> NcElement<LaurentQ> {
    x.map_coeffs(|c| LaurentQ::constant(c.clone()))
}

/// A generic lift of the central element `p(z)`.
pub fn lift_central(alg: &Algebra, cs: &CentralStructure, p: &Poly) -> Result<NcElement<LaurentQ>> {
    let g = alg.generic()?;
    let n = cs.ngens();
    let mut acc = NcElement::zero();
    for (m, c) in p.terms() {
        let mut t = NcElement::scalar(n, LaurentQ::constant(c.clone()));
        for (i, &e) in m.exps().iter().enumerate() {
            for _ in 0..e {
                t = g.mul(&t, &cs.lift(i));
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

/// `{f, g}` straight from the definition, without the table.
pub fn direct_bracket(alg: &Algebra, cs: &CentralStructure, f: &Poly, g: &Poly) -> Result<Poly> {
    let dc = alg.divided_commutator(&lift_central(alg, cs, f)?, &lift_central(alg, cs, g)?)?;
    central_part(cs, &dc).map_err(|()| Error::NotClosed { a: 0, b: 0, element: format!("{dc:?}") })
}

/// Sparse rows of `b(x)`: `d_x(y_i) = sum_j b[i][j] y_j`.
#[derive(Clone, Debug)]
pub struct DerivationMatrix {
    pub x: NcElement<LaurentQ>,
    pub rows: Vec<BTreeMap<usize, Poly>>,
}

impl DerivationMatrix {
    pub fn entry(&self, i: usize, j: usize) -> Poly {
        self.rows[i].get(&j).cloned().unwrap_or_default()
    }

    pub fn trace(&self) -> Poly {
        let mut acc = Poly::zero();
        for (i, r) in self.rows.iter().enumerate() {
            if let Some(p) = r.get(&i) {
                acc += p;
            }
        }
        acc
    }
}

/// The matrix of the lifted derivation `d_x` on the residue basis.
pub fn derivation_matrix(alg: &Algebra, cs: &CentralStructure, x: &NcElement<LaurentQ>) -> Result<DerivationMatrix> {
    let g = alg.generic()?;
    alg.special
        .check_central(&g.specialize_element(x))
        .map_err(|k| Error::NotCentral { power_of: None, generator: k })?;
    let rows = cs
        .basis()
        .par_iter()
        .map(|y| {
            let dy = alg.divided_commutator(x, &NcElement::monomial(y.clone(), LaurentQ::one()))?;
            Ok(cs.decompose(&dy).into_iter().map(|(r, p)| (cs.basis_index(&r), p)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DerivationMatrix { x: x.clone(), rows })
}

/// Outcome of a Poisson-normality test.
#[derive(Clone, Debug)]
pub struct NormalityReport {
    pub pass: bool,
    /// `(factor index, generator index, cofactor)`; `None` where the
    /// division fails.
    pub cofactors: Vec<(usize, usize, Option<Poly>)>,
}

impl NormalityReport {
    pub fn cofactor(&self, factor: usize, var: usize) -> Option<&Poly> {
        self.cofactors
            .iter()
            .find(|(f, v, _)| *f == factor && *v == var)
            .and_then(|(_, _, c)| c.as_ref())
    }

    pub fn to_json(&self, ring: &PolyRing, field: &CyclotomicField) -> Value {
        json!({
            "pass": self.pass,
            "cofactors": self.cofactors.iter().map(|(f, v, c)| json!({
                "factor": f,
                "var": ring.vars[*v],
                "cofactor": c.as_ref().map(|c| c.to_json(ring, field)),
            })).collect::<Vec<_>>(),
        })
    }
}

fn normal_against(t: &BracketTable, d: &Poly, idx: usize) -> Result<Vec<(usize, usize, Option<Poly>)>> {
    if d.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok((0..t.nvars())
        .into_par_iter()
        .map(|a| (idx, a, t.hamiltonian(a, d).exact_divide(d).ok()))
        .collect())
}

/// Whether `{z_a, d}` lies in `d C` for every generator; the cofactor is
/// `{z_a, d} / d`.
pub fn check_poisson_normal(d: &Poly, t: &BracketTable) -> Result<NormalityReport> {
    let cofactors = normal_against(t, d, 0)?;
    Ok(NormalityReport { pass: cofactors.iter().all(|c| c.2.is_some()), cofactors })
}

/// Checks each base of a factored polynomial separately, which implies
/// normality of the product.
pub fn check_poisson_normal_factored(d: &Factored, t: &BracketTable) -> Result<NormalityReport> {
    if d.scalar.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut cofactors = Vec::new();
    for (i, (b, _)) in d.factors.iter().enumerate() {
        cofactors.extend(normal_against(t, b, i)?);
    }
    Ok(NormalityReport { pass: cofactors.iter().all(|c| c.2.is_some()), cofactors })
}

#[derive(Clone, Debug)]
pub struct TraceIdentityReport {
    pub var: usize,
    /// `tr(b(x))` for the lift `x` of `z_var`.
    pub trace_b: Poly,
    pub symbolic: Option<bool>,
    /// `(prime, point, lhs, rhs)` for the sampled checks.
    pub samples: Vec<(u64, Vec<u64>, u64, u64)>,
    pub pass: bool,
}

impl TraceIdentityReport {
    pub fn to_json(&self, ring: &PolyRing, field: &CyclotomicField) -> Value {
        json!({
            "var": ring.vars[self.var],
            "trace_b": self.trace_b.to_json(ring, field),
            "symbolic": self.symbolic,
            "samples": self.samples.iter().map(|(p, pt, l, r)| json!({
                "p": p, "coords": pt, "lhs": l, "rhs": r,
            })).collect::<Vec<_>>(),
            "pass": self.pass,
        })
    }
}

/// `{z_a, delta} = 2 tr(b(x)) delta`, with `delta` given symbolically.
pub fn check_trace_identity_symbolic(
    alg: &Algebra,
    cs: &CentralStructure,
    t: &BracketTable,
    a: usize,
    delta: &Poly,
) -> Result<TraceIdentityReport> {
    let tb = derivation_matrix(alg, cs, &cs.lift(a))?.trace();
    let lhs = t.hamiltonian(a, delta);
    let rhs = tb.scale(&CycNum::from_int(2)) * delta;
    let ok = lhs == rhs;
    Ok(TraceIdentityReport { var: a, trace_b: tb, symbolic: Some(ok), samples: vec![], pass: ok })
}

/// The same identity with `delta = det G` evaluated at random points over
/// `F_p`; the left side is the derivative of `det G` along the Hamiltonian
/// vector field, computed with dual numbers.
pub fn check_trace_identity_modular(
    alg: &Algebra,
    cs: &CentralStructure,
    t: &BracketTable,
    a: usize,
    gram: &GramData,
    points: usize,
    primes: usize,
    seed: u64,
) -> Result<TraceIdentityReport> {
    let tb = derivation_matrix(alg, cs, &cs.lift(a))?.trace();
    let field = alg.field();
    let n = cs.ngens();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let embs: Vec<PrimeEmbedding> = (0..primes.max(1)).map(|_| PrimeEmbedding::random(field, &mut rng)).collect();
    let ham: Vec<Poly> = (0..n).map(|b| t.get(a, b)).collect();
    let mut samples = Vec::with_capacity(points);
    let mut pass = true;
    for k in 0..points {
        let e = embs[k % embs.len()];
        let coef = fp_coef(&e);
        let mut found = None;
        for _ in 0..100 {
            let pt: Vec<Fp> = (0..n).map(|_| Fp::new(rng.gen_range(0..e.p), e.p)).collect();
            let dir = ham.iter().map(|h| h.eval_with(&pt, coef)).collect::<Result<Vec<Fp>>>()?;
            let dpt: Vec<Dual<Fp>> = pt.iter().zip(&dir).map(|(x, v)| Dual::new(*x, *v)).collect();
            let d = discriminant_eval(gram, &dpt, |c| Ok(Dual::new(coef(c)?, Fp::zero())))?;
            if !d.a.is_zero() {
                found = Some((pt, d));
                break;
            }
        }
        let (pt, d) = found.ok_or(Error::SamplingExhausted(100))?;
        let rhs = Fp::from_i64(2, e.p) * tb.eval_with(&pt, coef)? * d.a;
        if d.b != rhs {
            pass = false;
        }
        samples.push((e.p, pt.iter().map(Fp::value).collect(), d.b.value(), rhs.value()));
    }
    Ok(TraceIdentityReport { var: a, trace_b: tb, symbolic: None, samples, pass })
}

#[derive(Clone, Debug)]
pub struct PairingReport {
    pub lhs: Poly,
    pub rhs: Poly,
    pub pass: bool,
}

/// `d(d_n(X)) = 2 sum_k <X, (x_1, .., d(x_k), .., x_n)>` for `d = {z_a, -}`.
pub fn check_derivation_pairing(
    alg: &Algebra,
    cs: &CentralStructure,
    t: &BracketTable,
    a: usize,
    xs: &[NcElement<CycNum>],
) -> Result<PairingReport> {
    let x = cs.lift(a);
    let lhs = t.hamiltonian(a, &discriminant_of_set(alg, cs, xs));
    let dx = xs
        .iter()
        .map(|y| alg.lifted_derivation(&x, &lift_coeffs(y)))
        .collect::<Result<Vec<_>>>()?;
    let mut rhs = Poly::zero();
    for k in 0..xs.len() {
        let mut ys = xs.to_vec();
        ys[k] = dx[k].clone();
        rhs += md_pairing(alg, cs, xs, &ys)?;
    }
    let rhs = rhs.scale(&CycNum::from_int(2));
    let pass = lhs == rhs;
    Ok(PairingReport { lhs, rhs, pass })
}
