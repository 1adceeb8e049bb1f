//! Gram matrices of the trace form, their determinants, pairings of element
//! sets, and randomized comparison against factored candidates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::central::CentralStructure;
use crate::cyclotomic::{CycNum, CyclotomicField, PrimeEmbedding};
use crate::error::{Error, Result};
use crate::matrix::{bareiss_det, gauss_det, BlockStructure, Matrix};
use crate::modular::Fp;
use crate::ncpbw::{Algebra, Exps, NcElement};
use crate::poly::{Multidegree, PolyRing};
use crate::scalar::Field;
use crate::{Factored, Poly};

/// `G[i][j] = tr(y_i y_j)` over the residue basis.
#[derive(Clone, Debug)]
pub struct GramData {
    pub basis: Vec<Exps>,
    /// Generator-grading degree of each basis element.
    pub degrees: Vec<Vec<i64>>,
    pub entries: Matrix<Poly>,
    pub ring: PolyRing,
    pub blocks: BlockStructure,
}

impl GramData {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn nonzero_entries(&self) -> usize {
        self.entries.iter().flatten().filter(|e| !e.is_zero()).count()
    }

    /// Twice the summed basis degree, the expected degree of the determinant.
    pub fn expected_degree(&self) -> Vec<i64> {
        let g = self.degrees.first().map_or(0, Vec::len);
        let mut out = vec![0i64; g];
        for d in &self.degrees {
            for (o, x) in out.iter_mut().zip(d) {
                *o += 2 * x;
            }
        }
        out
    }

    /// First entry that is not homogeneous of degree `deg y_i + deg y_j`.
    pub fn degree_violation(&self) -> Option<(usize, usize)> {
        let grading = self.ring.grading.as_deref()?;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let want: Vec<i64> = self.degrees[i].iter().zip(&self.degrees[j]).map(|(a, b)| a + b).collect();
                match e.multidegree(grading) {
                    Multidegree::Zero => {}
                    Multidegree::Homogeneous(d) if d == want => {}
                    _ => return Some((i, j)),
                }
            }
        }
        None
    }

    /// Evaluates every entry at `pt`.
    pub fn eval<S: Field>(&self, pt: &[S], coef: impl Fn(&CycNum) -> Result<S> + Sync) -> Result<Matrix<S>> {
        eval_matrix(&self.entries, pt, coef)
    }

    pub fn to_json(&self, field: &CyclotomicField) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(move |(j, e)| (i, j, e))
            })
            .map(|(i, j, e)| json!({"i": i, "j": j, "value": e.to_json(&self.ring, field)}))
            .collect();
        json!({
            "basis": self.basis,
            "vars": self.ring.vars,
            "size": self.len(),
            "entries": entries,
        })
    }
}

pub fn eval_matrix<S: Field>(
    m: &Matrix<Poly>,
    pt: &[S],
    coef: impl Fn(&CycNum) -> Result<S> + Sync,
) -> Result<Matrix<S>> {
    m.par_iter()
        .map(|row| {
            row.iter()
                .map(|e| if e.is_zero() { Ok(S::zero()) } else { e.eval_with(pt, &coef) })
                .collect()
        })
        .collect()
}

fn degree_in_lattice(a: &[i64], b: &[i64], l: i64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x + y) % l == 0)
}

/// The Gram matrix of the trace form on the residue basis.
pub fn gram_matrix(alg: &Algebra, cs: &CentralStructure) -> GramData {
    let basis = cs.basis().to_vec();
    let n = basis.len();
    let l = cs.l() as i64;
    let degrees: Vec<Vec<i64>> = basis.iter().map(|y| cs.degree_of(y)).collect();
    let upper: Vec<Vec<(usize, Poly)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let yi = NcElement::monomial(basis[i].clone(), CycNum::one());
            (i..n)
                .filter(|&j| degree_in_lattice(&degrees[i], &degrees[j], l))
                .filter_map(|j| {
                    let yj = NcElement::monomial(basis[j].clone(), CycNum::one());
                    let t = cs.trace(alg, &alg.special.mul(&yi, &yj));
                    (!t.is_zero()).then_some((j, t))
                })
                .collect()
        })
        .collect();
    let mut entries = vec![vec![Poly::zero(); n]; n];
    for (i, row) in upper.into_iter().enumerate() {
        for (j, t) in row {
            entries[j][i] = t.clone();
            entries[i][j] = t;
        }
    }
    let blocks = BlockStructure::of_matrix(&entries);
    GramData { basis, degrees, entries, ring: cs.ring().clone(), blocks }
}

/// Exact determinant of the Gram matrix, block by block.
pub fn discriminant_symbolic(g: &GramData) -> Poly {
    g.blocks.det(&g.entries, bareiss_det)
}

/// `det G(pt)` over any field the coefficients map into.
pub fn discriminant_eval<S: Field>(
    g: &GramData,
    pt: &[S],
    coef: impl Fn(&CycNum) -> Result<S> + Sync,
) -> Result<S> {
    let m = g.eval(pt, coef)?;
    Ok(g.blocks.det(&m, gauss_det))
}

pub fn discriminant_eval_exact(g: &GramData, pt: &[CycNum]) -> CycNum {
    discriminant_eval(g, pt, |c| Ok(c.clone())).expect("exact evaluation is infallible")
}

pub fn fp_coef(e: &PrimeEmbedding) -> impl Fn(&CycNum) -> Result<Fp> + Sync + Copy + '_ {
    move |c| Ok(Fp::new(c.to_prime_field(e)?, e.p))
}

/// `det G(pt)` modulo the embedding's prime, with `pt` given as residues.
pub fn discriminant_eval_mod(g: &GramData, e: &PrimeEmbedding, pt: &[u64]) -> Result<u64> {
    let pt: Vec<Fp> = pt.iter().map(|&v| Fp::new(v, e.p)).collect();
    Ok(discriminant_eval(g, &pt, fp_coef(e))?.value())
}

/// `[tr(x_i y_j)]`.
pub fn pairing_matrix(
    alg: &Algebra,
    cs: &CentralStructure,
    x: &[NcElement<CycNum>],
    y: &[NcElement<CycNum>],
) -> Matrix<Poly> {
    x.par_iter()
        .map(|xi| y.iter().map(|yj| cs.trace(alg, &alg.special.mul(xi, yj))).collect())
        .collect()
}

/// `<X, Y> = det[tr(x_i y_j)]`.
pub fn md_pairing(
    alg: &Algebra,
    cs: &CentralStructure,
    x: &[NcElement<CycNum>],
    y: &[NcElement<CycNum>],
) -> Result<Poly> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(format!("pairing of {} against {} elements", x.len(), y.len())));
    }
    let m = pairing_matrix(alg, cs, x, y);
    Ok(BlockStructure::of_matrix(&m).det(&m, bareiss_det))
}

/// `det[tr(x_i x_j)]`.
pub fn discriminant_of_set(alg: &Algebra, cs: &CentralStructure, x: &[NcElement<CycNum>]) -> Poly {
    md_pairing(alg, cs, x, x).expect("a set pairs with itself")
}

/// Whether the componentwise maximum of the support is itself in the support.
pub fn unique_leading_term(f: &Poly) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let n = f.terms().map(|(m, _)| m.exps().len()).max().unwrap_or(0);
    let mut top = vec![0u32; n];
    for (m, _) in f.terms() {
        for (t, e) in top.iter_mut().zip(m.padded(n)) {
            *t = (*t).max(e);
        }
    }
    Ok(!f.coeff(&crate::poly::Monomial::new(top)).is_zero())
}

/// A product has a unique leading term iff every factor does.
pub fn unique_leading_term_factored(f: &Factored) -> Result<bool> {
    if f.scalar.is_zero() {
        return Err(Error::ZeroInput);
    }
    for (b, _) in &f.factors {
        if !unique_leading_term(b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Left-hand side of a comparison.
#[derive(Clone, Copy)]
pub enum Lhs<'a> {
    Poly(&'a Poly),
    Gram(&'a GramData),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Integer points in `[-BOUND, BOUND]`, exact cyclotomic arithmetic.
    Exact,
    /// Uniform points in `F_p` for the given number of random primes.
    Modular { primes: usize },
}

pub const EXACT_SAMPLE_BOUND: i64 = 1_000_000;
const RESAMPLE_LIMIT: usize = 100;
const EXPAND_TERM_LIMIT: usize = 200_000;

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub trials: usize,
    pub seed: u64,
    pub method: Method,
    /// Grading of the polynomial ring; `None` skips the degree check.
    pub grading: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub seed: u64,
    pub trials: usize,
    pub method: Method,
    pub primes: Vec<PrimeEmbedding>,
    pub points: Vec<Value>,
    pub ratios: Vec<Value>,
    /// The exact scalar when sampling over the cyclotomic field.
    pub scalar: Option<CycNum>,
    /// The scalar's residue for each prime in modular mode.
    pub scalar_residues: Vec<(u64, u64)>,
    pub ratio_constant: bool,
    pub lhs_degree: Option<Multidegree>,
    pub rhs_degree: Option<Multidegree>,
    pub degree_check: Option<bool>,
    /// Per-point Schwartz-Zippel bound `D / |S|`.
    pub sz_bound: BigRational,
    pub degree_bound: u64,
    pub exact_equal: Option<bool>,
    pub mismatch: Option<String>,
    pub pass: bool,
}

impl Comparison {
    pub fn sz_bound_f64(&self) -> f64 {
        self.sz_bound.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn to_json(&self, field: &CyclotomicField) -> Value {
        let deg = |d: &Option<Multidegree>| match d {
            Some(Multidegree::Homogeneous(v)) => json!(v),
            Some(Multidegree::Inhomogeneous) => json!("inhomogeneous"),
            Some(Multidegree::Zero) => json!("zero"),
            None => Value::Null,
        };
        let scalar = match (&self.scalar, self.method) {
            (Some(s), _) => s.to_json(field),
            (None, Method::Modular { .. }) => json!(self
                .scalar_residues
                .iter()
                .map(|(p, v)| json!({"p": p, "value": v}))
                .collect::<Vec<_>>()),
            _ => Value::Null,
        };
        json!({
            "seed": self.seed,
            "trials": self.trials,
            "method": match self.method { Method::Exact => "exact", Method::Modular { .. } => "modular" },
            "primes": self.primes.iter().map(|e| json!({"p": e.p, "root": e.root})).collect::<Vec<_>>(),
            "points": self.points,
            "ratios": self.ratios,
            "scalar": scalar,
            "ratio_constant": self.ratio_constant,
            "degree_check": self.degree_check,
            "lhs_degree": deg(&self.lhs_degree),
            "rhs_degree": deg(&self.rhs_degree),
            "degree_bound": self.degree_bound,
            "sz_bound": self.sz_bound_f64(),
            "sz_bound_exact": format!("{}/{}", self.sz_bound.numer(), self.sz_bound.denom()),
            "exact_equal": self.exact_equal,
            "mismatch": self.mismatch,
            "pass": self.pass,
        })
    }
}

fn lhs_total_degree(lhs: Lhs) -> u64 {
    match lhs {
        Lhs::Poly(f) => f.total_degree().unwrap_or(0) as u64,
        Lhs::Gram(g) => g
            .entries
            .iter()
            .map(|row| row.iter().filter_map(|e| e.total_degree()).max().unwrap_or(0) as u64)
            .sum(),
    }
}

fn lhs_coeffs_reduce(lhs: Lhs, e: &PrimeEmbedding) -> bool {
    let ok = |p: &Poly| p.terms().all(|(_, c)| c.to_prime_field(e).is_ok());
    match lhs {
        Lhs::Poly(f) => ok(f),
        Lhs::Gram(g) => g.entries.par_iter().all(|row| row.iter().all(ok)),
    }
}

fn eval_lhs<S: Field>(lhs: Lhs, pt: &[S], coef: impl Fn(&CycNum) -> Result<S> + Sync) -> Result<S> {
    match lhs {
        Lhs::Poly(f) => f.eval_with(pt, &coef),
        Lhs::Gram(g) => discriminant_eval(g, pt, coef),
    }
}

/// Expands a factored polynomial unless the result grows past a term budget.
pub fn expand_bounded(f: &Factored, limit: usize) -> Option<Poly> {
    let mut acc = Poly::constant(f.scalar.clone());
    for (b, e) in &f.factors {
        for _ in 0..*e {
            acc = acc * b;
            if acc.len() > limit {
                return None;
            }
        }
    }
    Some(acc)
}

/// Tests whether `f = c * g` for a single nonzero constant `c` by sampling.
pub fn compare_up_to_scalar(lhs: Lhs, g: &Factored, field: &'static CyclotomicField, opts: &CompareOptions) -> Result<Comparison> {
    if opts.trials < 10 {
        return Err(Error::Invalid(format!("need at least 10 trials, got {}", opts.trials)));
    }
    let nvars = match lhs {
        Lhs::Poly(_) => g
            .factors
            .iter()
            .flat_map(|(b, _)| b.terms().map(|(m, _)| m.exps().len()))
            .chain(match lhs {
                Lhs::Poly(f) => f.terms().map(|(m, _)| m.exps().len()).max(),
                _ => None,
            })
            .max()
            .unwrap_or(0),
        Lhs::Gram(gd) => gd.ring.nvars(),
    };
    let nvars = opts.grading.as_ref().map_or(nvars, |gr| gr.len().max(nvars));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let degree_bound = lhs_total_degree(lhs).max(g.total_degree());
    let (lhs_degree, rhs_degree, degree_check, mut mismatch) = match &opts.grading {
        Some(gr) => {
            let rd = g.multidegree(gr);
            let (ld, violation) = match lhs {
                Lhs::Poly(f) => (f.multidegree(gr), None),
                Lhs::Gram(gd) => (
                    Multidegree::Homogeneous(gd.expected_degree()),
                    gd.degree_violation().map(|(i, j)| format!("Gram entry ({i}, {j}) has the wrong degree")),
                ),
            };
            let ok = violation.is_none() && ld == rd;
            let msg = violation.or_else(|| (!ok).then(|| format!("degree {ld:?} against {rd:?}")));
            (Some(ld), Some(rd), Some(ok), msg)
        }
        None => (None, None, None, None),
    };

    let mut points = Vec::with_capacity(opts.trials);
    let mut ratios = Vec::with_capacity(opts.trials);
    let mut scalar = None;
    let mut scalar_residues = Vec::new();
    let mut primes = Vec::new();
    let mut ratio_constant = true;
    let sz_bound;

    match opts.method {
        Method::Exact => {
            sz_bound = BigRational::new(BigInt::from(degree_bound), BigInt::from(2 * EXACT_SAMPLE_BOUND + 1));
            let mut samples = Vec::with_capacity(opts.trials);
            for _ in 0..opts.trials {
                let mut found = None;
                for _ in 0..RESAMPLE_LIMIT {
                    let pt: Vec<CycNum> = (0..nvars)
                        .map(|_| field.from_int(rng.gen_range(-EXACT_SAMPLE_BOUND..=EXACT_SAMPLE_BOUND)))
                        .collect();
                    let gv = g.eval(&pt);
                    if !gv.is_zero() {
                        found = Some((pt, gv));
                        break;
                    }
                }
                samples.push(found.ok_or(Error::SamplingExhausted(RESAMPLE_LIMIT))?);
            }
            let lhs_values: Vec<CycNum> = samples
                .par_iter()
                .map(|(pt, _)| eval_lhs(lhs, pt, |c| Ok(c.clone())))
                .collect::<Result<_>>()?;
            for ((pt, gv), fv) in samples.iter().zip(lhs_values) {
                let r = fv.clone() * &gv.inv().expect("sample avoids zeros of g");
                points.push(json!({
                    "coords": pt.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "lhs": fv.to_string(),
                    "rhs": gv.to_string(),
                }));
                ratios.push(json!(r.to_string()));
                match &scalar {
                    None => scalar = Some(r),
                    Some(s) if *s == r => {}
                    Some(s) => {
                        if ratio_constant {
                            mismatch.get_or_insert(format!(
                                "ratio {r} at point {} differs from {s}",
                                points.len() - 1
                            ));
                        }
                        ratio_constant = false;
                    }
                }
            }
        }
        Method::Modular { primes: k } => {
            if k == 0 {
                return Err(Error::Invalid("modular comparison needs at least one prime".into()));
            }
            for _ in 0..k {
                let mut chosen = None;
                for _ in 0..RESAMPLE_LIMIT {
                    let e = PrimeEmbedding::random(field, &mut rng);
                    if g.scalar.to_prime_field(&e).is_ok()
                        && g.factors.iter().all(|(b, _)| b.terms().all(|(_, c)| c.to_prime_field(&e).is_ok()))
                        && lhs_coeffs_reduce(lhs, &e)
                    {
                        chosen = Some(e);
                        break;
                    }
                }
                primes.push(chosen.ok_or(Error::SamplingExhausted(RESAMPLE_LIMIT))?);
            }
            let min_p = primes.iter().map(|e| e.p).min().unwrap();
            sz_bound = BigRational::new(BigInt::from(degree_bound), BigInt::from(min_p));
            let mut samples = Vec::with_capacity(opts.trials);
            for t in 0..opts.trials {
                let e = primes[t % k];
                let mut found = None;
                for _ in 0..RESAMPLE_LIMIT {
                    let pt: Vec<Fp> = (0..nvars).map(|_| Fp::new(rng.gen_range(0..e.p), e.p)).collect();
                    let gv = g.eval_with(&pt, fp_coef(&e))?;
                    if !gv.is_zero() {
                        found = Some((e, pt, gv));
                        break;
                    }
                }
                samples.push(found.ok_or(Error::SamplingExhausted(RESAMPLE_LIMIT))?);
            }
            let lhs_values: Vec<Fp> = samples
                .par_iter()
                .map(|(e, pt, _)| eval_lhs(lhs, pt, fp_coef(e)))
                .collect::<Result<_>>()?;
            let mut per_prime: Vec<Option<Fp>> = vec![None; k];
            for (t, ((e, pt, gv), fv)) in samples.iter().zip(lhs_values).enumerate() {
                let r = fv * gv.inv().expect("sample avoids zeros of g");
                points.push(json!({
                    "p": e.p,
                    "coords": pt.iter().map(Fp::value).collect::<Vec<_>>(),
                    "lhs": fv.value(),
                    "rhs": gv.value(),
                }));
                ratios.push(json!({"p": e.p, "value": r.value()}));
                let slot = &mut per_prime[t % k];
                let bad = match slot {
                    None => {
                        *slot = Some(r);
                        r.is_zero()
                    }
                    Some(s) => *s != r,
                };
                if bad {
                    if ratio_constant {
                        mismatch.get_or_insert(format!(
                            "ratio {} mod {} at point {t} is not the constant nonzero ratio for this prime",
                            r.value(),
                            e.p
                        ));
                    }
                    ratio_constant = false;
                }
            }
            scalar_residues = primes.iter().zip(&per_prime).map(|(e, s)| (e.p, s.map_or(0, |v| v.value()))).collect();
        }
    }

    if let Some(s) = &scalar {
        if s.is_zero() {
            ratio_constant = false;
            mismatch.get_or_insert_with(|| "left side vanishes at the reference point".into());
        }
    }
    let exact_equal = match (lhs, &scalar) {
        (Lhs::Poly(f), Some(s)) if ratio_constant => {
            expand_bounded(g, EXPAND_TERM_LIMIT).map(|e| {
                let eq = *f == e.scale(s);
                if !eq {
                    mismatch.get_or_insert_with(|| "sampled ratios agree but the expansions differ".into());
                }
                eq
            })
        }
        _ => None,
    };
    let pass = ratio_constant && degree_check != Some(false) && exact_equal != Some(false);
    Ok(Comparison {
        seed: opts.seed,
        trials: opts.trials,
        method: opts.method,
        primes,
        points,
        ratios,
        scalar,
        scalar_residues,
        ratio_constant,
        lhs_degree,
        rhs_degree,
        degree_check,
        sz_bound,
        degree_bound,
        exact_equal,
        mismatch: if pass { None } else { mismatch },
        pass,
    })
}
