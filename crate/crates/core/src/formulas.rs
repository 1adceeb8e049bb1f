//! Built-in algebras and closed-form discriminant candidates.

use num_traits::{One, Zero};
use serde_json::Value;

use crate::cyclotomic::{make_field, CycNum};
use crate::error::{Error, Result};
use crate::laurent::LaurentQ;
use crate::matrix::bareiss_det;
use crate::ncpbw::{Algebra, Presentation, Relation};
use crate::scalar::{Field, Ring};
use crate::{Factored, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinKind {
    /// x1 x2 = q x2 x1 + 1
    Qweyl,
    /// x2 x1 = q^{-1} x1 x2
    Qplane,
    /// x_j x_i = q^{e[i][j]} x_i x_j for i < j
    Qaffine(Vec<Vec<i32>>),
    /// m x n quantum matrices, column-major generator order
    Qmatrix { m: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltinSpec {
    pub kind: BuiltinKind,
    pub l: i64,
}

impl BuiltinSpec {
    pub fn from_json(v: &Value) -> Result<Self> {
        let name = v.get("builtin").and_then(Value::as_str).unwrap_or_default();
        let l = v
            .get("l")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Invalid("builtin spec needs integer \"l\"".into()))?;
        let dim = |k: &str| -> Result<usize> {
            v.get(k)
                .and_then(Value::as_u64)
                .filter(|&x| x >= 1)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Invalid(format!("builtin {name} needs positive integer \"{k}\"")))
        };
        let kind = match name {
            "qweyl" => BuiltinKind::Qweyl,
            "qplane" => BuiltinKind::Qplane,
            "qaffine" => BuiltinKind::Qaffine(
                serde_json::from_value(v.get("q").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::Invalid(format!("qaffine needs an integer matrix \"q\": {e}")))?,
            ),
            "qmatrix" => {
                let n = dim("n")?;
                let m = if v.get("m").is_some() { dim("m")? } else { n };
                BuiltinKind::Qmatrix { m, n }
            }
            other => return Err(Error::Invalid(format!("unknown builtin {other:?}"))),
        };
        Ok(BuiltinSpec { kind, l })
    }

    pub fn build(&self) -> Result<Algebra> {
        let l = self.l;
        match &self.kind {
            BuiltinKind::Qweyl => qweyl_i(l),
            BuiltinKind::Qplane => qplane_i(l),
            BuiltinKind::Qaffine(e) => qaffine(e, l),
            BuiltinKind::Qmatrix { m, n } => qmatrix_i(*m, *n, l),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            BuiltinKind::Qweyl => "qweyl".into(),
            BuiltinKind::Qplane => "qplane".into(),
            BuiltinKind::Qaffine(_) => "qaffine".into(),
            BuiltinKind::Qmatrix { m, n } => format!("qmatrix({m}x{n})"),
        }
    }
}

fn q(k: i32) -> LaurentQ {
    LaurentQ::q_pow(k)
}

pub fn qweyl(l: u32) -> Result<Algebra> {
    qweyl_i(l as i64)
}

fn qweyl_i(l: i64) -> Result<Algebra> {
    let f = make_field(l)?;
    let rel = Relation { m: 1, j: 0, c: q(-1), tail: vec![(-q(-1), vec![])] };
    let p = Presentation::new(f, vec!["x1".into(), "x2".into()], vec![vec![1], vec![-1]], vec![rel])?;
    Algebra::from_generic("qweyl", p)
}

/// The quantum Weyl algebra with the opposite generator order x2 < x1.
pub fn qweyl_reversed(l: u32) -> Result<Algebra> {
    let f = make_field(l as i64)?;
    let rel = Relation { m: 1, j: 0, c: q(1), tail: vec![(LaurentQ::one(), vec![])] };
    let p = Presentation::new(f, vec!["x2".into(), "x1".into()], vec![vec![-1], vec![1]], vec![rel])?;
    Algebra::from_generic("qweyl-reversed", p)
}

pub fn qplane(l: u32) -> Result<Algebra> {
    qplane_i(l as i64)
}

fn qplane_i(l: i64) -> Result<Algebra> {
    let mut a = qaffine(&[vec![0, -1], vec![1, 0]], l)?;
    a.name = "qplane".into();
    Ok(a)
}

/// Quasi-polynomial algebra: `x_j x_i = q^{e[i][j]} x_i x_j` for `i < j`.
pub fn qaffine(e: &[Vec<i32>], l: i64) -> Result<Algebra> {
    let f = make_field(l)?;
    let n = e.len();
    if e.iter().any(|r| r.len() != n) {
        return Err(Error::SizeMismatch("qaffine exponent matrix must be square".into()));
    }
    let names = (1..=n).map(|i| format!("x{i}")).collect();
    let degrees = (0..n)
        .map(|i| (0..n).map(|k| (i == k) as i64).collect())
        .collect();
    let mut rels = Vec::new();
    for jj in 0..n {
        for i in 0..jj {
            rels.push(Relation { m: jj, j: i, c: q(e[i][jj]), tail: vec![] });
        }
    }
    Algebra::from_generic("qaffine", Presentation::new(f, names, degrees, rels)?)
}

/// Generator index of `x_ij` (1-based `i`, `j`) among the `m x n` quantum
/// matrix generators, listed column by column.
pub fn qmatrix_index(m: usize, i: usize, j: usize) -> usize {
    (j - 1) * m + (i - 1)
}

pub fn qmatrix(m: usize, n: usize, l: u32) -> Result<Algebra> {
    qmatrix_i(m, n, l as i64)
}

fn qmatrix_i(m: usize, n: usize, l: i64) -> Result<Algebra> {
    let f = make_field(l)?;
    let count = m * n;
    let pos = |g: usize| (g % m + 1, g / m + 1);
    let names = (0..count).map(|g| format!("x{}{}", pos(g).0, pos(g).1)).collect();
    let degrees = (0..count)
        .map(|g| {
            let (i, j) = pos(g);
            let mut d = vec![0i64; m + n];
            d[i - 1] = 1;
            d[m + j - 1] = 1;
            d
        })
        .collect();
    let mut rels = Vec::new();
    for b in 0..count {
        for a in 0..b {
            let (i, j) = pos(a);
            let (k, r) = pos(b);
            let rel = if i == k || j == r {
                Relation { m: b, j: a, c: q(-1), tail: vec![] }
            } else if k < i {
                Relation { m: b, j: a, c: LaurentQ::one(), tail: vec![] }
            } else {
                // x_kr x_ij = x_ij x_kr - (q - q^{-1}) x_kj x_ir
                let mut e = vec![0u32; count];
                e[qmatrix_index(m, k, j)] = 1;
                e[qmatrix_index(m, i, r)] = 1;
                Relation { m: b, j: a, c: LaurentQ::one(), tail: vec![(-LaurentQ::q_minus_q_inv(), e)] }
            };
            rels.push(rel);
        }
    }
    let name = format!("qmatrix({m}x{n})");
    Algebra::from_generic(name, Presentation::new(f, names, degrees, rels)?)
}

/// Minor `det [z_ij]_{i in rows, j in cols}` of an `m x ?` matrix of central
/// variables indexed column by column.
pub fn minor(rows: &[usize], cols: &[usize], m: usize, n: usize) -> Result<Poly> {
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch(format!(
            "minor with {} rows and {} columns",
            rows.len(),
            cols.len()
        )));
    }
    if rows.iter().any(|&i| i == 0 || i > m) || cols.iter().any(|&j| j == 0 || j > n) {
        return Err(Error::Invalid(format!("minor {rows:?};{cols:?} outside {m}x{n}")));
    }
    let mat: Vec<Vec<Poly>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| Poly::var(qmatrix_index(m, i, j))).collect())
        .collect();
    Ok(bareiss_det(&mat))
}

fn range(a: usize, b: usize) -> Vec<usize> {
    (a..=b).collect()
}

/// `(z1 z2 - t)^{l(l-1)}` with `t = (1 - eps)^{-l}`.
pub fn qweyl_formula(l: u32) -> Result<Factored> {
    let f = make_field(l as i64)?;
    let t = (CycNum::one() - f.eps()).pow(l as u64).inv().ok_or(Error::DivisionByZero)?;
    let base = Poly::var(0) * Poly::var(1) - Poly::constant(t);
    Ok(Factored::new(CycNum::one(), vec![(base, (l * (l - 1)) as u64)]))
}

pub fn qweyl_t(l: u32) -> Result<CycNum> {
    let f = make_field(l as i64)?;
    (CycNum::one() - f.eps()).pow(l as u64).inv().ok_or(Error::DivisionByZero)
}

fn check_odd(l: u32) -> Result<()> {
    if l <= 2 || l % 2 == 0 {
        return Err(Error::OutOfHypothesis(format!("needs odd l > 2, got l = {l}")));
    }
    Ok(())
}

/// Product of corner minors for the square `n x n` quantum matrices, each to
/// the power `l^{n^2 - 1} (l - 1)`.
pub fn square_qmatrix_formula(n: usize, l: u32) -> Result<Factored> {
    check_odd(l)?;
    make_field(l as i64)?;
    let big_l = (l as u64).pow((n * n - 1) as u32) * (l as u64 - 1);
    let mut factors = Vec::new();
    for k in 1..=n {
        factors.push((minor(&range(n - k + 1, n), &range(1, k), n, n)?, big_l));
    }
    for j in 1..n {
        factors.push((minor(&range(1, j), &range(n - j + 1, n), n, n)?, big_l));
    }
    Ok(Factored::new(CycNum::one(), factors))
}

/// Rectangular `m x n` (`m <= n`) analogue, exponent `l^{mn - 1} (l - 1)`.
pub fn rect_qmatrix_formula(m: usize, n: usize, l: u32) -> Result<Factored> {
    if m > n {
        return Err(Error::TransposeHint { m, n });
    }
    check_odd(l)?;
    make_field(l as i64)?;
    let big_l = (l as u64).pow((m * n - 1) as u32) * (l as u64 - 1);
    let mut factors = Vec::new();
    for j in 1..m {
        factors.push((minor(&range(m - j + 1, m), &range(1, j), m, n)?, big_l));
        factors.push((minor(&range(1, j), &range(n - j + 1, n), m, n)?, big_l));
    }
    for k in 1..=n - m + 1 {
        factors.push((minor(&range(1, m), &range(k, m + k - 1), m, n)?, big_l));
    }
    Ok(Factored::new(CycNum::one(), factors))
}

/// `{z_ij, z_km} = l^2 eps^{-1} (sign(k - i) + sign(m' - j)) z_im' z_kj` on the
/// center of the `m x n` quantum matrices (1-based positions).
pub fn qmatrix_bracket(m: usize, n: usize, l: u32, a: (usize, usize), b: (usize, usize)) -> Result<Poly> {
    let f = make_field(l as i64)?;
    let ((i, j), (k, r)) = (a, b);
    if [i, k].iter().any(|&x| x == 0 || x > m) || [j, r].iter().any(|&x| x == 0 || x > n) {
        return Err(Error::Invalid(format!("positions {a:?}, {b:?} outside {m}x{n}")));
    }
    let s = (k as i64 - i as i64).signum() + (r as i64 - j as i64).signum();
    if s == 0 {
        return Ok(Poly::zero());
    }
    let c = f.from_int(s * (l as i64).pow(2)) * &f.eps_pow(-1);
    Ok((Poly::var(qmatrix_index(m, i, r)) * Poly::var(qmatrix_index(m, k, j))).scale(&c))
}

/// `tr(b(x_ij^l)) = (n - i - j + 1)(l - 1) l^{n^2 + 1} eps^{-1} z_ij` for the
/// square quantum matrices.
pub fn qmatrix_derivation_trace(n: usize, l: u32, i: usize, j: usize) -> Result<Poly> {
    let f = make_field(l as i64)?;
    let k = (n as i64 - i as i64 - j as i64 + 1) * (l as i64 - 1) * (l as i64).pow((n * n + 1) as u32);
    Ok(Poly::var(qmatrix_index(n, i, j)).scale(&(f.from_int(k) * &f.eps_pow(-1))))
}

/// The closed-form candidate for a built-in algebra, when one is known.
pub fn formula_for(spec: &BuiltinSpec) -> Result<Factored> {
    let l = u32::try_from(spec.l).map_err(|_| Error::InvalidOrder(spec.l))?;
    match spec.kind {
        BuiltinKind::Qweyl => qweyl_formula(l),
        BuiltinKind::Qmatrix { m, n } if m == n => square_qmatrix_formula(n, l),
        BuiltinKind::Qmatrix { m, n } => rect_qmatrix_formula(m, n, l),
        _ => Err(Error::Invalid(format!("no closed formula for {}", spec.name()))),
    }
}

pub fn formula_provenance(spec: &BuiltinSpec) -> &'static str {
    match spec.kind {
        BuiltinKind::Qweyl => "quantum Weyl algebra: (z1 z2 - t)^(l(l-1)), t = (1 - eps)^(-l)",
        BuiltinKind::Qmatrix { m, n } if m == n => "square quantum matrices: corner minors to the power l^(n^2-1)(l-1)",
        BuiltinKind::Qmatrix { .. } => "rectangular quantum matrices: corner and solid minors to the power l^(mn-1)(l-1)",
        _ => "none",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Multidegree;

    fn z(m: usize, i: usize, j: usize) -> Poly {
        Poly::var(qmatrix_index(m, i, j))
    }

    #[test]
    fn minors() {
        assert_eq!(minor(&[1, 2], &[1, 2], 2, 2).unwrap(), z(2, 1, 1) * z(2, 2, 2) - z(2, 1, 2) * z(2, 2, 1));
        assert_eq!(minor(&[2], &[1], 2, 2).unwrap(), z(2, 2, 1));
        assert!(matches!(minor(&[1, 2], &[1], 2, 2), Err(Error::SizeMismatch(_))));
    }

    #[test]
    fn qweyl_formulas() {
        let f3 = qweyl_formula(3).unwrap();
        assert_eq!(f3.factors[0].1, 6);
        assert_eq!(qweyl_formula(5).unwrap().factors[0].1, 20);
        let f2 = qweyl_formula(2).unwrap();
        assert_eq!(f2.factors[0].1, 2);
        let quarter = CycNum::from_int(1) * &CycNum::from_int(4).inv().unwrap();
        assert_eq!(qweyl_t(2).unwrap(), quarter);
        assert_eq!(f2.factors[0].0.constant_term(), -quarter);
    }

    #[test]
    fn square_formula_n2() {
        let fp = square_qmatrix_formula(2, 3).unwrap();
        let bases: Vec<_> = fp.factors.iter().map(|(b, _)| b.clone()).collect();
        assert_eq!(bases, vec![z(2, 2, 1), minor(&[1, 2], &[1, 2], 2, 2).unwrap(), z(2, 1, 2)]);
        assert!(fp.factors.iter().all(|(_, e)| *e == 54));
        // deg z_ij = l (e_i + e_{n+j})
        let grading: Vec<Vec<i64>> = (0..4)
            .map(|g| {
                let (i, j) = (g % 2, g / 2);
                let mut d = vec![0; 4];
                d[i] = 3;
                d[2 + j] = 3;
                d
            })
            .collect();
        assert_eq!(fp.multidegree(&grading), Multidegree::Homogeneous(vec![324; 4]));
        let n1 = square_qmatrix_formula(1, 3).unwrap();
        assert_eq!(n1.factors, vec![(Poly::var(0), 2)]);
    }

    #[test]
    fn hypotheses() {
        assert!(matches!(square_qmatrix_formula(2, 4), Err(Error::OutOfHypothesis(_))));
        assert!(matches!(square_qmatrix_formula(2, 2), Err(Error::OutOfHypothesis(_))));
        assert_eq!(rect_qmatrix_formula(3, 2, 3), Err(Error::TransposeHint { m: 3, n: 2 }));
    }

    #[test]
    fn rectangular_formulas() {
        let r = rect_qmatrix_formula(1, 2, 3).unwrap();
        assert_eq!(r.factors, vec![(z(1, 1, 1), 6), (z(1, 1, 2), 6)]);
        assert_eq!(rect_qmatrix_formula(2, 2, 3).unwrap().factors.len(), 3);
        let sq: Vec<_> = square_qmatrix_formula(3, 3).unwrap().factors.into_iter().collect();
        let mut rc: Vec<_> = rect_qmatrix_formula(3, 3, 3).unwrap().factors;
        let mut sq_sorted = sq.clone();
        sq_sorted.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
        rc.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
        assert_eq!(sq_sorted, rc);
        let r23 = rect_qmatrix_formula(2, 3, 3).unwrap();
        let bases: Vec<_> = r23.factors.iter().map(|(b, _)| b.clone()).collect();
        assert_eq!(
            bases,
            vec![
                z(2, 2, 1),
                z(2, 1, 3),
                minor(&[1, 2], &[1, 2], 2, 3).unwrap(),
                minor(&[1, 2], &[2, 3], 2, 3).unwrap(),
            ]
        );
        assert!(r23.factors.iter().all(|(_, e)| *e == 486));
    }

    #[test]
    fn builtin_json() {
        let s = BuiltinSpec::from_json(&serde_json::json!({"builtin": "qmatrix", "m": 2, "n": 3, "l": 3})).unwrap();
        assert_eq!(s.kind, BuiltinKind::Qmatrix { m: 2, n: 3 });
        let a = s.build().unwrap();
        assert_eq!(a.ngens(), 6);
        assert!(BuiltinSpec::from_json(&serde_json::json!({"builtin": "nope", "l": 3})).is_err());
        let err = BuiltinSpec::from_json(&serde_json::json!({"builtin": "qweyl", "l": 1})).unwrap().build();
        assert_eq!(err.err().unwrap(), Error::InvalidOrder(1));
    }
}
