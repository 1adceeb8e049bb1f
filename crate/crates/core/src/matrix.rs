//! Determinants over exact rings.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::scalar::{ExactDiv, Field, Ring};

pub type Matrix<R> = Vec<Vec<R>>;

/// Fraction-free (Bareiss) determinant. Every division is exact in `R`.
///
/// Pivot: the nonzero entry of the current column with the smallest
/// [`Ring::weight`], ties broken by lowest row index.
pub fn bareiss_det<R: ExactDiv>(m: &Matrix<R>) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let mut a = m.clone();
    let mut prev = R::one();
    let mut negate = false;
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| (a[i][k].weight(), i));
        let Some(p) = pivot else {
            return R::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        if k + 1 == n {
            break;
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        rest.par_iter_mut().for_each(|row| {
            let lead = row[k].clone();
            for j in k + 1..n {
                let t = pivot_row[k].clone() * &row[j] - lead.clone() * &pivot_row[j];
                row[j] = t
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly");
            }
            row[k] = R::zero();
        });
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Gaussian elimination over a field, pivoting on units.
pub fn gauss_det<F: Field>(m: &Matrix<F>) -> F {
    let n = m.len();
    let mut a = m.clone();
    let mut det = F::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k].is_unit()) else {
            return F::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let inv = a[k][k].inv().expect("pivot is a unit");
        det = det * &a[k][k];
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let f = row[k].clone() * &inv;
            for j in k + 1..n {
                let t = f.clone() * &pivot_row[j];
                row[j] -= &t;
            }
            row[k] = F::zero();
        }
    }
    det
}

/// Determinant by cofactor expansion along the first row. Exponential; for
/// cross-checking tiny matrices.
pub fn cofactor_det<R: Ring>(m: &Matrix<R>) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    let mut acc = R::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Matrix<R> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = m[0][j].clone() * &cofactor_det(&minor);
        if j % 2 == 0 {
            acc += t;
        } else {
            acc -= &t;
        }
    }
    acc
}

/// Connected components of the bipartite row/column graph of the nonzero
/// pattern. Permuting rows and columns into component order makes the matrix
/// block diagonal, so `det = sign * prod det(block)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    /// `0` when some component is not square, which forces `det = 0`.
    pub sign: i8,
    pub blocks: Vec<(Vec<usize>, Vec<usize>)>,
}

impl BlockStructure {
    pub fn of(n: usize, nonzero: impl Fn(usize, usize) -> bool) -> Self {
        // Union-find over rows 0..n and columns n..2n.
        let mut parent: Vec<usize> = (0..2 * n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..n {
            for j in 0..n {
                if nonzero(i, j) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, n + j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        let mut comp: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
        for v in 0..2 * n {
            let r = find(&mut parent, v);
            let e = comp.entry(r).or_default();
            if v < n {
                e.0.push(v);
            } else {
                e.1.push(v - n);
            }
        }
        let mut blocks: Vec<_> = comp.into_values().collect();
        blocks.sort_by_key(|(r, c)| (r.first().copied(), c.first().copied()));
        if blocks.iter().any(|(r, c)| r.len() != c.len()) {
            return BlockStructure { sign: 0, blocks };
        }
        let rows: Vec<usize> = blocks.iter().flat_map(|b| b.0.iter().copied()).collect();
        let cols: Vec<usize> = blocks.iter().flat_map(|b| b.1.iter().copied()).collect();
        let sign = permutation_sign(&rows) * permutation_sign(&cols);
        BlockStructure { sign, blocks }
    }

    pub fn of_matrix<R: Ring>(m: &Matrix<R>) -> Self {
        Self::of(m.len(), |i, j| !m[i][j].is_zero())
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.0.len()).max().unwrap_or(0)
    }

    /// `sign * prod det(block)` with `det` applied to each block in parallel.
    pub fn det<R: Ring>(&self, m: &Matrix<R>, det: impl Fn(&Matrix<R>) -> R + Sync) -> R {
        if self.sign == 0 {
            return R::zero();
        }
        let parts: Vec<R> = self
            .blocks
            .par_iter()
            .map(|(rows, cols)| {
                let sub: Matrix<R> =
                    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
                det(&sub)
            })
            .collect();
        let mut acc = if self.sign < 0 { -R::one() } else { R::one() };
        for p in &parts {
            acc = acc * p;
        }
        acc
    }
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// `a + b t` with `t^2 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<F> {
    pub a: F,
    pub b: F,
}

impl<F: Ring> Dual<F> {
    pub fn new(a: F, b: F) -> Self {
        Dual { a, b }
    }
}

/// `(det A, d/dt det(A + tB) at t = 0)`, via elimination over dual numbers.
///
/// Returns `None` when `A` is singular, where the derivative is not computed.
pub fn det_and_directional_derivative<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Option<(F, F)> {
    let m: Matrix<Dual<F>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| Dual::new(x.clone(), y.clone())).collect())
        .collect();
    let d = gauss_det(&m);
    if d.a.is_zero() {
        None
    } else {
        Some((d.a, d.b))
    }
}

impl<F: Ring> Zero for Dual<F> {
    fn zero() -> Self {
        Dual::new(F::zero(), F::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<F: Ring> One for Dual<F> {
    fn one() -> Self {
        Dual::new(F::one(), F::zero())
    }
}

impl<F: Ring> Add for Dual<F> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Dual::new(self.a + &r.a, self.b + &r.b)
    }
}

impl<'x, F: Ring> Add<&'x Dual<F>> for Dual<F> {
    type Output = Self;
    fn add(self, r: &'x Self) -> Self {
        Dual::new(self.a + &r.a, self.b + &r.b)
    }
}

impl<F: Ring> Sub for Dual<F> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Dual::new(self.a - &r.a, self.b - &r.b)
    }
}

impl<'x, F: Ring> Sub<&'x Dual<F>> for Dual<F> {
    type Output = Self;
    fn sub(self, r: &'x Self) -> Self {
        Dual::new(self.a - &r.a, self.b - &r.b)
    }
}

impl<F: Ring> Mul for Dual<F> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        self * &r
    }
}

impl<'x, F: Ring> Mul<&'x Dual<F>> for Dual<F> {
    type Output = Self;
    fn mul(self, r: &'x Self) -> Self {
        let b = self.a.clone() * &r.b + self.b * &r.a;
        Dual::new(self.a * &r.a, b)
    }
}

impl<F: Ring> Neg for Dual<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.a, -self.b)
    }
}

impl<F: Ring> AddAssign for Dual<F> {
    fn add_assign(&mut self, r: Self) {
        self.a += &r.a;
        self.b += &r.b;
    }
}

impl<'x, F: Ring> AddAssign<&'x Dual<F>> for Dual<F> {
    fn add_assign(&mut self, r: &'x Self) {
        self.a += &r.a;
        self.b += &r.b;
    }
}

impl<'x, F: Ring> SubAssign<&'x Dual<F>> for Dual<F> {
    fn sub_assign(&mut self, r: &'x Self) {
        self.a -= &r.a;
        self.b -= &r.b;
    }
}

impl<F: Ring> Ring for Dual<F> {
    fn from_int(v: i64) -> Self {
        Dual::new(F::from_int(v), F::zero())
    }
}

impl<F: Field> ExactDiv for Dual<F> {
    fn div_exact(&self, d: &Self) -> Option<Self> {
        Some(self.clone() * &d.inv()?)
    }
}

impl<F: Field> Field for Dual<F> {
    fn inv(&self) -> Option<Self> {
        let ia = self.a.inv()?;
        let b = -(self.b.clone() * &ia * &ia);
        Some(Dual::new(ia, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::Fp;
    use crate::poly::MultiPoly;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;
    type P = MultiPoly<Q>;

    fn q(v: i64) -> Q {
        Q::from_int(v)
    }

    #[test]
    fn two_by_two_symbolic() {
        let z = |i| P::var(i);
        let m = vec![vec![z(0), z(1)], vec![z(2), z(3)]];
        assert_eq!(bareiss_det(&m), z(0) * z(3) - z(1) * z(2));
    }

    #[test]
    fn diagonal_and_zero_row() {
        let z = |i| P::var(i);
        let f = [z(0) + P::one(), z(1).pow(2), z(0) * z(1)];
        let mut m = vec![vec![P::zero(); 3]; 3];
        for i in 0..3 {
            m[i][i] = f[i].clone();
        }
        assert_eq!(bareiss_det(&m), f[0].clone() * &f[1] * &f[2]);
        m[1] = vec![P::zero(); 3];
        assert!(bareiss_det(&m).is_zero());
    }

    #[test]
    fn symbolic_matches_cofactor_3x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let m: Matrix<P> = (0..3)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            let mut p = P::zero();
                            for _ in 0..rng.gen_range(0..3) {
                                let e = vec![rng.gen_range(0..3), rng.gen_range(0..2)];
                                p.add_term(crate::poly::Monomial::new(e), &q(rng.gen_range(-3..4)));
                            }
                            p
                        })
                        .collect()
                })
                .collect();
            let det = bareiss_det(&m);
            assert_eq!(det, cofactor_det(&m));
            for _ in 0..20 {
                let pt = [q(rng.gen_range(-50..50)), q(rng.gen_range(-50..50))];
                let num: Matrix<Q> = m.iter().map(|r| r.iter().map(|e| e.eval(&pt)).collect()).collect();
                assert_eq!(det.eval(&pt), gauss_det(&num));
            }
        }
    }

    #[test]
    fn dual_derivative_of_det() {
        // d/dt det(A + tB) = det(A) tr(A^{-1} B); oracle by finite differences of a polynomial in t.
        let p = 1_000_000_007u64;
        let f = |v: i64| Fp::from_i64(v, p);
        let a = vec![vec![f(2), f(1), f(0)], vec![f(1), f(3), f(1)], vec![f(0), f(1), f(4)]];
        let b = vec![vec![f(1), f(0), f(2)], vec![f(0), f(1), f(0)], vec![f(5), f(0), f(1)]];
        let (d, dd) = det_and_directional_derivative(&a, &b).unwrap();
        assert_eq!(d, gauss_det(&a));
        // det(A + tB) is a cubic in t; recover the linear coefficient from 4 samples.
        let at = |t: i64| -> Fp {
            let m: Matrix<Fp> = a
                .iter()
                .zip(&b)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| *x + f(t) * *y).collect())
                .collect();
            cofactor_det(&m)
        };
        let (v0, v1, v2, v3) = (at(0), at(1), at(2), at(3));
        // Newton forward differences: c1 = D1 - D2/2 + D3/3.
        let d1 = v1 - v0;
        let d2 = v2 - v1 * f(2) + v0;
        let d3 = v3 - v2 * f(3) + v1 * f(3) - v0;
        let half = f(2).inv().unwrap();
        let third = f(3).inv().unwrap();
        assert_eq!(dd, d1 - d2 * half + d3 * third);
    }

    #[test]
    fn block_det_matches_plain() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..7);
            let m: Matrix<Q> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| if rng.gen_bool(0.3) { q(rng.gen_range(-5..6)) } else { q(0) })
                        .collect()
                })
                .collect();
            let bs = BlockStructure::of_matrix(&m);
            assert_eq!(bs.det(&m, gauss_det), cofactor_det(&m));
        }
    }

    proptest! {
        #[test]
        fn field_det_matches_cofactor(entries in prop::collection::vec(-20i64..20, 16)) {
            let m: Matrix<Q> = entries.chunks(4).map(|r| r.iter().map(|&v| q(v)).collect()).collect();
            prop_assert_eq!(gauss_det(&m), cofactor_det(&m));
            prop_assert_eq!(bareiss_det(&m), cofactor_det(&m));
        }
    }
}
