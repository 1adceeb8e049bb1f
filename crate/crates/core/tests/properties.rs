use std::sync::OnceLock;

use num_traits::Zero;
use proptest::prelude::*;

use qdisc_core::central::{validate_central, CentralStructure};
use qdisc_core::discriminant::{
    compare_up_to_scalar, discriminant_symbolic, gram_matrix, CompareOptions, Lhs, Method,
};
use qdisc_core::formulas::{qmatrix, qweyl, qweyl_formula, qweyl_reversed};
use qdisc_core::laurent::LaurentQ;
use qdisc_core::poisson::{bracket_generators, BracketTable};
use qdisc_core::{Algebra, CycNum, Factored, Monomial, Multidegree, NcElement, Poly};

struct Fixture {
    alg: Algebra,
    cs: CentralStructure,
    table: BracketTable,
}

fn fixture(which: usize) -> &'static Fixture {
    static CELLS: [OnceLock<Fixture>; 2] = [OnceLock::new(), OnceLock::new()];
    CELLS[which].get_or_init(|| {
        let alg = if which == 0 { qweyl(3).unwrap() } else { qmatrix(2, 2, 3).unwrap() };
        let cs = validate_central(&alg).unwrap();
        let table = bracket_generators(&alg, &cs).unwrap();
        Fixture { alg, cs, table }
    })
}

fn coef(alg: &Algebra, c: i64, k: i64) -> CycNum {
    let f = alg.field();
    f.from_int(c) * &f.eps_pow(k)
}

fn element(alg: &Algebra, terms: &[(Vec<u32>, i64, i64)]) -> NcElement<CycNum> {
    let n = alg.ngens();
    let mut x = NcElement::zero();
    for (e, c, k) in terms {
        x.add_term(e.iter().cycle().take(n).copied().collect(), &coef(alg, *c, *k));
    }
    x
}

fn poly(alg: &Algebra, nvars: usize, terms: &[(Vec<u32>, i64, i64)]) -> Poly {
    let mut p = Poly::zero();
    for (e, c, k) in terms {
        p.add_term(Monomial::new(e.iter().cycle().take(nvars).copied().collect()), &coef(alg, *c, *k));
    }
    p
}

fn terms(max_exp: u32, len: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64, i64)>> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, 4), -3i64..=3, 0i64..3), 1..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generic_associativity(a in terms(2, 2), b in terms(2, 2), c in terms(2, 2)) {
        let fx = fixture(1);
        let g = fx.alg.generic().unwrap();
        let lift = |t: &[(Vec<u32>, i64, i64)]| {
            element(&fx.alg, t).map_coeffs(|c| LaurentQ::constant(c.clone())).scale_q(1)
        };
        let (a, b, c) = (lift(&a), lift(&b), lift(&c));
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
    }

    #[test]
    fn trace_is_cyclic(a in terms(4, 3), b in terms(4, 3), which in 0usize..2) {
        let fx = fixture(which);
        let (x, y) = (element(&fx.alg, &a), element(&fx.alg, &b));
        let sp = &fx.alg.special;
        prop_assert_eq!(fx.cs.trace(&fx.alg, &sp.mul(&x, &y)), fx.cs.trace(&fx.alg, &sp.mul(&y, &x)));
    }

    #[test]
    fn bracket_is_a_poisson_bracket(f in terms(2, 3), g in terms(2, 3), h in terms(1, 2), which in 0usize..2) {
        let fx = fixture(which);
        let nv = fx.cs.ngens();
        let (f, g, h) = (poly(&fx.alg, nv, &f), poly(&fx.alg, nv, &g), poly(&fx.alg, nv, &h));
        let t = &fx.table;
        prop_assert_eq!(t.bracket(&f, &g), -t.bracket(&g, &f));
        prop_assert_eq!(t.bracket(&f, &(g.clone() * &h)), t.bracket(&f, &g) * &h + g.clone() * &t.bracket(&f, &h));
        let jac = t.bracket(&f, &t.bracket(&g, &h)) + t.bracket(&g, &t.bracket(&h, &f)) + t.bracket(&h, &t.bracket(&f, &g));
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn bracket_is_homogeneous(e1 in prop::collection::vec(0u32..3, 4), e2 in prop::collection::vec(0u32..3, 4), which in 0usize..2) {
        let fx = fixture(which);
        let nv = fx.cs.ngens();
        let f = poly(&fx.alg, nv, &[(e1, 1, 0)]);
        let g = poly(&fx.alg, nv, &[(e2, 1, 0)]);
        let grading = fx.cs.grading();
        let b = fx.table.bracket(&f, &g);
        if !b.is_zero() {
            let (Multidegree::Homogeneous(df), Multidegree::Homogeneous(dg)) = (f.multidegree(grading), g.multidegree(grading)) else {
                unreachable!()
            };
            let want: Vec<i64> = df.iter().zip(&dg).map(|(x, y)| x + y).collect();
            prop_assert_eq!(b.multidegree(grading), Multidegree::Homogeneous(want));
        }
    }

    #[test]
    fn comparison_recovers_scalar(c in 1i64..50, k in 0i64..3, seed in 0u64..1000) {
        let f = qdisc_core::make_field(3).unwrap();
        let base = qweyl_formula(3).unwrap();
        let s = f.from_int(c) * &f.eps_pow(k);
        let e = base.expand().scale(&s);
        let o = CompareOptions { trials: 10, seed, method: Method::Exact, grading: None };
        let r = compare_up_to_scalar(Lhs::Poly(&e), &base, f, &o).unwrap();
        prop_assert!(r.pass);
        prop_assert_eq!(r.scalar, Some(s));
    }
}

#[test]
fn reversed_generator_order_gives_the_same_discriminant_class() {
    // The reversed presentation lists x2 first, so its variables are (z2, z1).
    let alg = qweyl_reversed(3).unwrap();
    let cs = validate_central(&alg).unwrap();
    let d = discriminant_symbolic(&gram_matrix(&alg, &cs));
    let formula: Factored = qweyl_formula(3).unwrap();
    let o = CompareOptions { trials: 12, seed: 3, method: Method::Exact, grading: None };
    let r = compare_up_to_scalar(Lhs::Poly(&d), &formula, alg.field(), &o).unwrap();
    assert!(r.pass, "{:?}", r.mismatch);
}
