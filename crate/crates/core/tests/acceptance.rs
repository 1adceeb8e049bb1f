//! One line per acceptance criterion. Run with
//! `cargo test -p qdisc-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use serde_json::Value;

use qdisc_core::central::validate_central;
use qdisc_core::discriminant::{compare_up_to_scalar, gram_matrix, CompareOptions, Lhs, Method};
use qdisc_core::formulas::{qmatrix, qweyl, qweyl_formula, rect_qmatrix_formula, square_qmatrix_formula};
use qdisc_core::verify::{discriminant_run, run_suite, unique_leading_term_records, Config, DiscMethod};

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line { pass, detail: detail.into() }
}

fn all_pass(records: &[Value]) -> bool {
    !records.is_empty() && records.iter().all(|r| r["pass"].as_bool() == Some(true))
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn qweyl_symbolic(l: u32, limit: Duration) -> Line {
    let t0 = Instant::now();
    let alg = qweyl(l).unwrap();
    let cs = validate_central(&alg).unwrap();
    let formula = qweyl_formula(l).unwrap();
    let cfg = Config { trials: 20, seed: 1, ..Config::default() };
    let run = discriminant_run("qweyl", &alg, &cs, &formula, DiscMethod::Symbolic, &cfg).unwrap();
    let dt = t0.elapsed();
    let exact = run.record["exact_equal"].as_bool() == Some(true);
    let size = run.gram.len();
    line(
        run.pass && exact && dt < limit && size == (l * l) as usize,
        format!(
            "qweyl l={l}: {size}x{size} Gram, symbolic det = c (z1z2 - t)^{} exactly, c = {}, {}",
            l * (l - 1),
            run.record["scalar"],
            secs(dt)
        ),
    )
}

fn criterion_1() -> Line {
    qweyl_symbolic(3, Duration::from_secs(10))
}

fn criterion_2() -> Line {
    let sym = qweyl_symbolic(5, Duration::from_secs(600));
    let alg = qweyl(5).unwrap();
    let cs = validate_central(&alg).unwrap();
    let gram = gram_matrix(&alg, &cs);
    let o = CompareOptions {
        trials: 30,
        seed: 2,
        method: Method::Modular { primes: 2 },
        grading: Some(cs.grading().to_vec()),
    };
    let cmp = compare_up_to_scalar(Lhs::Gram(&gram), &qweyl_formula(5).unwrap(), alg.field(), &o).unwrap();
    let sz = cmp.sz_bound_f64();
    let pass = sym.pass && cmp.pass && cmp.points.len() >= 30 && cmp.primes.len() >= 2 && sz < 1e-6;
    line(pass, format!("{}; modular cross-check: {} points over {} primes, SZ {sz:.1e}", sym.detail, cmp.points.len(), cmp.primes.len()))
}

fn criterion_3() -> Line {
    let t0 = Instant::now();
    let alg = qmatrix(2, 2, 3).unwrap();
    let cs = validate_central(&alg).unwrap();
    let gram = gram_matrix(&alg, &cs);
    let t_gram = t0.elapsed();
    let formula = square_qmatrix_formula(2, 3).unwrap();
    let o = CompareOptions {
        trials: 20,
        seed: 3,
        method: Method::Modular { primes: 2 },
        grading: Some(cs.grading().to_vec()),
    };
    let cmp = compare_up_to_scalar(Lhs::Gram(&gram), &formula, alg.field(), &o).unwrap();
    let primes_ok = cmp.primes.len() >= 2
        && cmp.primes.iter().all(|e| e.p % 3 == 1 && e.p >= 1 << 31 && e.p <= 1 << 62);
    let degree = match &cmp.lhs_degree {
        Some(qdisc_core::Multidegree::Homogeneous(d)) => d.clone(),
        _ => vec![],
    };
    let pass = gram.len() == 81
        && t_gram < Duration::from_secs(60)
        && cmp.pass
        && cmp.points.len() >= 20
        && primes_ok
        && cmp.degree_check == Some(true)
        && degree == vec![324; 4];
    line(
        pass,
        format!(
            "qmatrix 2x2 l=3: 81x81 Gram in {}, ratio constant at {} points over {} primes, degree {degree:?}, SZ {:.1e}",
            secs(t_gram),
            cmp.points.len(),
            cmp.primes.len(),
            cmp.sz_bound_f64()
        ),
    )
}

fn criterion_4() -> Line {
    let t0 = Instant::now();
    let cfg = Config { m: Some(1), l: Some(3), method: Some(DiscMethod::Symbolic), trials: 20, seed: 4, ..Config::default() };
    let o = run_suite("thm-5-5", &cfg).unwrap();
    let dt = t0.elapsed();
    let exact = o.records.iter().all(|r| r["exact_equal"].as_bool() == Some(true));
    let oracle = o.records.iter().all(|r| r["gram_oracle"].as_bool() == Some(true));
    let ns: Vec<String> = o.records.iter().map(|r| r["algebra"].as_str().unwrap_or("?").to_string()).collect();
    line(
        o.pass() && o.records.len() == 2 && exact && oracle && dt < Duration::from_secs(60),
        format!("{}: symbolic det equals formula after scalar, brute-force Gram oracle agrees, {}", ns.join(", "), secs(dt)),
    )
}

fn suite_line(name: &str, cfg: Config, what: &str) -> Line {
    let t0 = Instant::now();
    match run_suite(name, &cfg) {
        Ok(o) => {
            let failed: Vec<String> = o
                .records
                .iter()
                .filter(|r| r["pass"].as_bool() != Some(true))
                .map(|r| format!("{} {}", r["check"], r["algebra"]))
                .collect();
            let tail = if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) };
            line(o.pass(), format!("{what}: {} checks, {}{tail}", o.records.len(), secs(t0.elapsed())))
        }
        Err(e) => line(false, format!("{what}: error {e}")),
    }
}

fn criterion_5() -> Line {
    suite_line("lemma-4-2", Config::default(), "bracket tables n=2,3 x l=3,5 match closed form, Jacobi exact")
}

fn criterion_6() -> Line {
    suite_line("remark-4-3", Config::default(), "n=2 l=4 closure fails with the expected divided commutator")
}

fn criterion_7() -> Line {
    suite_line("poisson-normal", Config::default(), "discriminants normal, formula factors Poisson prime")
}

fn criterion_8() -> Line {
    let cfg = Config { trials: 20, primes: 2, seed: 8, ..Config::default() };
    let o = run_suite("prop-3-2", &cfg).unwrap();
    let sym = o.records.iter().filter(|r| r["check"] == "trace-identity-symbolic").count();
    let modular: Vec<&Value> = o.records.iter().filter(|r| r["check"] == "trace-identity-modular").collect();
    let points = modular.iter().map(|r| r["samples"].as_array().map_or(0, Vec::len)).min().unwrap_or(0);
    let closed = modular.iter().all(|r| r["trace_b_matches_closed_form"].as_bool() == Some(true));
    line(
        o.pass() && sym == 2 && modular.len() == 4 && points >= 20 && closed,
        format!("qweyl l=3 symbolic for both z; qmatrix 2x2 l=3 at {points} points per z, traces match closed form"),
    )
}

fn criterion_9() -> Line {
    let o = run_suite("props", &Config { seed: 9, ..Config::default() }).unwrap();
    let min_cases = o.records.iter().map(|r| r["cases"].as_u64().unwrap_or(0)).min().unwrap_or(0);
    line(o.pass() && o.records.len() == 7 && min_cases >= 50, format!("{} property suites, >= {min_cases} cases each", o.records.len()))
}

fn criterion_10() -> Line {
    let r = unique_leading_term_records().unwrap();
    line(all_pass(&r), "true on qweyl discriminant, false on 2x2 minor and on the n=2 product")
}

fn criterion_11() -> Line {
    let t0 = Instant::now();
    let alg = qmatrix(2, 3, 3).unwrap();
    let cs = validate_central(&alg).unwrap();
    let formula = rect_qmatrix_formula(2, 3, 3).unwrap();
    let cfg = Config { trials: 10, primes: 2, seed: 11, ..Config::default() };
    let run = discriminant_run(&alg.name, &alg, &cs, &formula, DiscMethod::Modular, &cfg).unwrap();
    let points = run.record["points"].as_array().map_or(0, Vec::len);
    let dt = t0.elapsed();
    line(
        run.pass && run.gram.len() == 729 && points >= 10 && dt < Duration::from_secs(1800),
        format!("qmatrix 2x3 l=3: 729x729 Gram, modular ratio constant at {points} points, {}", secs(dt)),
    )
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Line); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = Vec::new();
    for (k, f) in criteria {
        let l = f();
        println!("criterion {k}: {} - {}", if l.pass { "PASS" } else { "FAIL" }, l.detail);
        if !l.pass {
            failed.push(k);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
