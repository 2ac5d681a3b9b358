//! Comparisons against frozen mpmath references (tests/data, regenerated by
//! gen_oracles.py).

mod common;

use common::{rel_err, table};
use ou_crossing::eigen::{build_eigensystem, hermite_fn, hermite_scaled, kummer_1f1};
use ou_crossing::fpt::{fpt_survival, mean_fpt_standardized, select_truncation};
use ou_crossing::OuParams;

#[test]
fn hermite_functions() {
    for r in table(include_str!("data/hermite.csv")) {
        let (nu, x, want) = (r[0], r[1], r[2]);
        let got = hermite_fn(nu, x).unwrap();
        // scale of the normalised function, for values near a zero
        let scale = (hermite_fn(nu, x).unwrap() / hermite_scaled(nu, x).unwrap()).abs();
        let tol = 1e-10 * want.abs().max(1e-3 * scale);
        assert!(
            (got - want).abs() <= tol,
            "H_{nu}({x}) = {got}, want {want}"
        );
    }
}

#[test]
fn confluent_hypergeometric() {
    for r in table(include_str!("data/kummer.csv")) {
        let (a, b, z, want) = (r[0], r[1], r[2], r[3]);
        let got = kummer_1f1(a, b, z).unwrap();
        assert!(
            rel_err(got, want) < 1e-9,
            "1F1({a}; {b}; {z}) = {got}, want {want}"
        );
    }
}

#[test]
fn eigenvalues_and_terms() {
    let rows = table(include_str!("data/eigen.csv"));
    for b in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let es = build_eigensystem(b, 45).unwrap();
        let terms = es.weighted_terms(0.0).unwrap();
        for r in rows.iter().filter(|r| r[0] == b) {
            let k = r[1] as usize;
            assert!(
                (es.alphas[k] - r[2]).abs() < 1e-9 * r[2].max(1.0),
                "b={b} k={k}: {} vs {}",
                es.alphas[k],
                r[2]
            );
            assert!(
                rel_err(terms[k], r[3]) < 1e-6,
                "b={b} k={k}: term {} vs {}",
                terms[k],
                r[3]
            );
        }
    }
}

#[test]
fn survival_against_laplace_inversion() {
    for r in table(include_str!("data/survival.csv")) {
        let (x, b, t, want) = (r[0], r[1], r[2], r[3]);
        let got = fpt_survival(&OuParams::standard(), x, b, t, 60).unwrap();
        assert!(
            (got.prob - want).abs() < 1e-9,
            "x={x} b={b} t={t}: {} vs {want}",
            got.prob
        );
    }
}

#[test]
fn mean_passage_times() {
    for r in table(include_str!("data/mean_fpt.csv")) {
        assert!(rel_err(mean_fpt_standardized(r[0], r[1]).unwrap(), r[2]) < 1e-10);
    }
}

#[test]
fn truncation_counts() {
    for r in table(include_str!("data/truncation.csv")) {
        let n = select_truncation(r[0], r[1], 0.5, 0.05, 200.0).unwrap();
        assert_eq!(n, r[2] as usize, "x={} b={}", r[0], r[1]);
    }
}
