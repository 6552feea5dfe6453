mod common;

use common::{d_branch, rng};
use rand::Rng;
use tiltcheck::tilted::d_expr;

#[test]
fn closed_forms_match_finite_differences() {
    for (id, worst) in common::catalog_fidelity(7, 100) {
        assert!(worst < 1e-5, "{id}: relative error {worst:e}");
    }
}

#[test]
fn branch_oracle_agrees_with_d_expr() {
    let mut r = rng(8);
    for _ in 0..1000 {
        let w = r.gen_range(0.1..4.0);
        let u = r.gen_range(0.0..8.0);
        let v = r.gen_range(0.0..8.0);
        let a = d_expr(u, v, w);
        let b = d_branch(u, v, w, u >= w, v >= w);
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{u} {v} {w}: {a} vs {b}");
    }
}

#[test]
fn finite_difference_helpers_are_accurate() {
    let x = 0.7f64;
    assert!((common::d1(f64::exp, x, 0.1) - x.exp()).abs() < 1e-10);
    assert!((common::d2(f64::sin, x, 0.1) + x.sin()).abs() < 1e-9);
    assert!((common::d3(f64::sin, x, 0.1) + x.cos()).abs() < 1e-7);
}
