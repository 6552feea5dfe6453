mod common;

use common::{confident_sign, contradictions};
use proptest::prelude::*;
use tiltcheck::expineq::rational::{frac, int, to_f64, Q};
use tiltcheck::expineq::{base_case_sign, decide_sign, parse_expr, BaseCaseSign, ExpPoly, ProverConfig, UPoly, BATTERY};

fn exp_poly() -> impl Strategy<Value = ExpPoly> {
    prop::collection::vec((-5i64..=5, 0u32..=3, -2i32..=3), 1..6).prop_map(|terms| {
        let mut p = ExpPoly::zero();
        for (c, i, k) in terms {
            p.add_term(i, k, int(c));
        }
        p
    })
}

fn monomial() -> impl Strategy<Value = ExpPoly> {
    (-4i64..=4, 0u32..=3, -2i32..=2).prop_map(|(c, i, k)| ExpPoly::monomial(int(c), i, k))
}

fn taylor_remainder(k: i64, n: u32) -> ExpPoly {
    // e^{kw} - sum_{j<=n} (kw)^j / j!
    let mut p = ExpPoly::exp_w(k as i32);
    let mut fact = 1i64;
    for j in 0..=n {
        if j > 0 {
            fact *= j as i64;
        }
        p.add_term(j, 0, -frac(k.pow(j), fact));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normalize_preserves_sign(p in exp_poly(), ws in prop::collection::vec(0.01f64..8.0, 100)) {
        prop_assume!(!p.is_zero());
        let n = p.normalize().unwrap();
        prop_assert!(n.is_normalized());
        for w in ws {
            if let (Some(a), Some(b)) = (confident_sign(&p, w), confident_sign(&n, w)) {
                prop_assert_eq!(a, b, "w = {}", w);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences(p in exp_poly()) {
        let d = p.derivative();
        for w in [0.5, 1.0, 2.0] {
            let exact = d.eval_f64(w);
            let fd = common::d1(|x| p.eval_f64(x), w, 0.05);
            let scale: f64 = d.terms().map(|(i, k, c)| (to_f64(c) * w.powi(i as i32) * (k as f64 * w).exp()).abs()).sum();
            prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(scale).max(1e-12), "{}: {} vs {}", w, exact, fd);
        }
    }

    #[test]
    fn derivative_is_linear_with_product_rule(a in monomial(), b in monomial(), p in exp_poly(), q in exp_poly()) {
        prop_assert_eq!((&p + &q).derivative(), &p.derivative() + &q.derivative());
        let lhs = (&a * &b).derivative();
        let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn base_case_agrees_with_known_roots(
        roots in prop::collection::vec((-40i64..=40, 1i64..=8), 0..4),
        quad in prop::collection::vec(1i64..=9, 0..2),
        lead in prop::sample::select(vec![-3i64, -1, 1, 2]),
    ) {
        let mut q = UPoly::constant(int(lead));
        let mut expected = 0usize;
        let mut rs: Vec<Q> = Vec::new();
        for (n, d) in roots {
            let r = frac(n, d);
            if r > int(1) && !rs.contains(&r) {
                expected += 1;
            }
            rs.push(r.clone());
            q = q.mul(&UPoly::new(vec![-r, int(1)]));
        }
        for c in quad {
            q = q.mul(&UPoly::from_ints(&[c, 0, 1]));
        }
        match base_case_sign(&q, &int(1)) {
            BaseCaseSign::Undetermined { roots } => {
                prop_assert!(expected > 0);
                prop_assert_eq!(roots.len(), expected);
            }
            s => {
                prop_assert_eq!(expected, 0);
                let sign = q.eval(&int(2)) > int(0);
                prop_assert_eq!(s == BaseCaseSign::Positive, sign);
            }
        }
    }

    #[test]
    fn base_case_agrees_with_rational_bisection(coeffs in prop::collection::vec(-9i64..=9, 1..=7)) {
        let q = UPoly::from_ints(&coeffs);
        prop_assume!(!q.is_zero());
        // Exact signs on a rational grid over (1, R], R beyond every root.
        let sf = q.square_free();
        let bound = tiltcheck::expineq::upoly::root_bound(&q) + int(1);
        let steps = 512i64;
        let grid: Vec<Q> = (1..=steps).map(|i| int(1) + (&bound - int(1)) * frac(i, steps)).collect();
        let signs: Vec<i8> = grid.iter().map(|x| tiltcheck::expineq::upoly::sign_of(&sf.eval(x))).collect();
        let grid_root = signs.contains(&0) || signs.windows(2).any(|s| s[0] != s[1]);
        match base_case_sign(&q, &int(1)) {
            BaseCaseSign::Undetermined { roots } => {
                prop_assert!(!roots.is_empty());
                // Each isolating interval brackets a sign change of the square-free part.
                for (a, b) in &roots {
                    let (sa, sb) = (tiltcheck::expineq::upoly::sign_of(&sf.eval(a)), tiltcheck::expineq::upoly::sign_of(&sf.eval(b)));
                    prop_assert!(sa == 0 || sb == 0 || sa != sb, "{:?} {:?}", a, b);
                }
            }
            s => {
                prop_assert!(!grid_root);
                let want = if s == BaseCaseSign::Positive { 1 } else { -1 };
                prop_assert!(grid.iter().all(|x| tiltcheck::expineq::upoly::sign_of(&q.eval(x)) == want));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certified_signs_survive_sampling(p in exp_poly()) {
        prop_assume!(!p.is_zero());
        let cfg = ProverConfig { max_depth: 12, max_point_bits: 512, ..Default::default() };
        if let Some(c) = decide_sign(&p, &cfg).certificate() {
            prop_assert!(c.replay().is_ok());
            let bad = contradictions(&p, c.claim.as_i8(), 10_000);
            prop_assert!(bad.is_empty(), "{} claimed {} but sampled otherwise at {:?}", p, c.claim, &bad[..bad.len().min(5)]);
        }
    }
}

#[test]
fn taylor_remainders_are_certified_positive() {
    for k in 1..=3 {
        for n in 0..=4 {
            let p = taylor_remainder(k, n);
            let d = decide_sign(&p, &ProverConfig::default());
            let c = d.certificate().unwrap_or_else(|| panic!("e^{k}w remainder of order {n}: {d:?}"));
            assert_eq!(c.claim.as_i8(), 1);
            c.replay().unwrap();
            assert!(contradictions(&p, 1, 10_000).is_empty());
        }
    }
}

#[test]
fn battery_signs_survive_sampling() {
    for m in BATTERY {
        let p = parse_expr(m.expr).unwrap();
        let bad = contradictions(&p, m.claimed.as_i8(), 10_000);
        assert!(bad.is_empty(), "{}: {:?}", m.id, &bad[..bad.len().min(5)]);
    }
}

#[test]
fn sign_changing_input_is_undetermined() {
    for src in ["w - 1", "exp(w) - 3", "sinh(w) - w^2", "cosh(2*w) - 4*w^2"] {
        let p = parse_expr(src).unwrap();
        assert!(decide_sign(&p, &ProverConfig::default()).certificate().is_none(), "{src}");
    }
}

#[test]
fn positive_with_a_dip_is_certified() {
    let p = parse_expr("cosh(2*w) - 3*w^2").unwrap();
    let c = decide_sign(&p, &ProverConfig::default()).certificate().cloned().expect("certified");
    assert_eq!(c.claim.as_i8(), 1);
    assert!(contradictions(&p, 1, 10_000).is_empty());
}
