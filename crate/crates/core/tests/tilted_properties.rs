mod common;

use common::random_symmetric;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tiltcheck::tilted::exact::{signed_moment, symmetrized_moment};
use tiltcheck::tilted::{
    bound_factor, check_bound, d_expr, g_expr, tilted_mean, tilted_mean_increment, DiscreteDistribution, FactorKind, SymmetricDiscreteDistribution,
    TiltParams, FLOAT_SLACK,
};

fn dist_strategy() -> impl Strategy<Value = SymmetricDiscreteDistribution> {
    any::<u64>().prop_map(|seed| random_symmetric(&mut ChaCha8Rng::seed_from_u64(seed), 10, 10.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn tilted_mean_obeys_the_symmetric_bound(d in dist_strategy(), h in 1e-3f64..=5.0, w in 1e-3f64..=5.0) {
        let p = TiltParams::new(h, w).unwrap();
        let r = check_bound(&d, p).unwrap();
        prop_assert!(r.mean > -FLOAT_SLACK, "{:?}", r);
        prop_assert!(r.mean < r.bound + FLOAT_SLACK, "{:?}", r);
        prop_assert!(r.holds);
    }

    #[test]
    fn scale_covariance(d in dist_strategy(), h in 0.05f64..=3.0, w in 0.05f64..=3.0, c in 0.1f64..=10.0) {
        let base = tilted_mean(&d, TiltParams::new(h, w).unwrap());
        let scaled = tilted_mean(&d.scaled(c).unwrap(), TiltParams::new(h / c, c * w).unwrap());
        prop_assert!((scaled - c * base).abs() <= 1e-12 * (1.0 + (c * base).abs()), "{} vs {}", scaled, c * base);
    }

    #[test]
    fn symmetric_and_signed_summation_agree(d in dist_strategy(), h in 0.05f64..=5.0, w in 0.05f64..=5.0) {
        let p = TiltParams::new(h, w).unwrap();
        let a = tilted_mean(&d, p);
        let b = DiscreteDistribution::from(&d).tilted_mean(p);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn symmetrization_identity_in_floats(d in dist_strategy(), w in 0.05f64..=5.0) {
        // h = 1: E g_j(|X|) against E X^j e^{X ∧ w} over the signed atoms.
        for j in [0u8, 1] {
            let sym: f64 = d.atoms().iter().map(|&(x, p)| p * g_expr(j, x, w).unwrap()).sum();
            let signed: f64 = d.signed_atoms().iter().map(|&(x, p)| p * if j == 0 { 1.0 } else { x } * x.min(w).exp()).sum();
            prop_assert!((sym - signed).abs() <= 1e-14 * sym.abs().max(signed.abs()).max(1.0), "j={}: {} vs {}", j, sym, signed);
        }
    }

    #[test]
    fn expectation_of_d_has_the_sign_of_the_bound_gap(d in dist_strategy(), w in 0.05f64..=5.0) {
        let p = TiltParams::new(1.0, w).unwrap();
        let s = w.sinh() / w;
        let atoms = d.atoms();
        let mut ed = 0.0;
        for &(u, pu) in atoms {
            for &(v, pv) in atoms {
                ed += pu * pv * d_expr(u, v, w);
            }
        }
        let eg0: f64 = atoms.iter().map(|&(x, q)| q * g_expr(0, x, w).unwrap()).sum();
        let gap = tilted_mean(&d, p) - s * d.second_moment();
        let identity = 4.0 * eg0 * gap;
        let scale: f64 = atoms.iter().map(|&(x, q)| q * (x * x + x) * x.min(w).exp().max((-x).exp())).sum::<f64>() * (1.0 + s) * 4.0;
        prop_assert!((ed - identity).abs() <= 1e-11 * scale.max(1.0), "{} vs {}", ed, identity);
        prop_assert!(ed < 0.0 && gap < 0.0);
    }
}

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

#[test]
fn symmetrization_identity_is_exact() {
    let mut r = common::rng(21);
    for _ in 0..200 {
        let d = random_symmetric(&mut r, 6, 10.0);
        let atoms: Vec<_> = d.atoms().iter().map(|&(x, p)| (q(x), q(p))).collect();
        let h = q(r.gen_range(0.1..3.0));
        let w = q([0.5, 1.0, 2.5, 7.0][r.gen_range(0..4)]);
        for j in [0u8, 1] {
            assert_eq!(signed_moment(&atoms, &h, &w, j), symmetrized_moment(&atoms, &h, &w, j));
        }
    }
}

#[test]
fn tilted_mean_increases_in_h() {
    let mut r = common::rng(22);
    let grid: Vec<f64> = (1..=50).map(|i| i as f64 / 10.0).collect();
    for _ in 0..100 {
        let d = random_symmetric(&mut r, 10, 10.0);
        let w = r.gen_range(0.1..5.0);
        let means: Vec<f64> = grid.iter().map(|&h| tilted_mean(&d, TiltParams::new(h, w).unwrap())).collect();
        assert!(means.windows(2).all(|m| m[1] >= m[0] * (1.0 - 4.0 * f64::EPSILON)), "{:?} w={w}: {means:?}", d.atoms());
        for h in grid.windows(2) {
            let inc = tilted_mean_increment(&d, w, h[0], h[1]).unwrap();
            assert!(inc > 0.0, "{:?} w={w} h={h:?}", d.atoms());
            let diff = tilted_mean(&d, TiltParams::new(h[1], w).unwrap()) - tilted_mean(&d, TiltParams::new(h[0], w).unwrap());
            assert!((inc - diff).abs() <= 1e-12 * (1.0 + means[0].abs()));
        }
    }
}

#[test]
fn symmetric_factor_is_smaller_and_tends_to_half() {
    for hw in [1e-3, 0.1, 1.0, 5.0, 10.0, 20.0, 40.0] {
        let p = TiltParams::new(hw, 1.0).unwrap();
        let s = bound_factor(FactorKind::Symmetric, p).value;
        let z = bound_factor(FactorKind::ZeroMean, p).value;
        assert!(s < z);
    }
    let ratio = |x: f64| x.sinh() / x.exp_m1();
    let xs = [1.0, 5.0, 10.0, 20.0];
    assert!(xs.windows(2).all(|x| ratio(x[1]) < ratio(x[0])));
    assert!((ratio(10.0) - 0.5).abs() < 1e-4);
    assert!(ratio(20.0) > 0.5);
}

#[test]
fn sinhc_increases() {
    let f = |w: f64| w.sinh() / w;
    for w in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        assert!(common::d1(f, w, 0.01) > 0.0);
    }
}

#[test]
fn json_round_trip() {
    let d = SymmetricDiscreteDistribution::new(vec![(0.0, 0.25), (1.5, 0.75)]).unwrap();
    let back = SymmetricDiscreteDistribution::from_json(&d.to_json()).unwrap();
    assert_eq!(d, back);
}
