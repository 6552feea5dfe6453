#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tiltcheck::tilted::SymmetricDiscreteDistribution;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric law with `1..=max_pairs` pairs at atoms in `(0, x_max]`, and
/// sometimes an atom at the origin.
pub fn random_symmetric(r: &mut impl Rng, max_pairs: usize, x_max: f64) -> SymmetricDiscreteDistribution {
    loop {
        let k = r.gen_range(1..=max_pairs);
        let mut xs: Vec<f64> = (0..k).map(|_| x_max * (1.0 - r.gen::<f64>())).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let with_zero = r.gen_bool(0.3);
        let mut ws: Vec<f64> = (0..xs.len() + with_zero as usize).map(|_| r.gen::<f64>() + 1e-3).collect();
        let total: f64 = ws.iter().sum();
        ws.iter_mut().for_each(|w| *w /= total);
        let mut atoms = Vec::new();
        if with_zero {
            atoms.push((0.0, ws.pop().unwrap()));
        }
        atoms.extend(xs.into_iter().zip(ws));
        if let Ok(d) = SymmetricDiscreteDistribution::new(atoms) {
            return d;
        }
    }
}

/// Ridders' extrapolation of a central-difference estimate `est(h)` whose
/// error is a series in `h^2`.
pub fn ridders(est: impl Fn(f64) -> f64, h0: f64) -> f64 {
    const N: usize = 10;
    const CON2: f64 = 1.4 * 1.4;
    let mut a = [[0.0f64; N]; N];
    let mut h = h0;
    a[0][0] = est(h);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..N {
        h /= 1.4;
        a[0][i] = est(h);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

pub fn d1(f: impl Fn(f64) -> f64, x: f64, h0: f64) -> f64 {
    ridders(|h| (f(x + h) - f(x - h)) / (2.0 * h), h0)
}

pub fn d2(f: impl Fn(f64) -> f64, x: f64, h0: f64) -> f64 {
    ridders(|h| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h), h0)
}

pub fn d3(f: impl Fn(f64) -> f64, x: f64, h0: f64) -> f64 {
    ridders(|h| (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h), h0)
}

/// `g_j` at `h = 1` with the branch of `x ∧ w` fixed: `capped` uses `w`,
/// otherwise `x`. Analytic in `x`, so it can be differentiated across `x = w`.
pub fn g_branch(j: u8, x: f64, w: f64, capped: bool) -> f64 {
    let pos = if capped { w.exp() } else { x.exp() };
    let neg = (-x).exp();
    if j == 0 {
        0.5 * (pos + neg)
    } else {
        0.5 * x * (pos - neg)
    }
}

/// `d` built from [`g_branch`]; equals `d_expr` wherever the branches match
/// the actual order of `u`, `v` against `w`.
pub fn d_branch(u: f64, v: f64, w: f64, u_capped: bool, v_capped: bool) -> f64 {
    let s = w.sinh() / w;
    2.0 * (g_branch(1, u, w, u_capped) + g_branch(1, v, w, v_capped)
        - s * (g_branch(0, u, w, u_capped) * v * v + g_branch(0, v, w, v_capped) * u * u))
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

/// Worst relative disagreement between each closed form and its finite
/// difference oracle over `n` random interior points.
pub fn catalog_fidelity(seed: u64, n: usize) -> Vec<(String, f64)> {
    use tiltcheck::region::catalog::case3_dw_d;
    use tiltcheck::region::ProofExpr as P;
    use tiltcheck::tilted::d_expr;

    let mut r = rng(seed);
    let h0 = 0.05;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let mut out = Vec::new();
    for e in P::ALL {
        let mut worst = 0.0f64;
        for _ in 0..n {
            let w = r.gen_range(0.1..3.0);
            let (closed, oracle) = match e.case() {
                tiltcheck::region::Case::Case1 => {
                    let u = w + r.gen_range(0.05..3.0);
                    let v = u + r.gen_range(0.05..3.0);
                    let dv = |u: f64, w: f64| move |v: f64| d_branch(u, v, w, true, true);
                    let oracle = match e {
                        P::DCase1 => d_expr(u, v, w),
                        P::Dv2Case1 => d2(dv(u, w), v, h0),
                        P::Dv3Case1 => d3(dv(u, w), v, 4.0 * h0),
                        P::D2Case1 => w * u.exp() * d2(dv(u, w), u, h0),
                        P::DtildeCase1 => (u + w).exp() * (w / u) * d_expr(u, u, w),
                        P::D1Case1 => w * u.exp() * d1(dv(u, w), u, h0),
                        _ => unreachable!(),
                    };
                    (e.eval(u, v, w), oracle)
                }
                _ => {
                    let u = w * r.gen_range(0.02..0.98);
                    let v = w + r.gen_range(0.05..3.0);
                    let dv = move |v: f64| d_branch(u, v, w, false, true);
                    let at_w = w * w.exp() * d1(dv, w, h0);
                    match e {
                        P::DCase2 => (e.eval(u, v, w), d_expr(u, v, w)),
                        P::D1Case2 => (e.eval(u, v, w), w * v.exp() * d1(dv, v, h0)),
                        P::DvD1AtWCase2 => (e.eval(u, w, w), w * w.exp() * (d1(dv, w, h0) + d2(dv, w, h0))),
                        P::D11 | P::D12 => (P::D11.eval(u, w, w) + P::D12.eval(u, w, w), at_w),
                        P::D111 | P::D112 => {
                            let split = P::D111.eval(u, w, w) + P::D112.eval(u, w, w) + P::D12.eval(u, w, w);
                            (split, at_w)
                        }
                        P::DAtVEqWCase2 => (e.eval(u, w, w), d_expr(u, w, w)),
                        _ => unreachable!(),
                    }
                }
            };
            worst = worst.max(rel(closed, oracle));
        }
        out.push((e.id().to_string(), worst));
    }
    let mut worst = 0.0f64;
    for _ in 0..n {
        let w = r.gen_range(0.1..3.0);
        let v = w * r.gen_range(0.05..0.98);
        let u = v * r.gen_range(0.05..0.98);
        let oracle = d1(|w| d_branch(u, v, w, false, false), w, h0);
        worst = worst.max(rel(case3_dw_d(u, v, w), oracle));
    }
    out.push(("case3_dw_d".to_string(), worst));
    out
}

/// Sign of `P(w, e^w)` from a float sample, or `None` when the sum is too
/// close to zero relative to its terms to trust.
pub fn confident_sign(p: &tiltcheck::expineq::ExpPoly, w: f64) -> Option<i8> {
    use tiltcheck::expineq::rational::to_f64;
    let kmax = p.terms().map(|(_, k, _)| k).max()?;
    let (mut s, mut a) = (0.0f64, 0.0f64);
    for (i, k, c) in p.terms() {
        let term = to_f64(c) * w.powi(i as i32) * (((k - kmax) as f64) * w).exp();
        s += term;
        a += term.abs();
    }
    if s.abs() > 1e-12 * a {
        Some(if s > 0.0 { 1 } else { -1 })
    } else {
        None
    }
}

/// Sampled points `w_i = 50 i / n`, `i = 1..=n`, whose confident sign
/// contradicts `claimed`.
pub fn contradictions(p: &tiltcheck::expineq::ExpPoly, claimed: i8, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| 50.0 * i as f64 / n as f64)
        .filter(|&w| confident_sign(p, w).is_some_and(|s| s != claimed))
        .collect()
}
