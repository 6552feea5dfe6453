//! Rational enclosures of `e^r` for rational `r >= 0`.

use num_traits::{One, Signed, Zero};

use super::rational::{frac, int, round_down, round_up, Q};

/// `(lo, hi)` with `lo <= e^r <= hi`, both dyadic with about `bits`
/// significant bits.
///
/// The argument is halved until it is at most `1/2`, a Taylor sum with an
/// explicit geometric tail bound encloses the reduced exponential, and the
/// enclosure is squared back up with outward rounding at every step.
pub fn exp_bounds(r: &Q, bits: u32) -> (Q, Q) {
    assert!(!r.is_negative(), "exp_bounds expects r >= 0");
    if r.is_zero() {
        return (Q::one(), Q::one());
    }
    let half = frac(1, 2);
    let mut halvings = 0u32;
    let mut x = r.clone();
    while x > half {
        x /= int(2);
        halvings += 1;
    }
    let work = bits + halvings + 16;
    let eps = Q::new(1.into(), num_bigint::BigInt::one() << work);

    let mut term = Q::one();
    let mut sum = Q::one();
    let mut k = 0i64;
    loop {
        k += 1;
        term = term * &x / int(k);
        sum += &term;
        // With x <= 1/2 every later term is at most half the previous one,
        // so the tail after `term` is bounded by `term`.
        if term <= eps {
            break;
        }
    }
    let mut lo = round_down(&sum, work);
    let mut hi = round_up(&(sum + &term), work);
    for _ in 0..halvings {
        lo = round_down(&(&lo * &lo), work);
        hi = round_up(&(&hi * &hi), work);
    }
    (round_down(&lo, bits), round_up(&hi, bits))
}
