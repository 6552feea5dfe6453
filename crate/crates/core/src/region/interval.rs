//! Outward-rounded interval arithmetic and forward-mode duals.
//!
//! Basic operations are rounded to nearest by the hardware and then widened
//! by one ulp on each side. The transcendental functions are bounded through
//! monotonicity and widened by a few ulps to cover library error.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Arithmetic shared by `f64`, [`Interval`] and [`Dual`].
pub trait Real: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn cst(c: f64) -> Self;
    fn exp(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    /// `sinh(x) / x`, equal to 1 at 0.
    fn sinhc(self) -> Self;
    fn sqr(self) -> Self {
        self * self
    }
}

/// Scalars that also provide the derivative of `sinhc`.
pub trait Scalar: Real {
    /// `(x cosh x - sinh x) / x^2`.
    fn dsinhc(self) -> Self;
}

impl Real for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn sinhc(self) -> Self {
        if self == 0.0 {
            1.0
        } else {
            f64::sinh(self) / self
        }
    }
}

impl Scalar for f64 {
    fn dsinhc(self) -> Self {
        if self.abs() < 1.0 {
            // sum_{k>=1} 2k x^{2k-1} / (2k+1)!
            let x2 = self * self;
            let mut term = self / 3.0;
            let mut sum = 0.0f64;
            let mut k = 1.0;
            while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
                sum += term;
                term *= x2 * (k + 1.0) / (k * (2.0 * k + 2.0) * (2.0 * k + 3.0));
                k += 1.0;
                if term == 0.0 {
                    break;
                }
            }
            sum
        } else {
            (self * self.cosh() - self.sinh()) / (self * self)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |a, _| a.next_down())
}

fn up(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |a, _| a.next_up())
}

/// Widens a point value by a relative error `rel` plus `ulps` ulps.
fn widen_rel(v: f64, rel: f64, ulps: u32) -> (f64, f64) {
    let e = v.abs() * rel;
    (down(v - e, ulps), up(v + e, ulps))
}

const TRANSCENDENTAL_ULPS: u32 = 3;

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "[{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    fn rounded(lo: f64, hi: f64) -> Interval {
        Interval { lo: down(lo, 1), hi: up(hi, 1) }
    }

    fn monotone(self, f: fn(f64) -> f64, ulps: u32) -> Interval {
        Interval { lo: down(f(self.lo), ulps), hi: up(f(self.hi), ulps) }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::rounded(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::rounded(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::rounded(lo, hi)
    }
}

impl Real for Interval {
    fn cst(c: f64) -> Self {
        Interval::point(c)
    }

    fn exp(self) -> Self {
        let r = self.monotone(f64::exp, TRANSCENDENTAL_ULPS);
        Interval { lo: r.lo.max(0.0), hi: r.hi }
    }

    fn sinh(self) -> Self {
        self.monotone(f64::sinh, TRANSCENDENTAL_ULPS)
    }

    fn cosh(self) -> Self {
        let a = self.lo.abs().min(self.hi.abs());
        let b = self.lo.abs().max(self.hi.abs());
        let lo = if self.contains(0.0) { 1.0 } else { down(a.cosh(), TRANSCENDENTAL_ULPS).max(1.0) };
        Interval { lo, hi: up(b.cosh(), TRANSCENDENTAL_ULPS) }
    }

    fn sinhc(self) -> Self {
        // Even and increasing in |x|.
        let a = self.lo.abs().min(self.hi.abs());
        let b = self.lo.abs().max(self.hi.abs());
        let lo = if self.contains(0.0) { 1.0 } else { widen_rel(Real::sinhc(a), 4.0 * f64::EPSILON, 1).0.max(1.0) };
        Interval { lo, hi: widen_rel(Real::sinhc(b), 4.0 * f64::EPSILON, 1).1 }
    }

    fn sqr(self) -> Self {
        let a = self.lo.abs().min(self.hi.abs());
        let b = self.lo.abs().max(self.hi.abs());
        let lo = if self.contains(0.0) { 0.0 } else { down(a * a, 1).max(0.0) };
        Interval { lo, hi: up(b * b, 1) }
    }
}

impl Scalar for Interval {
    fn dsinhc(self) -> Self {
        // Odd and increasing on the whole line.
        let f = |x: f64| widen_rel(Scalar::dsinhc(x), 32.0 * f64::EPSILON, 2);
        Interval { lo: f(self.lo).0, hi: f(self.hi).1 }
    }
}

/// Value and gradient with respect to `(u, v, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: [T; 3],
}

impl<T: Real> Dual<T> {
    pub fn var(v: T, slot: usize) -> Self {
        let mut d = [T::cst(0.0); 3];
        d[slot] = T::cst(1.0);
        Dual { v, d }
    }

    pub fn constant(v: T) -> Self {
        Dual { v, d: [T::cst(0.0); 3] }
    }

    fn chain(self, v: T, dv: T) -> Self {
        Dual { v, d: self.d.map(|x| dv * x) }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]] }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { v: self.v - o.v, d: [self.d[0] - o.d[0], self.d[1] - o.d[1], self.d[2] - o.d[2]] }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: self.d.map(|x| -x) }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let d = [0, 1, 2].map(|i| self.d[i] * o.v + self.v * o.d[i]);
        Dual { v: self.v * o.v, d }
    }
}

impl<T: Scalar> Real for Dual<T> {
    fn cst(c: f64) -> Self {
        Dual::constant(T::cst(c))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn sinh(self) -> Self {
        self.chain(self.v.sinh(), self.v.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.v.cosh(), self.v.sinh())
    }
    fn sinhc(self) -> Self {
        self.chain(self.v.sinhc(), self.v.dsinhc())
    }
    fn sqr(self) -> Self {
        let two_v = T::cst(2.0) * self.v;
        self.chain(self.v.sqr(), two_v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn basic_ops_enclose() {
        let a = iv(1.0, 2.0);
        let b = iv(-3.0, 0.5);
        assert!(iv(-2.0, 2.5).is_subset_of(&(a + b)));
        assert!(iv(0.5, 5.0).is_subset_of(&(a - b)));
        let p = a * b;
        assert!(iv(-6.0, 1.0).is_subset_of(&p));
        assert!(p.lo > -6.0 - 1e-14 && p.hi < 1.0 + 1e-14);
        assert_eq!(b.sqr().lo, 0.0);
        assert!(b.sqr().contains(9.0));
        let third = Interval::cst(1.0) * Interval::cst(1.0 / 3.0);
        assert!(third.lo < third.hi);
    }

    #[test]
    fn transcendental_bounds() {
        let x = iv(-0.5, 1.5);
        let e = x.exp();
        assert!(e.contains((-0.5f64).exp()) && e.contains(1.5f64.exp()));
        let c = x.cosh();
        assert_eq!(c.lo, 1.0);
        assert!(c.contains(1.5f64.cosh()));
        let s = iv(-2.0, 0.0).sinhc();
        assert_eq!(s.lo, 1.0);
        assert!(s.contains(2f64.sinh() / 2.0));
        let ds = iv(0.1, 3.0).dsinhc();
        assert!(ds.lo > 0.0 && ds.contains(3f64.dsinhc()));
    }

    #[test]
    fn dsinhc_branches_agree() {
        for x in [0.5, 0.9, 0.999, 1.0, 1.001, 2.0] {
            let direct = (x * f64::cosh(x) - f64::sinh(x)) / (x * x);
            assert!((Scalar::dsinhc(x) - direct).abs() < 1e-14, "{x}");
        }
        assert_eq!(Scalar::dsinhc(0.0), 0.0);
        assert!((Scalar::dsinhc(1e-3) - (1e-3 / 3.0 + 1e-9 / 30.0)).abs() < 1e-17);
    }

    #[test]
    fn dual_derivatives() {
        let x = Dual::var(0.7f64, 0);
        let y = Dual::var(1.3f64, 1);
        let f = (x * y).exp() + x.sinhc() * y.sqr() - y.cosh();
        let fx = 1.3 * (0.91f64).exp() + Scalar::dsinhc(0.7) * 1.69;
        let fy = 0.7 * (0.91f64).exp() + 2.0 * 1.3 * Real::sinhc(0.7) - 1.3f64.sinh();
        assert!((f.d[0] - fx).abs() < 1e-13);
        assert!((f.d[1] - fy).abs() < 1e-13);
        assert_eq!(f.d[2], 0.0);
    }
}
