//! Exact bivariate polynomials `P(w, t)` read at `t = e^w`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{self, int, Q};
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// `sum c_{ik} w^i t^k` with `t` standing for `e^w`.
///
/// Negative powers of `t` are allowed while building expressions
/// (`sinh w = (t - t^{-1})/2`); [`ExpPoly::normalize`] clears them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExpPoly {
    terms: BTreeMap<(u32, i32), Q>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: Q, w_pow: u32, t_pow: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(w_pow, t_pow, c);
        p
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(int(c))
    }

    pub fn w() -> Self {
        Self::monomial(Q::one(), 1, 0)
    }

    /// `t^k = e^{kw}`.
    pub fn exp_w(k: i32) -> Self {
        Self::monomial(Q::one(), 0, k)
    }

    pub fn sinh() -> Self {
        let half = rational::frac(1, 2);
        Self::monomial(half.clone(), 0, 1) - Self::monomial(half, 0, -1)
    }

    pub fn cosh() -> Self {
        let half = rational::frac(1, 2);
        Self::monomial(half.clone(), 0, 1) + Self::monomial(half, 0, -1)
    }

    pub fn add_term(&mut self, w_pow: u32, t_pow: i32, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (w_pow, t_pow);
        let entry = self.terms.entry(key).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i32, &Q)> {
        self.terms.iter().map(|(&(i, k), c)| (i, k, c))
    }

    pub fn coeff(&self, w_pow: u32, t_pow: i32) -> Option<&Q> {
        self.terms.get(&(w_pow, t_pow))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest power of `w`; `None` for zero.
    pub fn w_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn t_range(&self) -> Option<(i32, i32)> {
        let min = self.terms.keys().map(|&(_, k)| k).min()?;
        let max = self.terms.keys().map(|&(_, k)| k).max()?;
        Some((min, max))
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero();
        for (&(i, k), c) in &self.terms {
            out.add_term(i, k, c * s);
        }
        out
    }

    /// Multiply by `w^a t^b`.
    pub fn shift(&self, a: i64, b: i32) -> Self {
        let mut out = Self::zero();
        for (&(i, k), c) in &self.terms {
            let ni = i as i64 + a;
            assert!(ni >= 0, "negative power of w");
            out.add_term(ni as u32, k + b, c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::int(1);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficient of `w^i` as a polynomial in `t` (nonnegative `t` powers only).
    pub fn w_coefficient(&self, i: u32) -> UPoly {
        let mut coeffs: Vec<Q> = Vec::new();
        for (&(wi, k), c) in &self.terms {
            if wi != i {
                continue;
            }
            assert!(k >= 0, "w_coefficient on a non-normalized polynomial");
            let k = k as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Q::zero());
            }
            coeffs[k] = c.clone();
        }
        UPoly::new(coeffs)
    }

    /// The leading coefficient in `w`, a polynomial in `t`.
    pub fn leading_w_coefficient(&self) -> UPoly {
        self.w_degree().map_or_else(UPoly::zero, |n| self.w_coefficient(n))
    }

    pub fn from_upoly(p: &UPoly) -> Self {
        let mut out = Self::zero();
        for (k, c) in p.coeffs().iter().enumerate() {
            out.add_term(0, k as i32, c.clone());
        }
        out
    }

    /// Sign-equivalent form on `w > 0`: nonnegative `t` powers, no common
    /// monomial factor `w^a t^b`, and coprime integer coefficients.
    pub fn normalize(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let a = self.terms.keys().map(|&(i, _)| i).min().unwrap();
        let b = self.terms.keys().map(|&(_, k)| k).min().unwrap();
        let content = rational::content(self.terms.values());
        let inv = content.recip();
        let mut out = Self::zero();
        for (&(i, k), c) in &self.terms {
            out.add_term(i - a, k - b, c * &inv);
        }
        Ok(out)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize().is_ok_and(|n| &n == self)
    }

    /// Total derivative in `w` with `dt/dw = t`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, k), c) in &self.terms {
            if i > 0 {
                out.add_term(i - 1, k, c * int(i as i64));
            }
            if k != 0 {
                out.add_term(i, k, c * int(k as i64));
            }
        }
        out
    }

    /// Value at `w = 0`, `t = 1`.
    pub fn value_at_origin(&self) -> Q {
        self.terms
            .iter()
            .filter(|(&(i, _), _)| i == 0)
            .map(|(_, c)| c.clone())
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Substitute an exact `w`, leaving a polynomial in `t`.
    pub fn at_w(&self, w: &Q) -> UPoly {
        let (lo, _) = self.t_range().unwrap_or((0, 0));
        assert!(lo >= 0, "at_w on a non-normalized polynomial");
        let mut out = UPoly::zero();
        for (&(i, k), c) in &self.terms {
            let mut coeffs = vec![Q::zero(); k as usize + 1];
            coeffs[k as usize] = c * num_traits::pow(w.clone(), i as usize);
            out = out.add(&UPoly::new(coeffs));
        }
        out
    }

    /// Floating value of `P(w, e^w) · e^{-K w}` and the scale exponent
    /// `K w`, where `K` is the largest `t` power. Keeps the sign readable
    /// at large `w` where `e^{Kw}` alone would overflow.
    pub fn eval_scaled(&self, w: f64) -> (f64, f64) {
        let Some((_, kmax)) = self.t_range() else {
            return (0.0, 0.0);
        };
        let acc = self
            .terms
            .iter()
            .map(|(&(i, k), c)| rational::to_f64(c) * w.powi(i as i32) * (((k - kmax) as f64) * w).exp())
            .sum();
        (acc, kmax as f64 * w)
    }

    pub fn eval_f64(&self, w: f64) -> f64 {
        let (v, log_scale) = self.eval_scaled(w);
        v * log_scale.exp()
    }

    /// Sign of `P(w, e^w)` in floating point, robust to overflow.
    pub fn sign_f64(&self, w: f64) -> i8 {
        let (v, _) = self.eval_scaled(w);
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (&(i, k), c) in &rhs.terms {
            out.add_term(i, k, c.clone());
        }
        out
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (&(i, k), c) in &rhs.terms {
            out.add_term(i, k, -c.clone());
        }
        out
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (&(i, k), a) in &self.terms {
            for (&(j, l), b) in &rhs.terms {
                out.add_term(i + j, k + l, a * b);
            }
        }
        out
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale(&-Q::one())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ExpPoly {
            type Output = ExpPoly;
            fn $m(self, rhs: ExpPoly) -> ExpPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        -(&self)
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(i, k), c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            let a = c.abs();
            if !a.is_one() || (i == 0 && k == 0) {
                factors.push(rational::to_string(&a));
            }
            match i {
                0 => {}
                1 => factors.push("w".into()),
                _ => factors.push(format!("w^{i}")),
            }
            match k {
                0 => {}
                1 => factors.push("exp(w)".into()),
                _ => factors.push(format!("exp({k}*w)")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    w: u32,
    t: i32,
    #[serde(with = "rational::serde_q")]
    c: Q,
}

impl Serialize for ExpPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(&(w, t), c)| TermRepr { w, t, c: c.clone() })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let mut p = ExpPoly::zero();
        for t in terms {
            p.add_term(t.w, t.t, t.c);
        }
        Ok(p)
    }
}
