//! Univariate polynomials with rational coefficients, Sturm chains and
//! exact real-root isolation.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, int, Q};

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UPoly {
    #[serde(with = "rational::serde_vec_q")]
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Q::zero();
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&n| n >= dd) else {
            return (Self::zero(), self.clone());
        };
        let mut quot = vec![Q::zero(); nd - dd + 1];
        for k in (dd..=nd).rev() {
            let c = &rem[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] -= &c * b;
            }
            quot[k - dd] = c;
        }
        (Self::new(quot), Self::new(rem))
    }

    fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same real roots, all simple.
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Sign of the polynomial for all sufficiently large arguments.
    pub fn sign_at_infinity(&self) -> i8 {
        self.leading().map_or(0, sign_of)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            let body = match k {
                0 => rational::to_string(&a),
                _ => {
                    let var = if k == 1 { "t".to_string() } else { format!("t^{k}") };
                    if a.is_one() {
                        var
                    } else {
                        format!("{}*{var}", rational::to_string(&a))
                    }
                }
            };
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

pub fn sign_of(q: &Q) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm chain of the square-free part of a polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<UPoly>,
}

impl SturmChain {
    pub fn new(p: &UPoly) -> Self {
        let base = p.square_free();
        let mut chain = vec![base.clone()];
        if base.degree().unwrap_or(0) > 0 {
            chain.push(base.derivative());
            loop {
                let n = chain.len();
                let r = chain[n - 2].div_rem(&chain[n - 1]).1;
                if r.is_zero() {
                    break;
                }
                chain.push(r.scale(&-Q::one()));
            }
        }
        Self { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    /// Sign variations at `x`, zeros skipped.
    pub fn variations_at(&self, x: &Q) -> usize {
        Self::count_changes(self.chain.iter().map(|p| sign_of(&p.eval(x))))
    }

    pub fn variations_at_infinity(&self) -> usize {
        Self::count_changes(self.chain.iter().map(UPoly::sign_at_infinity))
    }

    pub fn variations(&self, x: Option<&Q>) -> usize {
        match x {
            Some(x) => self.variations_at(x),
            None => self.variations_at_infinity(),
        }
    }

    /// Number of distinct real roots in `(lo, hi]`, `hi = None` meaning `+inf`.
    pub fn count_roots(&self, lo: &Q, hi: Option<&Q>) -> usize {
        self.variations_at(lo).saturating_sub(self.variations(hi))
    }
}

/// Upper bound on the absolute value of every real root (Cauchy).
pub fn root_bound(p: &UPoly) -> Q {
    let Some(lead) = p.leading() else {
        return Q::one();
    };
    let lead = lead.abs();
    let max = p.coeffs[..p.coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(Q::zero(), |a, b| if b > a { b } else { a });
    max + Q::one()
}

/// Disjoint intervals `(a, b]`, each holding exactly one root of `p` in
/// `(lo, hi]`, each no wider than `width`.
pub fn isolate_roots(p: &UPoly, lo: &Q, hi: Option<&Q>, width: &Q) -> Vec<(Q, Q)> {
    if p.is_zero() {
        return Vec::new();
    }
    let chain = SturmChain::new(p);
    let bound = root_bound(p);
    let top = match hi {
        Some(h) if *h < bound => h.clone(),
        _ => bound,
    };
    if top <= *lo {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), top)];
    let two = int(2);
    while let Some((a, b)) = stack.pop() {
        let n = chain.variations_at(&a).saturating_sub(chain.variations_at(&b));
        if n == 0 {
            continue;
        }
        if n == 1 && &b - &a <= *width {
            out.push((a, b));
            continue;
        }
        let m = (&a + &b) / &two;
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out
}

/// Outcome of a sign query for a pure polynomial on an interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseCaseSign {
    Negative,
    Positive,
    /// The polynomial vanishes somewhere in the interval (or is zero).
    Undetermined {
        #[serde(with = "isolating")]
        roots: Vec<(Q, Q)>,
    },
}

mod isolating {
    use super::*;
    use serde::{de::Error as _, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[(Q, Q)], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<[String; 2]> = v
            .iter()
            .map(|(a, b)| [rational::to_string(a), rational::to_string(b)])
            .collect();
        serde::Serialize::serialize(&strings, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Q, Q)>, D::Error> {
        let strings: Vec<[String; 2]> = serde::Deserialize::deserialize(d)?;
        strings
            .into_iter()
            .map(|[a, b]| match (rational::parse(&a), rational::parse(&b)) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(D::Error::custom("bad isolating interval")),
            })
            .collect()
    }
}

/// Sign of `q` on `(lo, hi)`; `hi = None` is `+inf`.
///
/// The root count runs over `(lo, hi]`, so a root sitting exactly at a
/// finite `hi` also yields `Undetermined`.
pub fn sign_on(q: &UPoly, lo: &Q, hi: Option<&Q>) -> BaseCaseSign {
    if q.is_zero() {
        return BaseCaseSign::Undetermined { roots: Vec::new() };
    }
    let chain = SturmChain::new(q);
    if chain.count_roots(lo, hi) > 0 {
        let width = rational::frac(1, 1 << 20);
        return BaseCaseSign::Undetermined { roots: isolate_roots(q, lo, hi, &width) };
    }
    let sample = match hi {
        Some(h) => h.clone(),
        None => lo + Q::one(),
    };
    match sign_of(&q.eval(&sample)) {
        1 => BaseCaseSign::Positive,
        -1 => BaseCaseSign::Negative,
        _ => unreachable!("root-free interval sampled at a root"),
    }
}

/// Sign of a polynomial in `t` on `t in (lower, inf)`.
pub fn base_case_sign(q: &UPoly, lower: &Q) -> BaseCaseSign {
    sign_on(q, lower, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expineq::rational::frac;

    #[test]
    fn base_case_examples() {
        let one = int(1);
        assert_eq!(base_case_sign(&UPoly::from_ints(&[-1, 1]), &one), BaseCaseSign::Positive);

        // -t^2 + t + 1 has the golden ratio as a root.
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        match base_case_sign(&UPoly::from_ints(&[1, 1, -1]), &one) {
            BaseCaseSign::Undetermined { roots } => {
                assert_eq!(roots.len(), 1);
                let (a, b) = &roots[0];
                assert!(rational::to_f64(a) < golden && golden <= rational::to_f64(b));
            }
            other => panic!("expected Undetermined, got {other:?}"),
        }

        let cubic = UPoly::from_ints(&[0, -3, 0, 1]);
        assert_eq!(base_case_sign(&cubic, &frac(9, 5)), BaseCaseSign::Positive);
        match base_case_sign(&cubic, &one) {
            BaseCaseSign::Undetermined { roots } => {
                assert_eq!(roots.len(), 1);
                let s3 = 3f64.sqrt();
                assert!(rational::to_f64(&roots[0].0) < s3 && s3 <= rational::to_f64(&roots[0].1));
            }
            other => panic!("expected Undetermined, got {other:?}"),
        }
    }

    #[test]
    fn repeated_roots_count_once() {
        // (t - 2)^2 (t - 3)
        let p = UPoly::from_ints(&[-2, 1])
            .mul(&UPoly::from_ints(&[-2, 1]))
            .mul(&UPoly::from_ints(&[-3, 1]));
        let chain = SturmChain::new(&p);
        assert_eq!(chain.count_roots(&int(0), None), 2);
        assert_eq!(chain.count_roots(&int(2), None), 1);
        assert_eq!(chain.count_roots(&int(1), Some(&int(2))), 1);
        // A double root is still a zero of the strict sign claim.
        assert!(matches!(base_case_sign(&p, &int(1)), BaseCaseSign::Undetermined { .. }));
    }

    #[test]
    fn root_at_lower_endpoint_is_excluded() {
        let p = UPoly::from_ints(&[-1, 1]);
        assert_eq!(sign_on(&p, &int(1), Some(&int(4))), BaseCaseSign::Positive);
        assert!(matches!(sign_on(&p, &int(0), Some(&int(1))), BaseCaseSign::Undetermined { .. }));
    }

    #[test]
    fn division_identity() {
        let a = UPoly::from_ints(&[5, -3, 0, 2, 7]);
        let b = UPoly::from_ints(&[1, 0, 3]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
        assert_eq!(a.gcd(&a), a.monic());
    }
}
