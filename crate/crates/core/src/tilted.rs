//! Winsorized-tilted means, the two bound factors, and the symmetrized
//! expressions `f_j`, `g_j`, `d` used to reduce the symmetric bound to a
//! pointwise inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Tilt rate `h` and Winsorization level `w`, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltParams {
    h: f64,
    w: f64,
}

impl TiltParams {
    pub fn new(h: f64, w: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParams(format!("h must be finite and > 0, got {h}")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParams(format!("w must be finite and > 0, got {w}")));
        }
        Ok(Self { h, w })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// The product `hw`, on which both bound factors depend (up to `1/w`).
    pub fn hw(&self) -> f64 {
        self.h * self.w
    }
}

#[derive(Deserialize)]
struct RawAtoms {
    atoms: Vec<(f64, f64)>,
}

/// A finite symmetric law given by its nonnegative support points.
///
/// An atom `(x, p)` with `x > 0` puts mass `p/2` at each of `+x` and `-x`;
/// an atom at `x = 0` puts all of `p` at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAtoms")]
pub struct SymmetricDiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<RawAtoms> for SymmetricDiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawAtoms) -> Result<Self> {
        Self::new(raw.atoms)
    }
}

impl SymmetricDiscreteDistribution {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let mut total = 0.0;
        for (i, &(x, p)) in atoms.iter().enumerate() {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {i}: position must be finite and >= 0, got {x}"
                )));
            }
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {i}: probability must lie in [0, 1], got {p}"
                )));
            }
            if i > 0 && atoms[i - 1].0 >= x {
                return Err(Error::InvalidDistribution(format!(
                    "atom positions must be strictly increasing (atom {i})"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Reads the `{"atoms": [[x, p], ...]}` JSON form.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("atoms serialize")
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `E X^2 = sum p_i x_i^2`.
    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|&(x, p)| p * x * x).sum()
    }

    /// The law as a list of signed support points with their masses.
    pub fn signed_atoms(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(2 * self.atoms.len());
        for &(x, p) in self.atoms.iter().rev() {
            if x > 0.0 {
                out.push((-x, p / 2.0));
            }
        }
        for &(x, p) in &self.atoms {
            if x > 0.0 {
                out.push((x, p / 2.0));
            } else {
                out.push((0.0, p));
            }
        }
        out
    }

    /// Law of `cX` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParams(format!("scale must be > 0, got {c}")));
        }
        Self::new(self.atoms.iter().map(|&(x, p)| (c * x, p)).collect())
    }
}

/// A finite, not necessarily symmetric, law on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let mut total = 0.0;
        for &(x, p) in &atoms {
            if !x.is_finite() || !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidDistribution(format!("bad atom ({x}, {p})")));
            }
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, p)| p * x).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|&(x, p)| p * x * x).sum()
    }

    /// `E_{h,w} X` for an arbitrary finite law.
    pub fn tilted_mean(&self, p: TiltParams) -> f64 {
        let shift = self
            .atoms
            .iter()
            .map(|&(x, _)| p.h * winsorize(x, p.w))
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for &(x, mass) in &self.atoms {
            let weight = mass * (p.h * winsorize(x, p.w) - shift).exp();
            num += x * weight;
            den += weight;
        }
        num / den
    }
}

impl From<&SymmetricDiscreteDistribution> for DiscreteDistribution {
    fn from(d: &SymmetricDiscreteDistribution) -> Self {
        Self { atoms: d.signed_atoms() }
    }
}

/// `x ∧ w`.
pub fn winsorize(x: f64, w: f64) -> f64 {
    x.min(w)
}

/// Winsorized-tilted mean `E X e^{h(X∧w)} / E e^{h(X∧w)}`.
///
/// Each `±x` pair is summed as `x e^{-hx} expm1(h(x∧w) + hx)`, so the
/// numerator never suffers cancellation and is positive whenever some
/// `x_i > 0` carries mass.
pub fn tilted_mean(dist: &SymmetricDiscreteDistribution, p: TiltParams) -> f64 {
    let (h, w) = (p.h, p.w);
    let shift = dist
        .atoms
        .iter()
        .map(|&(x, _)| h * winsorize(x, w))
        .fold(0.0, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, mass) in &dist.atoms {
        if x == 0.0 {
            den += mass * (-shift).exp();
            continue;
        }
        let up = h * winsorize(x, w);
        let down = h * x;
        let low = (-down - shift).exp();
        num += 0.5 * mass * x * low * (up + down).exp_m1();
        den += 0.5 * mass * ((up - shift).exp() + low);
    }
    num / den
}

/// `E_{b,w} X - E_{a,w} X` for tilts `a < b`.
///
/// Written as `sum_{i<j} p_i p_j (x_j - x_i) e^{a c_j + b c_i} expm1((b-a)(c_j - c_i))`
/// over `D_a D_b`, with `c = x ∧ w`. Every term is nonnegative, so the
/// result stays positive where the two means agree to all printed digits.
pub fn tilted_mean_increment(dist: &SymmetricDiscreteDistribution, w: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > a && w > 0.0 && b.is_finite() && w.is_finite()) {
        return Err(Error::InvalidParams(format!("need 0 < a < b and w > 0, got a = {a}, b = {b}, w = {w}")));
    }
    let atoms = dist.signed_atoms();
    let c: Vec<f64> = atoms.iter().map(|&(x, _)| winsorize(x, w)).collect();
    let m = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
    for (i, &(xi, pi)) in atoms.iter().enumerate() {
        da += pi * (a * (c[i] - m)).exp();
        db += pi * (b * (c[i] - m)).exp();
        for (j, &(xj, pj)) in atoms.iter().enumerate().skip(i + 1) {
            let e = (a * (c[j] - m) + b * (c[i] - m)).exp();
            num += pi * pj * (xj - xi) * e * ((b - a) * (c[j] - c[i])).exp_m1();
        }
    }
    Ok(num / (da * db))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorKind {
    /// `sinh(hw)/w`, sharp over symmetric laws.
    Symmetric,
    /// `(e^{hw} - 1)/w`, sharp over zero-mean laws.
    ZeroMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundFactor {
    pub kind: FactorKind,
    pub value: f64,
}

pub fn bound_factor(kind: FactorKind, p: TiltParams) -> BoundFactor {
    let value = match kind {
        FactorKind::Symmetric => p.hw().sinh() / p.w,
        FactorKind::ZeroMean => p.hw().exp_m1() / p.w,
    };
    BoundFactor { kind, value }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mean: f64,
    pub second_moment: f64,
    pub factor: f64,
    pub bound: f64,
    pub margin: f64,
    /// `0 < mean < bound`, each side with slack [`FLOAT_SLACK`].
    pub holds: bool,
}

/// Absolute slack used for every strict inequality checked in floating point.
pub const FLOAT_SLACK: f64 = 1e-12;

/// Compares the tilted mean of a symmetric law against `sinh(hw)/w · E X^2`.
pub fn check_bound(dist: &SymmetricDiscreteDistribution, p: TiltParams) -> Result<BoundReport> {
    let second_moment = dist.second_moment();
    if second_moment <= 0.0 {
        return Err(Error::Degenerate("E X^2 = 0; need E X^2 in (0, inf)".into()));
    }
    let mean = tilted_mean(dist, p);
    let factor = bound_factor(FactorKind::Symmetric, p).value;
    let bound = factor * second_moment;
    let margin = bound - mean;
    Ok(BoundReport {
        mean,
        second_moment,
        factor,
        bound,
        margin,
        holds: mean > -FLOAT_SLACK && margin > -FLOAT_SLACK,
    })
}

/// `g_j(x) = (f_j(x) + f_j(-x))/2` with `f_j(x) = x^j e^{x∧w}` at `h = 1`.
pub fn g_expr(j: u8, x: f64, w: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeArgument(x));
    }
    if !(w > 0.0) {
        return Err(Error::InvalidParams(format!("w must be > 0, got {w}")));
    }
    match j {
        0 | 1 => Ok(g_unchecked(j, x, w)),
        _ => Err(Error::InvalidParams(format!("j must be 0 or 1, got {j}"))),
    }
}

fn g_unchecked(j: u8, x: f64, w: f64) -> f64 {
    let pos = winsorize(x, w).exp();
    let neg = (-x).exp();
    if j == 0 {
        0.5 * (pos + neg)
    } else {
        0.5 * x * (pos - neg)
    }
}

/// `d(u, v, w) = 2[g_1(u) + g_1(v) - (sinh w / w)(g_0(u) v^2 + g_0(v) u^2)]`.
///
/// Defined for `u, v >= 0`, `w > 0`; the edges `u = 0` or `v = 0` give the
/// continuous limit.
pub fn d_expr(u: f64, v: f64, w: f64) -> f64 {
    debug_assert!(u >= 0.0 && v >= 0.0 && w > 0.0);
    let s = w.sinh() / w;
    2.0 * (g_unchecked(1, u, w) + g_unchecked(1, v, w)
        - s * (g_unchecked(0, u, w) * v * v + g_unchecked(0, v, w) * u * u))
}

/// Exact evaluation of tilted moments with the exponentials kept symbolic.
pub mod exact {
    use std::collections::BTreeMap;

    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    /// A finite sum `sum_a c_a e^a` with rational exponents and coefficients.
    #[derive(Debug, Clone, Default, PartialEq, Eq)]
    pub struct ExpSum(BTreeMap<BigRational, BigRational>);

    impl ExpSum {
        pub fn add_term(&mut self, exponent: BigRational, coeff: BigRational) {
            if coeff.is_zero() {
                return;
            }
            let entry = self.0.entry(exponent.clone()).or_insert_with(BigRational::zero);
            *entry += coeff;
            if entry.is_zero() {
                self.0.remove(&exponent);
            }
        }

        pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &BigRational)> {
            self.0.iter()
        }

        pub fn is_zero(&self) -> bool {
            self.0.is_empty()
        }
    }

    fn pow(x: &BigRational, j: u8) -> BigRational {
        if j == 0 {
            BigRational::one()
        } else {
            x.clone()
        }
    }

    /// `E X^j e^{h(X∧w)}` summed over the signed atoms of the symmetric law
    /// whose `|X|` atoms are `abs_atoms`.
    pub fn signed_moment(
        abs_atoms: &[(BigRational, BigRational)],
        h: &BigRational,
        w: &BigRational,
        j: u8,
    ) -> ExpSum {
        let half = BigRational::new(1.into(), 2.into());
        let mut sum = ExpSum::default();
        for (x, p) in abs_atoms {
            if x.is_zero() {
                sum.add_term(BigRational::zero(), p * pow(x, j));
                continue;
            }
            let xs = [x.clone(), -x.clone()];
            for s in xs {
                let capped = if &s < w { s.clone() } else { w.clone() };
                sum.add_term(h * capped, &half * p * pow(&s, j));
            }
        }
        sum
    }

    /// `E g_j(|X|)` with `g_j` at tilt `h`, summed over the `|X|` atoms.
    pub fn symmetrized_moment(
        abs_atoms: &[(BigRational, BigRational)],
        h: &BigRational,
        w: &BigRational,
        j: u8,
    ) -> ExpSum {
        let half = BigRational::new(1.into(), 2.into());
        let mut sum = ExpSum::default();
        for (x, p) in abs_atoms {
            debug_assert!(!x.is_negative());
            let capped = if x < w { x.clone() } else { w.clone() };
            // f_j(x) and f_j(-x); -x <= 0 < w so -x ∧ w = -x.
            sum.add_term(h * capped, &half * p * pow(x, j));
            let neg = -x.clone();
            sum.add_term(h * neg.clone(), &half * p * pow(&neg, j));
        }
        sum
    }
}
