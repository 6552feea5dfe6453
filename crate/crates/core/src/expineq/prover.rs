//! Sign decision for exp-polynomials on `w > 0` by degree reduction.
//!
//! To show `P(w, e^w)` has the sign `s` on an interval `(a, b)`, write
//! `P = A_n(t) w^n + ...` and look at `delta = P / A_n`. Where `A_n` keeps a
//! constant sign `sigma`, `A_n^2 delta' = A_n P' - P A_n'` is again an
//! exp-polynomial, of `w`-degree at most `n - 1`. If that derivative has
//! the sign `s·sigma` on `(a, b)` and `delta` starts out with that same sign
//! at `a+`, then `delta` moves monotonically away from zero and `P` keeps
//! the sign `s` on all of `(a, b)`. Recursing bottoms out at `n = 0`, a
//! polynomial in `t` alone, whose sign is settled by Sturm root counting.
//!
//! The leading coefficient often changes sign somewhere in `t > 1`; the
//! interval is then split, and pieces that stay away from `w = 0` and where
//! the reduction does not apply are closed by an exact rational enclosure.
//! Every certificate is a tree of such steps and can be replayed exactly.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::expbound::exp_bounds;
use super::poly::ExpPoly;
use super::rational::{self, int, Q};
use super::upoly::{sign_of, SturmChain, UPoly};
use crate::error::Error;

/// Precision of the `e^a` bounds that turn a `w`-interval into a `t`-interval.
const T_BITS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn from_i8(s: i8) -> Option<Self> {
        match s {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "negative",
            Sign::Positive => "positive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundarySign {
    Negative,
    Zero,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverConfig {
    /// Cap on nested reductions plus splits along any branch.
    pub max_depth: u32,
    /// Highest derivative order tried when a value at `w = 0` vanishes.
    pub boundary_depth: u32,
    /// Allow interval splitting and enclosures; without it only the plain
    /// degree-reduction chain on `(0, inf)` is attempted.
    pub split: bool,
    pub point_bits: u32,
    pub max_point_bits: u32,
}

impl Default for ProverConfig {
    fn default() -> Self {
        Self { max_depth: 32, boundary_depth: 16, split: true, point_bits: 64, max_point_bits: 4096 }
    }
}

/// Sign of `P(w, e^w)` just to the right of `w = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryProbe {
    pub sign: BoundarySign,
    /// Order of the first non-vanishing derivative, or the depth reached.
    pub order: u32,
    /// Value of that derivative at `w = 0` (zero when exhausted).
    #[serde(with = "rational::serde_q")]
    pub value: Q,
}

/// Repeatedly differentiates until a derivative is nonzero at the origin.
/// Its sign is the sign of `P` on some interval `(0, eps)`.
pub fn boundary_sign_at_zero(p: &ExpPoly, max_order: u32) -> BoundaryProbe {
    let mut cur = p.clone();
    for order in 0..=max_order {
        let value = cur.value_at_origin();
        let sign = match sign_of(&value) {
            1 => BoundarySign::Positive,
            -1 => BoundarySign::Negative,
            _ => {
                cur = cur.derivative();
                continue;
            }
        };
        return BoundaryProbe { sign, order, value };
    }
    BoundaryProbe { sign: BoundarySign::Zero, order: max_order, value: Q::zero() }
}

/// Open interval `(lo, hi)` of `w`, `hi = None` meaning `+inf`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    #[serde(with = "rational::serde_q")]
    pub lo: Q,
    #[serde(with = "rational::serde_opt_q")]
    pub hi: Option<Q>,
}

impl Domain {
    pub fn positive_axis() -> Self {
        Self { lo: Q::zero(), hi: None }
    }

    pub fn new(lo: Q, hi: Option<Q>) -> Self {
        assert!(!lo.is_negative(), "domains live in w >= 0");
        if let Some(h) = &hi {
            assert!(*h > lo, "empty domain");
        }
        Self { lo, hi }
    }

    /// A `t`-interval `(t_lo, t_hi]` containing `e^w` for every `w` here.
    fn t_range(&self) -> (Q, Option<Q>) {
        let lo = if self.lo.is_zero() { int(1) } else { exp_bounds(&self.lo, T_BITS).0 };
        let hi = self.hi.as_ref().map(|h| exp_bounds(h, T_BITS).1);
        (lo, hi)
    }

    fn split_point(&self) -> Q {
        match &self.hi {
            Some(h) => (&self.lo + h) / int(2),
            None if self.lo.is_zero() => int(1),
            None => &self.lo * int(2),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.hi {
            Some(h) => write!(f, "({}, {})", rational::to_string(&self.lo), rational::to_string(h)),
            None => write!(f, "({}, inf)", rational::to_string(&self.lo)),
        }
    }
}

/// Exact enclosure of `P(at, e^at)` using `e^at` bounds at `bits` precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEnclosure {
    #[serde(with = "rational::serde_q")]
    pub at: Q,
    pub bits: u32,
    #[serde(with = "rational::serde_q")]
    pub lo: Q,
    #[serde(with = "rational::serde_q")]
    pub hi: Q,
}

impl PointEnclosure {
    pub fn compute(p: &ExpPoly, at: &Q, bits: u32) -> Self {
        let (t_lo, t_hi) = exp_bounds(at, bits);
        let (lo, hi) = enclose_upoly(&p.at_w(at), &t_lo, &t_hi);
        Self { at: at.clone(), bits, lo, hi }
    }

    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

/// Range of `sum a_k t^k` over `t in [t_lo, t_hi]`, `t_lo > 0`.
fn enclose_upoly(q: &UPoly, t_lo: &Q, t_hi: &Q) -> (Q, Q) {
    let (mut lo, mut hi) = (Q::zero(), Q::zero());
    let (mut plo, mut phi) = (int(1), int(1));
    for c in q.coeffs() {
        if c.is_positive() {
            lo += c * &plo;
            hi += c * &phi;
        } else {
            lo += c * &phi;
            hi += c * &plo;
        }
        plo *= t_lo;
        phi *= t_hi;
    }
    (lo, hi)
}

fn point_sign(p: &ExpPoly, at: &Q, cfg: &ProverConfig) -> Option<PointEnclosure> {
    let mut bits = cfg.point_bits.max(16);
    loop {
        let enc = PointEnclosure::compute(p, at, bits);
        if enc.sign().is_some() {
            return Some(enc);
        }
        if bits >= cfg.max_point_bits {
            return None;
        }
        bits *= 2;
    }
}

/// How the sign at the left end of a domain was established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeftBoundary {
    /// Left end is `w = 0`: first nonzero derivative there.
    Taylor {
        order: u32,
        #[serde(with = "rational::serde_q")]
        value: Q,
    },
    /// Left end `a > 0`: enclosure of `P(a, e^a)`.
    Point(PointEnclosure),
}

impl LeftBoundary {
    fn sign(&self) -> Option<Sign> {
        match self {
            LeftBoundary::Taylor { value, .. } => Sign::from_i8(sign_of(value)),
            LeftBoundary::Point(p) => p.sign(),
        }
    }
}

/// A polynomial in `t` with no root in `(t_lo, t_hi]`, by Sturm counting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootFreeRecord {
    pub poly: UPoly,
    #[serde(with = "rational::serde_q")]
    pub t_lo: Q,
    #[serde(with = "rational::serde_opt_q")]
    pub t_hi: Option<Q>,
    pub chain_len: usize,
    pub variations_lo: usize,
    pub variations_hi: usize,
    pub sign: Sign,
}

impl RootFreeRecord {
    fn compute(q: &UPoly, t_lo: &Q, t_hi: Option<&Q>) -> Result<Self, Vec<(Q, Q)>> {
        if q.is_zero() {
            return Err(Vec::new());
        }
        let chain = SturmChain::new(q);
        let variations_lo = chain.variations_at(t_lo);
        let variations_hi = chain.variations(t_hi);
        if variations_lo != variations_hi {
            let width = rational::frac(1, 1 << 16);
            return Err(super::upoly::isolate_roots(q, t_lo, t_hi, &width));
        }
        let sample = match t_hi {
            Some(h) => h.clone(),
            None => t_lo + int(1),
        };
        let sign = Sign::from_i8(sign_of(&q.eval(&sample))).expect("root-free sample is nonzero");
        Ok(Self {
            poly: q.clone(),
            t_lo: t_lo.clone(),
            t_hi: t_hi.cloned(),
            chain_len: chain.len(),
            variations_lo,
            variations_hi,
            sign,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRecord {
    /// Sign of the leading `w`-coefficient over the domain.
    pub leading: RootFreeRecord,
    /// Certificate for `normalize(A_n P' - P A_n')`; `None` when it vanishes
    /// identically (then `P / A_n` is constant).
    pub derivative: Option<SignCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnclosureRecord {
    #[serde(with = "rational::serde_q")]
    pub t_lo: Q,
    #[serde(with = "rational::serde_q")]
    pub t_hi: Q,
    #[serde(with = "rational::serde_q")]
    pub lo: Q,
    #[serde(with = "rational::serde_q")]
    pub hi: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub point: PointEnclosure,
    pub left: SignCertificate,
    pub right: SignCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Proof {
    /// `w`-degree 0: root-free polynomial in `t`.
    RootFree(RootFreeRecord),
    Reduction(Box<ReductionRecord>),
    Enclosure(EnclosureRecord),
    Split(Box<SplitRecord>),
}

/// `poly` has the strict sign `claim` on every `w` in `domain`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCertificate {
    pub claim: Sign,
    pub domain: Domain,
    pub poly: ExpPoly,
    pub left: LeftBoundary,
    pub proof: Proof,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum UndeterminedReason {
    ZeroPolynomial,
    /// Every derivative up to `order` vanishes at `w = 0`.
    BoundaryExhausted { order: u32 },
    /// `P(a, e^a)` could not be separated from zero.
    BoundaryPointUnresolved {
        #[serde(with = "rational::serde_q")]
        at: Q,
    },
    /// The leading `w`-coefficient has roots in the `t`-range.
    LeadingCoefficientSignChange {
        leading: UPoly,
        #[serde(with = "root_list")]
        roots: Vec<(Q, Q)>,
    },
    /// The polynomial in `t` has roots in the `t`-range.
    BaseCaseRoots {
        poly: UPoly,
        #[serde(with = "root_list")]
        roots: Vec<(Q, Q)>,
    },
    /// The left-end sign differs from the sign the caller needs.
    SignMismatch { required: Sign, found: Sign },
    DepthExhausted { depth: u32 },
}

mod root_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[(Q, Q)], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<[String; 2]> =
            v.iter().map(|(a, b)| [rational::to_string(a), rational::to_string(b)]).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Q, Q)>, D::Error> {
        use serde::de::Error as _;
        Vec::<[String; 2]>::deserialize(d)?
            .into_iter()
            .map(|[a, b]| {
                Ok((
                    rational::parse(&a).ok_or_else(|| D::Error::custom("bad rational"))?,
                    rational::parse(&b).ok_or_else(|| D::Error::custom("bad rational"))?,
                ))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Undetermined {
    pub domain: Domain,
    pub reason: UndeterminedReason,
}

impl fmt::Display for Undetermined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "undetermined on {}: ", self.domain)?;
        match &self.reason {
            UndeterminedReason::ZeroPolynomial => write!(f, "zero polynomial"),
            UndeterminedReason::BoundaryExhausted { order } => {
                write!(f, "all derivatives up to order {order} vanish at w = 0")
            }
            UndeterminedReason::BoundaryPointUnresolved { at } => {
                write!(f, "value at w = {} not separated from 0", rational::to_string(at))
            }
            UndeterminedReason::LeadingCoefficientSignChange { leading, roots } => {
                write!(f, "leading coefficient {leading} has {} root(s) with t > 1", roots.len())
            }
            UndeterminedReason::BaseCaseRoots { poly, roots } => {
                write!(f, "{poly} has {} root(s) in range", roots.len())
            }
            UndeterminedReason::SignMismatch { required, found } => {
                write!(f, "needed {required} at the left end, found {found}")
            }
            UndeterminedReason::DepthExhausted { depth } => write!(f, "depth cap {depth} reached"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Certified(SignCertificate),
    Undetermined(Undetermined),
}

impl Decision {
    pub fn certificate(&self) -> Option<&SignCertificate> {
        match self {
            Decision::Certified(c) => Some(c),
            Decision::Undetermined(_) => None,
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        self.certificate().map(|c| c.claim)
    }
}

/// `A_n P' - P A_n'`, the numerator of `(P / A_n)'` times `A_n^2 / A_n`.
pub fn reduced_derivative(p: &ExpPoly) -> ExpPoly {
    let lead = ExpPoly::from_upoly(&p.leading_w_coefficient());
    &(&lead * &p.derivative()) - &(p * &lead.derivative())
}

fn undetermined(domain: &Domain, reason: UndeterminedReason) -> Undetermined {
    Undetermined { domain: domain.clone(), reason }
}

fn left_boundary(p: &ExpPoly, dom: &Domain, cfg: &ProverConfig) -> Result<(LeftBoundary, Sign), Undetermined> {
    if dom.lo.is_zero() {
        let probe = boundary_sign_at_zero(p, cfg.boundary_depth);
        match Sign::from_i8(sign_of(&probe.value)) {
            Some(s) => Ok((LeftBoundary::Taylor { order: probe.order, value: probe.value }, s)),
            None => Err(undetermined(dom, UndeterminedReason::BoundaryExhausted { order: probe.order })),
        }
    } else {
        match point_sign(p, &dom.lo, cfg) {
            Some(enc) => {
                let s = enc.sign().unwrap();
                Ok((LeftBoundary::Point(enc), s))
            }
            None => Err(undetermined(dom, UndeterminedReason::BoundaryPointUnresolved { at: dom.lo.clone() })),
        }
    }
}

fn enclose_box(p: &ExpPoly, dom: &Domain, t_lo: &Q, t_hi: &Q) -> EnclosureRecord {
    let hi_w = dom.hi.as_ref().expect("bounded domain");
    let (mut lo, mut hi) = (Q::zero(), Q::zero());
    for (i, k, c) in p.terms() {
        let k = k as usize;
        let i = i as usize;
        let small = num_traits::pow(dom.lo.clone(), i) * num_traits::pow(t_lo.clone(), k);
        let big = num_traits::pow(hi_w.clone(), i) * num_traits::pow(t_hi.clone(), k);
        if c.is_positive() {
            lo += c * small;
            hi += c * big;
        } else {
            lo += c * big;
            hi += c * small;
        }
    }
    EnclosureRecord { t_lo: t_lo.clone(), t_hi: t_hi.clone(), lo, hi }
}

fn enclosure_sign(e: &EnclosureRecord) -> Option<Sign> {
    if e.lo.is_positive() {
        Some(Sign::Positive)
    } else if e.hi.is_negative() {
        Some(Sign::Negative)
    } else {
        None
    }
}

fn prove(
    p: &ExpPoly,
    dom: &Domain,
    required: Option<Sign>,
    depth: u32,
    cfg: &ProverConfig,
) -> Result<SignCertificate, Undetermined> {
    let (left, claim) = left_boundary(p, dom, cfg)?;
    if let Some(req) = required {
        if req != claim {
            return Err(undetermined(dom, UndeterminedReason::SignMismatch { required: req, found: claim }));
        }
    }
    let cert = |proof| SignCertificate { claim, domain: dom.clone(), poly: p.clone(), left: left.clone(), proof };
    let (t_lo, t_hi) = dom.t_range();
    let n = p.w_degree().expect("nonzero polynomial");

    let failure = if n == 0 {
        match RootFreeRecord::compute(&p.w_coefficient(0), &t_lo, t_hi.as_ref()) {
            Ok(rec) => {
                debug_assert_eq!(rec.sign, claim);
                return Ok(cert(Proof::RootFree(rec)));
            }
            Err(roots) => undetermined(dom, UndeterminedReason::BaseCaseRoots { poly: p.w_coefficient(0), roots }),
        }
    } else {
        let lead = p.leading_w_coefficient();
        match RootFreeRecord::compute(&lead, &t_lo, t_hi.as_ref()) {
            Ok(rec) => {
                let q = reduced_derivative(p);
                if q.is_zero() {
                    return Ok(cert(Proof::Reduction(Box::new(ReductionRecord { leading: rec, derivative: None }))));
                }
                let q = q.normalize().expect("nonzero");
                if depth >= cfg.max_depth {
                    return Err(undetermined(dom, UndeterminedReason::DepthExhausted { depth }));
                }
                match prove(&q, dom, Some(claim.times(rec.sign)), depth + 1, cfg) {
                    Ok(sub) => {
                        return Ok(cert(Proof::Reduction(Box::new(ReductionRecord {
                            leading: rec,
                            derivative: Some(sub),
                        }))))
                    }
                    Err(e) => e,
                }
            }
            Err(roots) => undetermined(dom, UndeterminedReason::LeadingCoefficientSignChange { leading: lead, roots }),
        }
    };
    if !cfg.split {
        return Err(failure);
    }

    if let Some(t_hi) = &t_hi {
        let enc = enclose_box(p, dom, &t_lo, t_hi);
        if enclosure_sign(&enc) == Some(claim) {
            return Ok(cert(Proof::Enclosure(enc)));
        }
    }

    if depth >= cfg.max_depth {
        return Err(undetermined(dom, UndeterminedReason::DepthExhausted { depth }));
    }
    let m = dom.split_point();
    let Some(point) = point_sign(p, &m, cfg) else {
        return Err(undetermined(dom, UndeterminedReason::BoundaryPointUnresolved { at: m }));
    };
    let at_m = point.sign().unwrap();
    if at_m != claim {
        return Err(undetermined(dom, UndeterminedReason::SignMismatch { required: claim, found: at_m }));
    }
    let left_dom = Domain::new(dom.lo.clone(), Some(m.clone()));
    let right_dom = Domain::new(m, dom.hi.clone());
    let left_cert = prove(p, &left_dom, Some(claim), depth + 1, cfg)?;
    let right_cert = prove(p, &right_dom, Some(claim), depth + 1, cfg)?;
    Ok(cert(Proof::Split(Box::new(SplitRecord { point, left: left_cert, right: right_cert }))))
}

/// Decides the sign of `P(w, e^w)` on `w in (0, inf)`.
///
/// Never claims a sign it cannot certify; anything unresolved comes back
/// as [`Decision::Undetermined`] with the first blocking reason.
pub fn decide_sign(p: &ExpPoly, cfg: &ProverConfig) -> Decision {
    decide_sign_on(p, &Domain::positive_axis(), cfg)
}

pub fn decide_sign_on(p: &ExpPoly, dom: &Domain, cfg: &ProverConfig) -> Decision {
    let normal = match p.normalize() {
        Ok(n) => n,
        Err(_) => return Decision::Undetermined(undetermined(dom, UndeterminedReason::ZeroPolynomial)),
    };
    match prove(&normal, dom, None, 0, cfg) {
        Ok(c) => Decision::Certified(c),
        Err(u) => Decision::Undetermined(u),
    }
}

/// Failure while re-checking a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayError {
    pub domain: String,
    pub message: String,
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "replay failed on {}: {}", self.domain, self.message)
    }
}

impl std::error::Error for ReplayError {}

impl SignCertificate {
    /// Re-derives every stored quantity from the stored expressions and
    /// checks it against the record.
    pub fn replay(&self) -> Result<(), ReplayError> {
        let fail = |message: String| ReplayError { domain: self.domain.to_string(), message };
        if self.domain.lo.is_negative() || self.domain.hi.as_ref().is_some_and(|h| *h <= self.domain.lo) {
            return Err(fail("malformed domain".into()));
        }
        if !self.poly.is_normalized() {
            return Err(fail("polynomial is not in normal form".into()));
        }
        match &self.left {
            LeftBoundary::Taylor { order, value } => {
                if !self.domain.lo.is_zero() {
                    return Err(fail("Taylor boundary away from w = 0".into()));
                }
                let probe = boundary_sign_at_zero(&self.poly, *order);
                if probe.order != *order || &probe.value != value {
                    return Err(fail("boundary derivative does not reproduce".into()));
                }
            }
            LeftBoundary::Point(enc) => {
                if enc.at != self.domain.lo {
                    return Err(fail("point boundary not at the left end".into()));
                }
                if &PointEnclosure::compute(&self.poly, &enc.at, enc.bits) != enc {
                    return Err(fail("boundary enclosure does not reproduce".into()));
                }
            }
        }
        if self.left.sign() != Some(self.claim) {
            return Err(fail("claim differs from left-end sign".into()));
        }
        let (t_lo, t_hi) = self.domain.t_range();
        let n = self.poly.w_degree().ok_or_else(|| fail("zero polynomial".into()))?;
        match &self.proof {
            Proof::RootFree(rec) => {
                if n != 0 {
                    return Err(fail("root-free base case on a polynomial with w".into()));
                }
                check_root_free(rec, &self.poly.w_coefficient(0), &t_lo, t_hi.as_ref()).map_err(fail)?;
                if rec.sign != self.claim {
                    return Err(fail("base-case sign differs from claim".into()));
                }
            }
            Proof::Reduction(red) => {
                if n == 0 {
                    return Err(fail("reduction on a polynomial in t only".into()));
                }
                check_root_free(&red.leading, &self.poly.leading_w_coefficient(), &t_lo, t_hi.as_ref())
                    .map_err(fail)?;
                let q = reduced_derivative(&self.poly);
                match &red.derivative {
                    None if q.is_zero() => {}
                    None => return Err(fail("derivative omitted but nonzero".into())),
                    Some(sub) => {
                        let qn = q.normalize().map_err(|_| fail("derivative vanishes".into()))?;
                        if sub.poly != qn {
                            return Err(fail("stored derivative does not reproduce".into()));
                        }
                        if sub.domain != self.domain {
                            return Err(fail("derivative certified on another domain".into()));
                        }
                        if sub.claim != self.claim.times(red.leading.sign) {
                            return Err(fail("derivative sign does not force the claim".into()));
                        }
                        sub.replay()?;
                    }
                }
            }
            Proof::Enclosure(enc) => {
                let Some(t_hi) = &t_hi else {
                    return Err(fail("enclosure on an unbounded domain".into()));
                };
                let again = enclose_box(&self.poly, &self.domain, &t_lo, t_hi);
                if &again != enc {
                    return Err(fail("enclosure does not reproduce".into()));
                }
                if enclosure_sign(enc) != Some(self.claim) {
                    return Err(fail("enclosure does not exclude zero".into()));
                }
            }
            Proof::Split(split) => {
                let m = &split.point.at;
                let inside = *m > self.domain.lo && self.domain.hi.as_ref().is_none_or(|h| m < h);
                if !inside {
                    return Err(fail("split point outside the domain".into()));
                }
                if PointEnclosure::compute(&self.poly, m, split.point.bits) != split.point {
                    return Err(fail("split-point enclosure does not reproduce".into()));
                }
                if split.point.sign() != Some(self.claim) {
                    return Err(fail("split-point sign differs from claim".into()));
                }
                let want_left = Domain { lo: self.domain.lo.clone(), hi: Some(m.clone()) };
                let want_right = Domain { lo: m.clone(), hi: self.domain.hi.clone() };
                for (child, want) in [(&split.left, want_left), (&split.right, want_right)] {
                    if child.domain != want || child.poly != self.poly || child.claim != self.claim {
                        return Err(fail("split children do not tile the domain".into()));
                    }
                    child.replay()?;
                }
            }
        }
        Ok(())
    }

    /// The chain of reduction steps taken directly from the root, each
    /// entry certifying the derivative of the one before.
    pub fn reduction_chain(&self) -> Vec<&SignCertificate> {
        let mut out = vec![self];
        let mut cur = self;
        while let Proof::Reduction(red) = &cur.proof {
            match &red.derivative {
                Some(sub) => {
                    out.push(sub);
                    cur = sub;
                }
                None => break,
            }
        }
        out
    }

    /// Number of nodes in the certificate tree.
    pub fn size(&self) -> usize {
        1 + match &self.proof {
            Proof::RootFree(_) | Proof::Enclosure(_) => 0,
            Proof::Reduction(r) => r.derivative.as_ref().map_or(0, SignCertificate::size),
            Proof::Split(s) => s.left.size() + s.right.size(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }
}

fn check_root_free(rec: &RootFreeRecord, expected: &UPoly, t_lo: &Q, t_hi: Option<&Q>) -> Result<(), String> {
    if &rec.poly != expected {
        return Err("root-free record is about a different polynomial".into());
    }
    if &rec.t_lo != t_lo || rec.t_hi.as_ref() != t_hi {
        return Err("root-free record uses a different t-range".into());
    }
    match RootFreeRecord::compute(expected, t_lo, t_hi) {
        Ok(again) if &again == rec => Ok(()),
        Ok(_) => Err("Sturm data does not reproduce".into()),
        Err(_) => Err("polynomial has roots in the t-range".into()),
    }
}
