use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boxes::{BoxRegion, Case, Var};
use super::catalog::{case3_dw_d, ProofExpr};
use super::interval::{Dual, Interval};
use crate::error::{Error, Result};

pub type IntervalEnclosure = Interval;

/// A function certified by bisection.
pub trait Objective: Sync {
    fn name(&self) -> String;
    fn case(&self) -> Case;
    fn vars(&self) -> &'static [Var];
    fn point(&self, x: [f64; 3]) -> f64;
    fn interval(&self, x: [Interval; 3]) -> Interval;
    /// Enclosure of the gradient over `x`, if available.
    fn gradient(&self, _x: [Interval; 3]) -> Option<[Interval; 3]> {
        None
    }
}

impl Objective for ProofExpr {
    fn name(&self) -> String {
        self.id().to_string()
    }
    fn case(&self) -> Case {
        ProofExpr::case(*self)
    }
    fn vars(&self) -> &'static [Var] {
        ProofExpr::vars(*self)
    }
    fn point(&self, x: [f64; 3]) -> f64 {
        self.eval(x[0], x[1], x[2])
    }
    fn interval(&self, x: [Interval; 3]) -> Interval {
        self.eval(x[0], x[1], x[2])
    }
    fn gradient(&self, x: [Interval; 3]) -> Option<[Interval; 3]> {
        let [u, v, w] = [0, 1, 2].map(|i| Dual::var(x[i], i));
        Some(self.eval(u, v, w).d)
    }
}

/// `∂w d` on Case 3.
#[derive(Debug, Clone, Copy)]
pub struct Case3Slope;

impl Objective for Case3Slope {
    fn name(&self) -> String {
        "case3_dw_d".into()
    }
    fn case(&self) -> Case {
        Case::Case3
    }
    fn vars(&self) -> &'static [Var] {
        &[Var::U, Var::V, Var::W]
    }
    fn point(&self, x: [f64; 3]) -> f64 {
        case3_dw_d(x[0], x[1], x[2])
    }
    fn interval(&self, x: [Interval; 3]) -> Interval {
        case3_dw_d(x[0], x[1], x[2])
    }
}

fn check_case(obj: &(impl Objective + ?Sized), b: &BoxRegion) -> Result<BoxRegion> {
    if b.case != obj.case() {
        return Err(Error::RegionMismatch(format!("{} lives in {}, box is tagged {}", obj.name(), obj.case(), b.case)));
    }
    b.tightened(obj.vars()).ok_or_else(|| Error::EmptyRegion(format!("{b}")))
}

/// Natural interval extension of `expr` over the box cut down to the case
/// order. Isotone in the box.
pub fn eval_interval(expr: ProofExpr, b: &BoxRegion) -> Result<IntervalEnclosure> {
    let t = check_case(&expr, b)?;
    Ok(expr.interval(t.intervals()))
}

/// Enclosure after `depth` levels of bisection, each level intersected with
/// its parent so that the width never grows with depth.
pub fn enclosure_at_depth(expr: ProofExpr, b: &BoxRegion, depth: u32) -> Result<IntervalEnclosure> {
    let t = check_case(&expr, b)?;
    Ok(refine(expr, &t, depth))
}

fn refine(expr: ProofExpr, t: &BoxRegion, depth: u32) -> Interval {
    let own = expr.interval(t.intervals());
    if depth == 0 {
        return own;
    }
    let hull = t
        .bisect(expr.vars())
        .iter()
        .filter_map(|c| c.tightened(expr.vars()))
        .map(|c| refine(expr, &c, depth - 1))
        .reduce(|a, b| a.hull(&b))
        .unwrap_or(own);
    own.intersect(&hull).unwrap_or(own)
}

/// Coordinates in which the case order is a box: with the used variables
/// sorted by the case order, `x_0 = y_0` and `x_j = x_{j-1} + y_j`, where
/// `y_j >= 0` for `j >= 1`. Every chart point satisfies the order, so the
/// closed forms are never evaluated outside their case.
struct Chart<'a> {
    chain: Vec<Var>,
    region: &'a BoxRegion,
}

impl<'a> Chart<'a> {
    fn new(vars: &[Var], region: &'a BoxRegion) -> Self {
        let chain = region.case.order().into_iter().filter(|v| vars.contains(v)).collect();
        Chart { chain, region }
    }

    fn initial(&self, t: &BoxRegion) -> [Interval; 3] {
        let mut y = [Interval::point(0.0); 3];
        for (j, var) in self.chain.iter().enumerate() {
            y[j] = if j == 0 {
                t.get(*var)
            } else {
                let gap = t.get(*var) - t.get(self.chain[j - 1]);
                Interval::new(gap.lo.max(0.0), gap.hi.max(0.0))
            };
        }
        y
    }

    /// Enclosure of the image of a chart box, in `(u, v, w)` slots.
    fn image(&self, y: &[Interval; 3]) -> [Interval; 3] {
        let mut x = self.region.intervals();
        let mut acc = y[0];
        for (j, var) in self.chain.iter().enumerate() {
            if j > 0 {
                acc = acc + y[j];
            }
            x[var.slot()] = acc;
        }
        x
    }

    /// The image clipped to the region box, or `None` if they are disjoint.
    fn clipped(&self, y: &[Interval; 3]) -> Option<BoxRegion> {
        let x = self.image(y);
        let mut b = *self.region;
        for var in &self.chain {
            b.set(*var, x[var.slot()].intersect(&self.region.get(*var))?);
        }
        Some(b)
    }

    fn bisect(&self, y: &[Interval; 3]) -> Vec<[Interval; 3]> {
        let split: Vec<(usize, Interval, Interval)> = (0..self.chain.len())
            .filter_map(|j| {
                let iv = y[j];
                let m = iv.mid();
                (iv.lo < m && m < iv.hi).then(|| (j, Interval::new(iv.lo, m), Interval::new(m, iv.hi)))
            })
            .collect();
        if split.is_empty() {
            return Vec::new();
        }
        (0..1usize << split.len())
            .map(|idx| {
                let mut c = *y;
                for (i, (j, lower, upper)) in split.iter().enumerate() {
                    c[*j] = if idx >> i & 1 == 1 { *upper } else { *lower };
                }
                c
            })
            .collect()
    }
}

/// Upper bound of the objective over the image of a chart box: the natural
/// extension intersected with the mean-value form in chart coordinates,
/// repeated on a face whenever a chart gradient component has constant sign.
fn upper_bound<O: Objective + ?Sized>(obj: &O, chart: &Chart, y: &[Interval; 3]) -> f64 {
    let n = chart.chain.len();
    let mut y = *y;
    let mut best = f64::INFINITY;
    for _ in 0..=n {
        let x = chart.image(&y);
        best = best.min(obj.interval(x).hi);
        if best < 0.0 {
            break;
        }
        let Some(gx) = obj.gradient(x) else { break };
        // d/dy_j = sum of d/dx_k over the chain from position j on.
        let mut gy = [Interval::point(0.0); 3];
        let mut acc: Option<Interval> = None;
        for j in (0..n).rev() {
            let g = gx[chart.chain[j].slot()];
            let s = acc.map_or(g, |a| a + g);
            gy[j] = s;
            acc = Some(s);
        }
        let mut m = y;
        for yj in m.iter_mut().take(n) {
            *yj = Interval::point(yj.mid());
        }
        let mut mv = obj.interval(chart.image(&m));
        for j in 0..n {
            mv = mv + gy[j] * (y[j] - m[j]);
        }
        best = best.min(mv.hi);
        if best < 0.0 {
            break;
        }
        let mut moved = false;
        for j in 0..n {
            if y[j].is_point() {
                continue;
            }
            if gy[j].hi < 0.0 {
                y[j] = Interval::point(y[j].lo);
                moved = true;
            } else if gy[j].lo > 0.0 {
                y[j] = Interval::point(y[j].hi);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Image of the undecided chart box, clipped to the region box.
    pub region: BoxRegion,
    /// Best upper bound obtained on the box (not negative).
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertifyStatus {
    Certified,
    Undetermined,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifyResult {
    pub expr: String,
    pub region: BoxRegion,
    pub max_depth: u32,
    pub status: CertifyStatus,
    pub certified_leaves: u64,
    pub boxes_evaluated: u64,
    pub deepest_level: u32,
    /// Largest upper bound over certified leaves.
    pub worst_certified_upper: f64,
    /// Undecided boxes at the depth cap, ordered by coordinates.
    pub witnesses: Vec<Witness>,
}

impl CertifyResult {
    pub fn is_certified(&self) -> bool {
        self.status == CertifyStatus::Certified
    }

    /// Smallest box containing every witness.
    pub fn witness_hull(&self) -> Option<BoxRegion> {
        let mut it = self.witnesses.iter().map(|w| w.region);
        let first = it.next()?;
        Some(it.fold(first, |a, b| BoxRegion {
            u: a.u.hull(&b.u),
            v: a.v.hull(&b.v),
            w: a.w.hull(&b.w),
            case: a.case,
        }))
    }
}

struct Tally {
    certified: u64,
    evaluated: u64,
    deepest: u32,
    worst: f64,
    witnesses: Vec<Witness>,
}

impl Tally {
    fn empty() -> Tally {
        Tally { certified: 0, evaluated: 0, deepest: 0, worst: f64::NEG_INFINITY, witnesses: Vec::new() }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.certified += o.certified;
        self.evaluated += o.evaluated;
        self.deepest = self.deepest.max(o.deepest);
        self.worst = self.worst.max(o.worst);
        self.witnesses.extend(o.witnesses);
        self
    }
}

const PARALLEL_LEVELS: u32 = 3;

fn search<O: Objective + ?Sized>(obj: &O, chart: &Chart, y: &[Interval; 3], level: u32, max_depth: u32) -> Tally {
    let Some(clip) = chart.clipped(y) else {
        return Tally::empty();
    };
    let ub = upper_bound(obj, chart, y);
    let mut tally = Tally { evaluated: 1, deepest: level, ..Tally::empty() };
    if ub < 0.0 {
        tally.certified = 1;
        tally.worst = ub;
        return tally;
    }
    let children = if level < max_depth { chart.bisect(y) } else { Vec::new() };
    if children.is_empty() {
        tally.witnesses.push(Witness { region: clip, upper: ub });
        return tally;
    }
    let sub = if level < PARALLEL_LEVELS {
        children.par_iter().map(|c| search(obj, chart, c, level + 1, max_depth)).collect::<Vec<_>>()
    } else {
        children.iter().map(|c| search(obj, chart, c, level + 1, max_depth)).collect()
    };
    sub.into_iter().fold(tally, Tally::merge)
}

/// Bisects the region in chart coordinates (every used coordinate halved
/// per level) until each leaf has a negative upper bound or `max_depth`
/// levels are reached.
pub fn certify_objective<O: Objective + ?Sized>(obj: &O, region: &BoxRegion, max_depth: u32) -> Result<CertifyResult> {
    let t = check_case(obj, region)?;
    let chart = Chart::new(obj.vars(), region);
    let mut tally = search(obj, &chart, &chart.initial(&t), 0, max_depth);
    tally.witnesses.sort_by(|a, b| {
        let key = |w: &Witness| [w.region.u.lo, w.region.v.lo, w.region.w.lo, w.region.u.hi, w.region.v.hi, w.region.w.hi];
        key(a).iter().zip(key(b).iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(CertifyResult {
        expr: obj.name(),
        region: *region,
        max_depth,
        status: if tally.witnesses.is_empty() { CertifyStatus::Certified } else { CertifyStatus::Undetermined },
        certified_leaves: tally.certified,
        boxes_evaluated: tally.evaluated,
        deepest_level: tally.deepest,
        worst_certified_upper: tally.worst,
        witnesses: tally.witnesses,
    })
}

/// Certifies `expr < 0` on `region` intersected with its case order.
pub fn certify_negative(expr: ProofExpr, region: &BoxRegion, max_depth: u32) -> Result<CertifyResult> {
    certify_objective(&expr, region, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(u: (f64, f64), v: (f64, f64), w: (f64, f64), case: Case) -> BoxRegion {
        BoxRegion::new(u, v, w, case).unwrap()
    }

    #[test]
    fn point_enclosures() {
        let e = eval_interval(ProofExpr::DCase2, &bx((1.0, 1.0), (1.0, 1.0), (1.0, 1.0), Case::Case2)).unwrap();
        let want = 4.0 * 1f64.sinh() * (1.0 - 1f64.cosh());
        assert!(e.contains(want) && e.width() < 1e-9);
        assert!((e.mid() + 2.552916).abs() < 1e-6);
        let e = eval_interval(ProofExpr::DCase1, &bx((1.0, 1.0), (2.0, 2.0), (1.0, 1.0), Case::Case1)).unwrap();
        assert!(e.contains(crate::tilted::d_expr(1.0, 2.0, 1.0)) && e.width() < 1e-9);
        assert!((e.mid() + 10.3447).abs() < 1e-4);
    }

    #[test]
    fn boundary_box_cannot_be_negative() {
        let e = eval_interval(ProofExpr::DCase2, &bx((0.0, 0.2), (1.0, 1.2), (1.0, 1.2), Case::Case2)).unwrap();
        assert!(e.hi >= 0.0);
    }

    #[test]
    fn mismatched_case_is_rejected() {
        let b = bx((1.0, 2.0), (2.0, 3.0), (0.5, 1.0), Case::Case1);
        assert!(matches!(eval_interval(ProofExpr::DCase2, &b), Err(Error::RegionMismatch(_))));
    }

    #[test]
    fn certifies_small_boxes() {
        let r = certify_negative(ProofExpr::DCase2, &bx((0.1, 1.0), (1.0, 3.0), (1.0, 1.0), Case::Case2), 20).unwrap();
        assert!(r.is_certified(), "{:?}", r.witnesses.first());
        assert!(r.worst_certified_upper < 0.0);
        let r = certify_negative(ProofExpr::DCase1, &bx((1.0, 4.0), (1.0, 4.0), (0.5, 1.0), Case::Case1), 20).unwrap();
        assert!(r.is_certified());
    }

    #[test]
    fn boundary_witnesses_cluster() {
        let b = bx((0.0, 0.5), (0.5, 1.5), (0.5, 1.5), Case::Case2);
        let r = certify_negative(ProofExpr::DCase2, &b, 8).unwrap();
        assert_eq!(r.status, CertifyStatus::Undetermined);
        for w in &r.witnesses {
            assert!(crate::region::structure::near_degenerate_boundary(&w.region, 0.1), "{}", w.region);
        }
    }

    #[test]
    fn refinement_never_widens() {
        let b = bx((0.2, 1.0), (1.0, 2.0), (0.5, 1.0), Case::Case2);
        let mut prev = enclosure_at_depth(ProofExpr::DCase2, &b, 0).unwrap();
        for k in 1..4 {
            let e = enclosure_at_depth(ProofExpr::DCase2, &b, k).unwrap();
            assert!(e.is_subset_of(&prev) && e.width() <= prev.width());
            prev = e;
        }
    }
}
