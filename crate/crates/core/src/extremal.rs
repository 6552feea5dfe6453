//! Largest tilted mean over finite laws with a prescribed second moment.
//!
//! The search is deterministic: a coarse grid over atom positions, then
//! compass refinement of positions (in log scale) and weights. The moment
//! constraints are eliminated exactly, so every visited law is feasible up
//! to rounding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tilted::{
    bound_factor, tilted_mean, DiscreteDistribution, FactorKind, SymmetricDiscreteDistribution, TiltParams,
    FLOAT_SLACK,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Symmetric laws with `E X^2 = sigma^2`.
    SymmetricSecondMoment,
    /// Laws with `E X = 0` and `E X^2 = sigma^2`.
    ZeroMeanSecondMoment,
}

impl FamilyKind {
    pub fn factor_kind(self) -> FactorKind {
        match self {
            FamilyKind::SymmetricSecondMoment => FactorKind::Symmetric,
            FamilyKind::ZeroMeanSecondMoment => FactorKind::ZeroMean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub sigma2: f64,
    /// Support points per side.
    pub max_atom_pairs: usize,
    pub x_max: f64,
}

impl FamilySpec {
    /// Defaults: three atom pairs, atoms in `[0, 4w]`.
    pub fn new(kind: FamilyKind, sigma2: f64, w: f64) -> Result<FamilySpec> {
        FamilySpec { kind, sigma2, max_atom_pairs: 3, x_max: 4.0 * w }.validated()
    }

    pub fn validated(self) -> Result<FamilySpec> {
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::InvalidParams(format!("sigma^2 must be > 0, got {}", self.sigma2)));
        }
        if self.max_atom_pairs == 0 {
            return Err(Error::InvalidParams("max_atom_pairs must be >= 1".into()));
        }
        if !(self.x_max.is_finite() && self.x_max > 0.0) {
            return Err(Error::InvalidParams(format!("x_max must be > 0, got {}", self.x_max)));
        }
        if self.sigma2 > self.x_max * self.x_max {
            return Err(Error::Infeasible(format!(
                "E X^2 = {} cannot be reached with atoms in [-{x}, {x}]",
                self.sigma2,
                x = self.x_max
            )));
        }
        Ok(self)
    }
}

/// Atoms `-w, 0, w` with masses `sigma^2/2w^2, 1 - sigma^2/w^2, sigma^2/2w^2`.
pub fn three_point_extremal(sigma: f64, w: f64) -> Result<SymmetricDiscreteDistribution> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::InvalidParams(format!("w must be > 0, got {w}")));
    }
    if !(sigma.is_finite() && sigma > 0.0 && sigma < w) {
        return Err(Error::InvalidParams(format!("need 0 < sigma < w, got sigma = {sigma}, w = {w}")));
    }
    let q = (sigma / w) * (sigma / w);
    SymmetricDiscreteDistribution::new(vec![(0.0, 1.0 - q), (w, q)])
}

/// `sigma^2 (sinh(hw)/w) / (1 + sigma^2 (cosh(hw) - 1)/w^2)`, the tilted
/// mean of the three-point law.
pub fn three_point_value(sigma: f64, p: TiltParams) -> f64 {
    let (hw, w) = (p.hw(), p.w());
    let s2 = sigma * sigma;
    s2 * (hw.sinh() / w) / (1.0 + s2 * (hw.cosh() - 1.0) / (w * w))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub kind: FamilyKind,
    pub sigma2: f64,
    pub h: f64,
    pub w: f64,
    pub value: f64,
    /// `value / sigma^2`.
    pub ratio: f64,
    pub bound_factor: f64,
    /// `bound_factor - ratio`.
    pub gap: f64,
    /// Signed support points and masses of the best law found.
    pub atoms: Vec<(f64, f64)>,
    /// Three-point value / sigma^2, when the three-point law is admissible.
    pub three_point_ratio: Option<f64>,
    pub visited: u64,
    /// Largest violation of the family constraints over visited laws.
    pub max_constraint_residual: f64,
    /// Visited laws whose tilted mean reached the sharp bound.
    pub bound_violations: u64,
}

/// A point of the search space.
#[derive(Debug, Clone, PartialEq)]
struct Params {
    /// `ln x` of the positive atoms.
    pos: Vec<f64>,
    /// `ln y` of the negative atoms (zero-mean family only).
    neg: Vec<f64>,
    /// Moment shares of all but the last positive atom.
    pos_share: Vec<f64>,
    /// Moment shares of all but the last negative atom.
    neg_share: Vec<f64>,
}

impl Params {
    fn coords(&self) -> usize {
        self.pos.len() + self.neg.len() + self.pos_share.len() + self.neg_share.len()
    }

    fn get_mut(&mut self, mut i: usize) -> (&mut f64, bool) {
        for (v, log) in [(&mut self.pos, true), (&mut self.neg, true), (&mut self.pos_share, false), (&mut self.neg_share, false)] {
            if i < v.len() {
                return (&mut v[i], log);
            }
            i -= v.len();
        }
        unreachable!("coordinate out of range")
    }
}

struct Search<'a> {
    spec: &'a FamilySpec,
    p: TiltParams,
    ln_min: f64,
    ln_max: f64,
    factor: f64,
    visited: u64,
    max_residual: f64,
    violations: u64,
}

/// Merges equal positions, sorts, and puts the remaining mass at 0.
fn assemble(atoms: &mut Vec<(f64, f64)>) -> Option<()> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    atoms.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    let used: f64 = atoms.iter().map(|a| a.1).sum();
    let rest = 1.0 - used;
    if rest < -1e-14 {
        return None;
    }
    if rest > 0.0 {
        atoms.push((0.0, rest));
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        atoms.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
    }
    Some(())
}

impl Search<'_> {
    fn clamp(&self, ln: f64) -> f64 {
        ln.clamp(self.ln_min, self.ln_max)
    }

    /// The law described by `t`, as signed atoms, or `None` if infeasible.
    fn law(&self, t: &Params) -> Option<Vec<(f64, f64)>> {
        let s2 = self.spec.sigma2;
        let xs: Vec<f64> = t.pos.iter().map(|&l| self.clamp(l).exp()).collect();
        match self.spec.kind {
            FamilyKind::SymmetricSecondMoment => {
                let last = 1.0 - t.pos_share.iter().sum::<f64>();
                if last < 0.0 || t.pos_share.iter().any(|&s| s < 0.0) {
                    return None;
                }
                let shares = t.pos_share.iter().copied().chain(std::iter::once(last));
                // Pair mass p at +-x carries moment p x^2.
                let mut atoms = Vec::new();
                for (x, s) in xs.iter().zip(shares) {
                    let m = s * s2 / (x * x);
                    atoms.push((-x, m / 2.0));
                    atoms.push((*x, m / 2.0));
                }
                assemble(&mut atoms)?;
                Some(atoms)
            }
            FamilyKind::ZeroMeanSecondMoment => {
                let ys: Vec<f64> = t.neg.iter().map(|&l| self.clamp(l).exp()).collect();
                if t.pos_share.iter().chain(&t.neg_share).any(|&s| s < 0.0) {
                    return None;
                }
                let (mut a, mut b) = (0.0, 0.0);
                let mut atoms = Vec::new();
                for (x, s) in xs.iter().zip(&t.pos_share) {
                    let m = s * s2 / (x * x);
                    a += m * x;
                    b += m * x * x;
                    atoms.push((*x, m));
                }
                for (y, s) in ys.iter().zip(&t.neg_share) {
                    let m = s * s2 / (y * y);
                    a -= m * y;
                    b += m * y * y;
                    atoms.push((-y, m));
                }
                let (xm, ym) = (*xs.last()?, *ys.last()?);
                let pm = (s2 - b - a * ym) / (xm * (xm + ym));
                let qm = (pm * xm + a) / ym;
                if !(pm >= 0.0 && qm >= 0.0) {
                    return None;
                }
                atoms.push((xm, pm));
                atoms.push((-ym, qm));
                assemble(&mut atoms)?;
                Some(atoms)
            }
        }
    }

    fn value_of(&mut self, atoms: &[(f64, f64)]) -> Option<f64> {
        self.visited += 1;
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        let m2: f64 = atoms.iter().map(|a| a.1 * a.0 * a.0).sum();
        let mut residual = (mass - 1.0).abs().max((m2 - self.spec.sigma2).abs());
        let value = match self.spec.kind {
            FamilyKind::SymmetricSecondMoment => {
                let pairs: Vec<(f64, f64)> = atoms
                    .iter()
                    .filter(|a| a.0 >= 0.0)
                    .map(|&(x, p)| (x, if x > 0.0 { 2.0 * p } else { p }))
                    .collect();
                let d = SymmetricDiscreteDistribution::new(pairs).ok()?;
                tilted_mean(&d, self.p)
            }
            FamilyKind::ZeroMeanSecondMoment => {
                let mean: f64 = atoms.iter().map(|a| a.1 * a.0).sum();
                residual = residual.max(mean.abs());
                DiscreteDistribution::new(atoms.to_vec()).ok()?.tilted_mean(self.p)
            }
        };
        self.max_residual = self.max_residual.max(residual);
        if value >= self.factor * m2 + FLOAT_SLACK {
            self.violations += 1;
        }
        Some(value)
    }

    fn eval(&mut self, t: &Params) -> f64 {
        match self.law(t) {
            Some(atoms) => self.value_of(&atoms).unwrap_or(f64::NEG_INFINITY),
            None => f64::NEG_INFINITY,
        }
    }

    /// Compass search; log-position coordinates start with step 0.5, shares
    /// with 0.1.
    fn refine(&mut self, start: Params, start_value: f64) -> (Params, f64) {
        let (mut best, mut best_v) = (start, start_value);
        let mut steps: Vec<f64> = (0..best.coords()).map(|i| if best.clone().get_mut(i).1 { 0.5 } else { 0.1 }).collect();
        for _ in 0..4000 {
            if steps.iter().all(|&s| s < 1e-10) {
                break;
            }
            let mut improved = false;
            for i in 0..best.coords() {
                for dir in [1.0, -1.0] {
                    let mut t = best.clone();
                    {
                        let (c, log) = t.get_mut(i);
                        *c += dir * steps[i];
                        if log {
                            *c = self.clamp(*c);
                        }
                    }
                    if t == best {
                        continue;
                    }
                    let v = self.eval(&t);
                    if v > best_v {
                        best = t;
                        best_v = v;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                steps.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        (best, best_v)
    }

    fn grid(&self) -> Vec<f64> {
        let n = 24;
        let mut g: Vec<f64> = (0..n)
            .map(|i| self.ln_min + (self.ln_max - self.ln_min) * i as f64 / (n - 1) as f64)
            .collect();
        let ln_w = self.p.w().ln();
        if ln_w < self.ln_max {
            g.push(ln_w);
        }
        g.sort_by(f64::total_cmp);
        g
    }
}

/// Best value found over the family; a lower bound on the supremum.
pub fn sup_tilted_mean(spec: &FamilySpec, p: TiltParams) -> Result<ExtremalResult> {
    let spec = spec.validated()?;
    let w = p.w();
    let x_min = (spec.sigma2.sqrt().min(w) * 1e-4).min(spec.x_max * 1e-6);
    let mut s = Search {
        spec: &spec,
        p,
        ln_min: x_min.ln(),
        ln_max: spec.x_max.ln(),
        factor: bound_factor(spec.kind.factor_kind(), p).value,
        visited: 0,
        max_residual: 0.0,
        violations: 0,
    };
    let grid = s.grid();

    // One atom per side on the grid.
    let mut starts: Vec<(Params, f64)> = Vec::new();
    match spec.kind {
        FamilyKind::SymmetricSecondMoment => {
            for &g in &grid {
                let t = Params { pos: vec![g], neg: vec![], pos_share: vec![], neg_share: vec![] };
                let v = s.eval(&t);
                starts.push((t, v));
            }
        }
        FamilyKind::ZeroMeanSecondMoment => {
            for &gx in &grid {
                for &gy in &grid {
                    let t = Params { pos: vec![gx], neg: vec![gy], pos_share: vec![], neg_share: vec![] };
                    let v = s.eval(&t);
                    starts.push((t, v));
                }
            }
        }
    }
    starts.retain(|(_, v)| v.is_finite());
    if starts.is_empty() {
        return Err(Error::Infeasible(format!("no feasible law on the grid for sigma^2 = {}", spec.sigma2)));
    }
    starts.sort_by(|a, b| b.1.total_cmp(&a.1));
    starts.truncate(4);

    let mut best = (starts[0].0.clone(), starts[0].1);
    for (t, v) in starts {
        let r = s.refine(t, v);
        if r.1 > best.1 {
            best = r;
        }
    }

    // Grow one atom per side at a time from the current best.
    for _ in 1..spec.max_atom_pairs {
        let mut candidates: Vec<(Params, f64)> = Vec::new();
        for &g in &grid {
            let mut t = best.0.clone();
            let share = 0.05;
            t.pos_share.iter_mut().for_each(|x| *x *= 1.0 - share);
            t.pos_share.push(share);
            t.pos.insert(t.pos.len() - 1, g);
            if spec.kind == FamilyKind::ZeroMeanSecondMoment {
                t.neg_share.iter_mut().for_each(|x| *x *= 1.0 - share);
                t.neg_share.push(share);
                t.neg.insert(t.neg.len() - 1, g);
            }
            let v = s.eval(&t);
            if v.is_finite() {
                candidates.push((t, v));
            }
        }
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
        candidates.truncate(2);
        let mut grown = best.clone();
        for (t, v) in candidates {
            let r = s.refine(t, v);
            if r.1 > grown.1 {
                grown = r;
            }
        }
        best = grown;
    }

    let mut atoms = s.law(&best.0).expect("best point is feasible");
    let mut value = best.1;
    let sigma = spec.sigma2.sqrt();
    let admissible = spec.kind == FamilyKind::SymmetricSecondMoment && sigma < w && w <= spec.x_max;
    if admissible {
        // The grid reaches the three-point law only up to rounding.
        let exact = three_point_extremal(sigma, w)?.signed_atoms();
        if let Some(v) = s.value_of(&exact).filter(|&v| v > value) {
            atoms = exact;
            value = v;
        }
    }
    let three_point_ratio = admissible.then(|| three_point_value(sigma, p) / spec.sigma2);
    let ratio = value / spec.sigma2;
    Ok(ExtremalResult {
        kind: spec.kind,
        sigma2: spec.sigma2,
        h: p.h(),
        w,
        value,
        ratio,
        bound_factor: s.factor,
        gap: s.factor - ratio,
        atoms,
        three_point_ratio,
        visited: s.visited,
        max_constraint_residual: s.max_residual,
        bound_violations: s.violations,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub sigma: f64,
    pub sup: f64,
    pub ratio: f64,
    pub bound_factor: f64,
    pub gap: f64,
    pub three_point_ratio: Option<f64>,
    pub atoms: Vec<(f64, f64)>,
    pub visited: u64,
    pub max_constraint_residual: f64,
    pub bound_violations: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanTable {
    pub kind: FamilyKind,
    pub h: f64,
    pub w: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    /// Whether the ratio strictly increases down the table.
    pub fn ratios_increasing(&self) -> bool {
        self.rows.windows(2).all(|r| r[1].ratio > r[0].ratio)
    }

    /// Whether every ratio stays strictly below the bound factor.
    pub fn strictly_below_factor(&self) -> bool {
        self.rows.iter().all(|r| r.ratio < r.bound_factor)
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.rows.last().map(|r| r.gap)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sigma", "sup", "ratio", "bound_factor", "gap"])?;
        for r in &self.rows {
            w.write_record([r.sigma, r.sup, r.ratio, r.bound_factor, r.gap].map(|x| format!("{x:e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `sup / sigma^2` over the symmetric family for each `sigma`.
pub fn ratio_limit_scan(p: TiltParams, sigmas: &[f64]) -> Result<ScanTable> {
    scan_family(FamilyKind::SymmetricSecondMoment, p, sigmas)
}

/// Like [`ratio_limit_scan`] for either family. Rows run in parallel and
/// keep input order.
pub fn scan_family(kind: FamilyKind, p: TiltParams, sigmas: &[f64]) -> Result<ScanTable> {
    if let Some(&s) = sigmas.iter().find(|&&s| !(s > 0.0 && s < p.w())) {
        return Err(Error::InvalidParams(format!("sigma = {s} must lie in (0, w = {})", p.w())));
    }
    let rows = sigmas
        .par_iter()
        .map(|&sigma| {
            let r = sup_tilted_mean(&FamilySpec::new(kind, sigma * sigma, p.w())?, p)?;
            Ok(ScanRow {
                sigma,
                sup: r.value,
                ratio: r.ratio,
                bound_factor: r.bound_factor,
                gap: r.gap,
                three_point_ratio: r.three_point_ratio,
                atoms: r.atoms,
                visited: r.visited,
                max_constraint_residual: r.max_constraint_residual,
                bound_violations: r.bound_violations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable { kind, h: p.h(), w: p.w(), rows })
}
