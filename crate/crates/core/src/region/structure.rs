//! The sign claims of the case analysis, checked on bounded boxes.
//!
//! Unbounded tails (`v -> inf`) are outside the scope of box certification;
//! the default region is `[0.05, 8]^3` cut by each case order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boxes::{BoxRegion, Case};
use super::catalog::ProofExpr;
use super::certify::{certify_objective, Case3Slope, CertifyResult, Objective};
use super::interval::Interval;
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureConfig {
    pub lo: f64,
    pub hi: f64,
    pub depth: u32,
    /// Case 2 box containing part of the degenerate set `u = 0, v = w`.
    pub boundary_box: BoxRegion,
    /// Witnesses of the boundary box must lie within this distance of it.
    pub boundary_margin: f64,
    /// `w` values for the `u = 0, v = w` evaluation.
    pub zero_grid: Vec<f64>,
    pub zero_tolerance: f64,
    /// Witness boxes listed per check; the count is always complete.
    pub witness_cap: usize,
}

impl Default for StructureConfig {
    fn default() -> Self {
        StructureConfig {
            lo: 0.05,
            hi: 8.0,
            depth: 18,
            boundary_box: BoxRegion {
                u: Interval::new(0.0, 0.5),
                v: Interval::new(0.9, 1.5),
                w: Interval::new(0.9, 1.1),
                case: Case::Case2,
            },
            boundary_margin: 0.05,
            zero_grid: vec![0.05, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            zero_tolerance: 1e-12,
            witness_cap: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Passed,
    /// Undecided boxes, all at the degenerate boundary where `d = 0`.
    BoundaryExpected,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureCheck {
    pub name: String,
    pub claim: String,
    pub target: String,
    pub status: CheckStatus,
    pub region: Option<BoxRegion>,
    pub depth: Option<u32>,
    pub certified_leaves: u64,
    pub boxes_evaluated: u64,
    pub witness_count: usize,
    pub witness_hull: Option<BoxRegion>,
    pub witnesses: Vec<BoxRegion>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureReport {
    pub config: StructureConfig,
    pub checks: Vec<StructureCheck>,
    pub all_passed: bool,
}

impl StructureReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

enum Plan {
    Negative { name: &'static str, claim: &'static str, target: Target, case: Case },
    Boundary,
    VanishesAtU0,
}

#[derive(Clone, Copy)]
enum Target {
    Expr(ProofExpr),
    Case3,
}

impl Target {
    fn run(self, region: &BoxRegion, depth: u32) -> Result<CertifyResult> {
        match self {
            Target::Expr(e) => certify_objective(&e, region, depth),
            Target::Case3 => certify_objective(&Case3Slope, region, depth),
        }
    }
}

fn plans() -> Vec<Plan> {
    use ProofExpr as P;
    let neg = |name, claim, e: ProofExpr| Plan::Negative { name, claim, target: Target::Expr(e), case: e.case() };
    vec![
        neg("d_negative_case1", "d < 0 for w <= u <= v", P::DCase1),
        neg("d_negative_case2", "d < 0 for u <= w <= v", P::DCase2),
        neg("concave_in_v_case1", "d_vv < 0, so d is strictly concave in v (case 1)", P::Dv2Case1),
        neg("d2_negative_case1", "d2 = w e^u d_vv|_{v=u} < 0", P::D2Case1),
        neg("dtilde_negative_case1", "e^{u+w}(w/u) d|_{v=u} < 0", P::DtildeCase1),
        neg("d1_negative_case1", "d1 = w e^u d_v|_{v=u} < 0", P::D1Case1),
        neg("decreasing_in_v_case2", "d1 = w e^v d_v < 0, so d is decreasing in v (case 2)", P::D1Case2),
        neg("dv_d1_at_v_eq_w_negative", "(d1)_v|_{v=w} < 0", P::DvD1AtWCase2),
        neg("d11_negative", "d11 < 0", P::D11),
        neg("d12_negative", "d12 < 0", P::D12),
        neg("d111_negative", "d111 < 0", P::D111),
        neg("d112_negative", "d112 < 0", P::D112),
        Plan::Negative {
            name: "case3_decreasing_in_w",
            claim: "d_w = -2 (sinh w / w)' (v^2 ch u + u^2 ch v) < 0 for u <= v <= w",
            target: Target::Case3,
            case: Case::Case3,
        },
        neg("d_negative_at_v_eq_w", "d|_{v=w} < 0 for 0 < u <= w", P::DAtVEqWCase2),
        Plan::VanishesAtU0,
        Plan::Boundary,
    ]
}

fn from_result(name: &str, claim: &str, r: &CertifyResult, status: CheckStatus, cfg: &StructureConfig, detail: String) -> StructureCheck {
    StructureCheck {
        name: name.to_string(),
        claim: claim.to_string(),
        target: r.expr.clone(),
        status,
        region: Some(r.region),
        depth: Some(r.max_depth),
        certified_leaves: r.certified_leaves,
        boxes_evaluated: r.boxes_evaluated,
        witness_count: r.witnesses.len(),
        witness_hull: r.witness_hull(),
        witnesses: r.witnesses.iter().take(cfg.witness_cap).map(|w| w.region).collect(),
        detail,
    }
}

/// Whether a witness lies within `margin` of the set `u = 0, v = w`.
pub fn near_degenerate_boundary(b: &BoxRegion, margin: f64) -> bool {
    let gap = (b.v.lo - b.w.hi).max(b.w.lo - b.v.hi).max(0.0);
    b.u.lo <= margin && gap <= margin
}

fn run_plan(plan: &Plan, cfg: &StructureConfig) -> Result<StructureCheck> {
    match plan {
        Plan::Negative { name, claim, target, case } => {
            let region = BoxRegion::cube(cfg.lo, cfg.hi, *case)?;
            let r = target.run(&region, cfg.depth)?;
            let (status, detail) = if r.is_certified() {
                (CheckStatus::Passed, format!("certified on {} leaves, worst upper bound {:e}", r.certified_leaves, r.worst_certified_upper))
            } else {
                (CheckStatus::Failed, format!("{} undecided boxes at depth {}", r.witnesses.len(), cfg.depth))
            };
            Ok(from_result(name, claim, &r, status, cfg, detail))
        }
        Plan::Boundary => {
            let r = certify_objective(&ProofExpr::DCase2, &cfg.boundary_box, cfg.depth)?;
            let localized = r.witnesses.iter().all(|w| near_degenerate_boundary(&w.region, cfg.boundary_margin));
            let (status, detail) = match (r.is_certified(), localized) {
                (false, true) => (
                    CheckStatus::BoundaryExpected,
                    format!("{} undecided boxes, all within {} of u = 0, v = w", r.witnesses.len(), cfg.boundary_margin),
                ),
                (true, _) => (CheckStatus::Failed, "certified a box on which d attains 0".to_string()),
                (false, false) => (CheckStatus::Failed, "undecided boxes away from the degenerate boundary".to_string()),
            };
            Ok(from_result("boundary_box_undetermined", "d = 0 at u = 0, v = w, so boxes there stay undecided", &r, status, cfg, detail))
        }
        Plan::VanishesAtU0 => {
            let mut worst = 0.0f64;
            for &w in &cfg.zero_grid {
                let x = [Interval::point(0.0), Interval::point(w), Interval::point(w)];
                let e = ProofExpr::DAtVEqWCase2.interval(x);
                let scale = 1.0 + 2.0 * w * w.sinh();
                worst = worst.max(e.lo.abs().max(e.hi.abs()) / scale);
            }
            let ok = worst <= cfg.zero_tolerance;
            Ok(StructureCheck {
                name: "d_vanishes_at_u0_v_eq_w".into(),
                claim: "d|_{v=w, u=0+} = 0".into(),
                target: ProofExpr::DAtVEqWCase2.id().into(),
                status: if ok { CheckStatus::Passed } else { CheckStatus::Failed },
                region: None,
                depth: None,
                certified_leaves: 0,
                boxes_evaluated: cfg.zero_grid.len() as u64,
                witness_count: 0,
                witness_hull: None,
                witnesses: vec![],
                detail: format!("max scaled |d| over w in {:?}: {:e}", cfg.zero_grid, worst),
            })
        }
    }
}

/// Runs every check; checks run in parallel, the report keeps a fixed order.
pub fn verify_case_structure(cfg: &StructureConfig) -> Result<StructureReport> {
    let checks = plans().par_iter().map(|p| run_plan(p, cfg)).collect::<Result<Vec<_>>>()?;
    let all_passed = checks.iter().all(|c| c.status != CheckStatus::Failed);
    Ok(StructureReport { config: cfg.clone(), checks, all_passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shallow_report_is_well_formed() {
        let cfg = StructureConfig { depth: 6, hi: 2.0, ..Default::default() };
        let r = verify_case_structure(&cfg).unwrap();
        assert_eq!(r.checks.len(), plans().len());
        let zero = r.checks.iter().find(|c| c.name == "d_vanishes_at_u0_v_eq_w").unwrap();
        assert_eq!(zero.status, CheckStatus::Passed);
        let case3 = r.checks.iter().find(|c| c.name == "case3_decreasing_in_w").unwrap();
        assert_eq!(case3.status, CheckStatus::Passed);
    }
}
