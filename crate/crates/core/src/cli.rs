//! Command-line front end.
//!
//! [`run`] never prints; it returns the report text and the exit status so
//! the binary and the tests share one code path.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expineq::battery::EntryStatus;
use crate::expineq::{decide_sign, parse_expr, verify_paper_battery, BatteryReport, Decision, ProverConfig};
use crate::extremal::{scan_family, FamilyKind, ScanTable};
use crate::region::structure::CheckStatus;
use crate::region::{certify_negative, BoxRegion, Case, CertifyResult, ProofExpr, StructureConfig, StructureReport};
use crate::tilted::{check_bound, tilted_mean, BoundReport, SymmetricDiscreteDistribution, TiltParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Symmetric,
    ZeroMean,
}

impl From<Family> for FamilyKind {
    fn from(f: Family) -> Self {
        match f {
            Family::Symmetric => FamilyKind::SymmetricSecondMoment,
            Family::ZeroMean => FamilyKind::ZeroMeanSecondMoment,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "tiltcheck", version, about = "Tilted-mean bounds, exp-polynomial sign proofs and interval region checks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Tilted mean of a symmetric distribution.
    Eval(TiltArgs),
    /// Compare the tilted mean with sinh(hw)/w * E X^2.
    BoundCheck(TiltArgs),
    /// Decide the sign of P(w, e^w) on w > 0.
    Prove {
        /// Exp-polynomial in `w`, e.g. "exp(w) - 1 - w".
        #[arg(long)]
        expr: String,
        /// Cap on nested reductions and splits.
        #[arg(long, default_value_t = 32)]
        depth: u32,
    },
    /// Prover battery, case-structure checks and the default region boxes.
    VerifyProof(RegionArgs),
    /// Largest tilted mean per unit second moment, for each sigma.
    Extremal(ExtremalArgs),
    /// Everything above in one JSON document.
    Report {
        #[command(flatten)]
        region: RegionArgs,
        #[command(flatten)]
        extremal: ExtremalArgs,
        /// Optional distribution for an extra bound check.
        #[arg(long)]
        dist: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct TiltArgs {
    /// Distribution JSON: {"atoms": [[x, p], ...]}, x >= 0 ascending.
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RegionArgs {
    /// Subdivision levels per region check.
    #[arg(long, default_value_t = 18)]
    pub depth: u32,
    /// Coordinate range of the default boxes.
    #[arg(long = "box", value_parser = parse_range, default_value = "0.05:8")]
    pub range: (f64, f64),
    /// Undecided boundary boxes must lie this close to u = 0, v = w.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ExtremalArgs {
    #[arg(long = "h", id = "extremal_h", default_value_t = 1.0)]
    pub h: f64,
    #[arg(long = "w", id = "extremal_w", default_value_t = 1.0)]
    pub w: f64,
    /// Comma-separated values, each in (0, w).
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.1, 0.01, 0.001])]
    pub sigma: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Family::Symmetric)]
    pub family: Family,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("bad lower bound {a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("bad upper bound {b:?}: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(format!("need 0 <= lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        match &self.command {
            Command::Prove { depth, .. } if *depth < 1 => return bad("--depth must be >= 1".into()),
            Command::VerifyProof(r) | Command::Report { region: r, .. } if r.depth < 1 || !(r.margin > 0.0) => {
                return bad("--depth must be >= 1 and --margin > 0".into())
            }
            _ => {}
        }
        let csv_ok = matches!(self.command, Command::Eval(_) | Command::BoundCheck(_) | Command::Extremal(_));
        if self.format == Format::Csv && !csv_ok {
            return bad("csv output is available for eval, bound-check and extremal".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
struct EvalReport {
    h: f64,
    w: f64,
    tilted_mean: f64,
    second_moment: f64,
}

#[derive(Debug, Clone, Serialize)]
struct BoundCheckReport {
    h: f64,
    w: f64,
    #[serde(flatten)]
    bound: BoundReport,
}

#[derive(Debug, Clone, Serialize)]
struct ProveReport {
    expr: String,
    normalized: String,
    status: &'static str,
    sign: Option<String>,
    replayed: bool,
    decision: Decision,
}

#[derive(Debug, Clone, Serialize)]
struct VerifyReport {
    passed: bool,
    battery: BatteryReport,
    structure: StructureReport,
    default_boxes: Vec<CertifyResult>,
}

#[derive(Debug, Clone, Serialize)]
struct FactorRow {
    hw: f64,
    ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
struct FullReport {
    passed: bool,
    verify: VerifyReport,
    extremal: ScanTable,
    extremal_passed: bool,
    /// `sinh(x) / (e^x - 1)`.
    factor_comparison: Vec<FactorRow>,
    bound_check: Option<BoundCheckReport>,
}

fn load_dist(path: &PathBuf) -> Result<SymmetricDiscreteDistribution> {
    SymmetricDiscreteDistribution::from_json(&std::fs::read_to_string(path)?)
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn verify(r: &RegionArgs) -> Result<VerifyReport> {
    let (lo, hi) = r.range;
    let cfg = StructureConfig { lo, hi, depth: r.depth, boundary_margin: r.margin, ..Default::default() };
    let (battery, (structure, boxes)) = rayon::join(
        || verify_paper_battery(&ProverConfig::default()),
        || {
            let boxes = || -> Result<Vec<CertifyResult>> {
                [(ProofExpr::DCase1, Case::Case1), (ProofExpr::DCase2, Case::Case2)]
                    .iter()
                    .map(|&(e, c)| certify_negative(e, &BoxRegion::cube(lo, hi, c)?, r.depth))
                    .collect()
            };
            (crate::region::verify_case_structure(&cfg), boxes())
        },
    );
    let (structure, default_boxes) = (structure?, boxes?);
    let passed = battery.all_certified && structure.all_passed && default_boxes.iter().all(CertifyResult::is_certified);
    Ok(VerifyReport { passed, battery, structure, default_boxes })
}

fn scan(e: &ExtremalArgs) -> Result<(ScanTable, bool)> {
    let t = scan_family(e.family.into(), TiltParams::new(e.h, e.w)?, &e.sigma)?;
    let clean = t.rows.iter().all(|r| r.bound_violations == 0 && r.max_constraint_residual <= 1e-10);
    Ok((t.clone(), clean && t.strictly_below_factor()))
}

fn verify_text(v: &VerifyReport, out: &mut String) {
    for e in &v.battery.entries {
        let ok = if e.status == EntryStatus::Certified { "ok" } else { "FAIL" };
        let _ = writeln!(out, "battery {:<32} {:<4} {}", e.member.id, ok, e.detail);
    }
    for c in &v.structure.checks {
        let s = match c.status {
            CheckStatus::Passed => "ok",
            CheckStatus::BoundaryExpected => "boundary",
            CheckStatus::Failed => "FAIL",
        };
        let _ = writeln!(out, "region  {:<32} {:<4} {}", c.name, s, c.detail);
    }
    for b in &v.default_boxes {
        let s = if b.is_certified() { "ok" } else { "FAIL" };
        let _ = writeln!(out, "box     {:<32} {:<4} {} leaves on {}", b.expr, s, b.certified_leaves, b.region);
    }
    let _ = writeln!(out, "verify-proof: {}", if v.passed { "passed" } else { "FAILED" });
}

fn scan_text(t: &ScanTable, out: &mut String) {
    let _ = writeln!(out, "{:>12} {:>14} {:>12} {:>12} {:>12}", "sigma", "sup", "ratio", "factor", "gap");
    for r in &t.rows {
        let _ = writeln!(out, "{:>12} {:>14.6e} {:>12.8} {:>12.8} {:>12.4e}", r.sigma, r.sup, r.ratio, r.bound_factor, r.gap);
    }
}

/// Executes one subcommand. Exit status 0 means every check in the report
/// passed; boundary-expected undecided boxes count as passing.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let fmt = cfg.format;
    let ok = |pass: bool, output: String| Ok(RunOutcome { exit_code: if pass { 0 } else { 1 }, output });
    match &cfg.command {
        Command::Eval(a) => {
            let d = load_dist(&a.dist)?;
            let p = TiltParams::new(a.h, a.w)?;
            let r = EvalReport { h: a.h, w: a.w, tilted_mean: tilted_mean(&d, p), second_moment: d.second_moment() };
            let out = match fmt {
                Format::Json => json(&r)?,
                Format::Csv => csv_rows(&["h", "w", "tilted_mean", "second_moment"], &[vec![r.h, r.w, r.tilted_mean, r.second_moment]])?,
                Format::Text => format!("E_(h,w) X = {:.12e}  (E X^2 = {:.12e})\n", r.tilted_mean, r.second_moment),
            };
            ok(true, out)
        }
        Command::BoundCheck(a) => {
            let d = load_dist(&a.dist)?;
            let bound = check_bound(&d, TiltParams::new(a.h, a.w)?)?;
            let r = BoundCheckReport { h: a.h, w: a.w, bound };
            let b = &r.bound;
            let out = match fmt {
                Format::Json => json(&r)?,
                Format::Csv => csv_rows(
                    &["h", "w", "mean", "second_moment", "factor", "bound", "margin"],
                    &[vec![r.h, r.w, b.mean, b.second_moment, b.factor, b.bound, b.margin]],
                )?,
                Format::Text => format!(
                    "tilted mean {:.12e} vs bound {:.12e}: margin {:.12e}, {}\n",
                    b.mean,
                    b.bound,
                    b.margin,
                    if b.holds { "holds" } else { "VIOLATED" }
                ),
            };
            ok(b.holds, out)
        }
        Command::Prove { expr, depth } => {
            let poly = parse_expr(expr)?;
            let decision = decide_sign(&poly, &ProverConfig { max_depth: *depth, ..Default::default() });
            let replayed = decision.certificate().is_some_and(|c| c.replay().is_ok());
            let r = ProveReport {
                expr: expr.clone(),
                normalized: poly.to_string(),
                status: if decision.certificate().is_none() { "undetermined" } else if replayed { "certified" } else { "replay_failed" },
                sign: decision.sign().map(|s| s.to_string()),
                replayed,
                decision,
            };
            let out = match fmt {
                Format::Json => json(&r)?,
                _ => match &r.decision {
                    Decision::Certified(c) => format!(
                        "{}: {} on w > 0 ({} certificate nodes, {})\n",
                        r.normalized,
                        c.claim,
                        c.size(),
                        if replayed { "replayed" } else { "REPLAY FAILED" }
                    ),
                    Decision::Undetermined(u) => format!("{}: {u}\n", r.normalized),
                },
            };
            ok(replayed, out)
        }
        Command::VerifyProof(r) => {
            let v = verify(r)?;
            let out = match fmt {
                Format::Json => json(&v)?,
                _ => {
                    let mut s = String::new();
                    verify_text(&v, &mut s);
                    s
                }
            };
            ok(v.passed, out)
        }
        Command::Extremal(e) => {
            let (t, pass) = scan(e)?;
            let out = match fmt {
                Format::Json => json(&t)?,
                Format::Csv => t.to_csv()?,
                Format::Text => {
                    let mut s = String::new();
                    scan_text(&t, &mut s);
                    s
                }
            };
            ok(pass, out)
        }
        Command::Report { region, extremal, dist } => {
            let verify = verify(region)?;
            let (extremal, extremal_passed) = scan(extremal)?;
            let factor_comparison = [1.0f64, 5.0, 10.0, 20.0]
                .iter()
                .map(|&hw| FactorRow { hw, ratio: hw.sinh() / hw.exp_m1() })
                .collect();
            let bound_check = match dist {
                Some(path) => {
                    let p = TiltParams::new(1.0, 1.0)?;
                    Some(BoundCheckReport { h: 1.0, w: 1.0, bound: check_bound(&load_dist(path)?, p)? })
                }
                None => None,
            };
            let passed =
                verify.passed && extremal_passed && bound_check.as_ref().is_none_or(|b| b.bound.holds);
            let r = FullReport { passed, verify, extremal, extremal_passed, factor_comparison, bound_check };
            let out = match fmt {
                Format::Text => {
                    let mut s = String::new();
                    verify_text(&r.verify, &mut s);
                    scan_text(&r.extremal, &mut s);
                    let _ = writeln!(s, "report: {}", if r.passed { "passed" } else { "FAILED" });
                    s
                }
                _ => json(&r)?,
            };
            ok(r.passed, out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("tiltcheck").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0.05:8").unwrap(), (0.05, 8.0));
        assert!(parse_range("8:1").is_err());
        assert!(parse_range("1").is_err());
        assert!(parse_range("-1:2").is_err());
    }

    #[test]
    fn prove_positive() {
        let out = run(&cfg(&["prove", "--expr", "exp(w) - 1 - w"])).unwrap();
        assert_eq!(out.exit_code, 0);
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["sign"], "positive");
        assert_eq!(v["status"], "certified");
    }

    #[test]
    fn prove_undetermined_exits_nonzero() {
        let out = run(&cfg(&["prove", "--expr", "w - 1"])).unwrap();
        assert_eq!(out.exit_code, 1);
    }

    #[test]
    fn invalid_configs() {
        assert!(run(&cfg(&["prove", "--expr", "w", "--depth", "0"])).is_err());
        assert!(run(&cfg(&["verify-proof", "--format", "csv"])).is_err());
        assert!(run(&cfg(&["verify-proof", "--margin", "0"])).is_err());
        assert!(run(&cfg(&["prove", "--expr", "exp("])).is_err());
        assert!(RunConfig::try_parse_from(["tiltcheck"]).is_err());
    }

    #[test]
    fn extremal_csv() {
        let out = run(&cfg(&["extremal", "--sigma", "0.5,0.1", "--format", "csv"])).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.output.lines().count(), 3);
    }
}
