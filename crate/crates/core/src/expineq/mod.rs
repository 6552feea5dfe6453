//! Exact sign certificates for exp-polynomials `P(w, e^w)` on `w > 0`.

pub mod battery;
pub mod expbound;
pub mod parse;
pub mod poly;
pub mod prover;
pub mod rational;
pub mod upoly;

pub use battery::{verify_paper_battery, BatteryReport, BATTERY};
pub use parse::parse_expr;
pub use poly::ExpPoly;
pub use prover::{
    boundary_sign_at_zero, decide_sign, BoundaryProbe, BoundarySign, Decision, ProverConfig, Sign, SignCertificate,
};
pub use upoly::{base_case_sign, BaseCaseSign, UPoly};
