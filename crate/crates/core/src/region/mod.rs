//! Interval certification of the multivariate sign claims.

pub mod boxes;
pub mod catalog;
pub mod certify;
pub mod interval;
pub mod structure;

pub use boxes::{BoxRegion, Case, Var};
pub use catalog::ProofExpr;
pub use certify::{certify_negative, eval_interval, CertifyResult, CertifyStatus, IntervalEnclosure};
pub use interval::{Dual, Interval, Real, Scalar};
pub use structure::{verify_case_structure, StructureConfig, StructureReport};
