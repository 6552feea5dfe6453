//! Verification toolkit for Winsorized-tilted means of symmetric laws.
//!
//! * [`tilted`] evaluates `E_{h,w} X`, the sharp factors `sinh(hw)/w` and
//!   `(e^{hw} - 1)/w`, and the symmetrized expressions `g_j`, `d`.
//! * [`expineq`] decides the sign of one-variable exp-polynomials with
//!   exact, replayable certificates.
//! * [`region`] certifies the multivariate sign claims on bounded boxes
//!   with outward-rounded interval arithmetic.
//! * [`extremal`] searches for the largest tilted mean under moment
//!   constraints and reproduces the sharpness limit.
//! * [`cli`] ties these together behind the `tiltcheck` binary.

pub mod cli;
pub mod error;
pub mod expineq;
pub mod extremal;
pub mod region;
pub mod tilted;

pub use error::{Error, Result};
