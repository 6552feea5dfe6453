//! Closed forms of `d` and of the auxiliary expressions used in the case
//! analysis. Here `S = sinh(w)/w`, `sh = sinh`, `ch = cosh`.
//!
//! | id | closed form | relation to `d` |
//! |----|-------------|-----------------|
//! | `d_case1` | `(e^w-e^-u)u + (e^w-e^-v)v - S(e^w(u²+v²) + e^-v u² + e^-u v²)` | `d`, `w <= u <= v` |
//! | `d_case2` | `2u sh u + v(e^w-e^-v) - S(2 ch u v² + (e^w+e^-v)u²)` | `d`, `u <= w <= v` |
//! | `dv2_case1` | `e^-v(2-v) - S(e^-v u² + 2e^-u + 2e^w)` | `∂v² d` |
//! | `dv3_case1` | `e^-v(v - 3 + u² S)` | `∂v³ d` |
//! | `d2_case1` | `w(2-u) - sh w(u² + 2 + 2e^{u+w})` | `w e^u ∂v² d` at `v = u` |
//! | `dtilde_case1` | `2w(e^{u+2w} - e^w) - 2u sh w(e^{u+2w} + e^w)` | `e^{u+w}(w/u) d` at `v = u` |
//! | `d1_case1` | `w e^{u+w} - w + uw - sh w(2u e^{u+w} - u² + 2u)` | `w e^u ∂v d` at `v = u` |
//! | `d1_case2` | `w e^{v+w} - w + wv - sh w(4v e^v ch u - u²)` | `w e^v ∂v d` |
//! | `dv_d1_at_w_case2` | `e^w(e^w w - 4(w+1) ch u sh w) + w` | `∂v d1_case2` at `v = w` |
//! | `d11` | `e^w w(sh w + ch w - 3 ch u sh w) + (w-1)w` | `d11 + d12 = d1_case2` at `v = w` |
//! | `d12` | `(u² - e^w w ch u) sh w` | |
//! | `d111` | `e^w w(ch w - 2 sh w) + (w-1)w` | `d111 + d112 = d11` |
//! | `d112` | `-3(ch u - 1) e^w w sh w` | |
//! | `d_at_v_eq_w_case2` | `2u sh u + 2w sh w - 2w sh w ch u - 2S ch w u²` | `d` at `v = w` |

use serde::{Deserialize, Serialize};

use super::boxes::{Case, Var};
use super::interval::{Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofExpr {
    DCase1,
    DCase2,
    Dv2Case1,
    Dv3Case1,
    D2Case1,
    DtildeCase1,
    D1Case1,
    D1Case2,
    DvD1AtWCase2,
    D11,
    D12,
    D111,
    D112,
    DAtVEqWCase2,
}

use ProofExpr as P;
use Var::{U, V, W};

impl ProofExpr {
    pub const ALL: [ProofExpr; 14] = [
        P::DCase1,
        P::DCase2,
        P::Dv2Case1,
        P::Dv3Case1,
        P::D2Case1,
        P::DtildeCase1,
        P::D1Case1,
        P::D1Case2,
        P::DvD1AtWCase2,
        P::D11,
        P::D12,
        P::D111,
        P::D112,
        P::DAtVEqWCase2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            P::DCase1 => "d_case1",
            P::DCase2 => "d_case2",
            P::Dv2Case1 => "dv2_case1",
            P::Dv3Case1 => "dv3_case1",
            P::D2Case1 => "d2_case1",
            P::DtildeCase1 => "dtilde_case1",
            P::D1Case1 => "d1_case1",
            P::D1Case2 => "d1_case2",
            P::DvD1AtWCase2 => "dv_d1_at_w_case2",
            P::D11 => "d11",
            P::D12 => "d12",
            P::D111 => "d111",
            P::D112 => "d112",
            P::DAtVEqWCase2 => "d_at_v_eq_w_case2",
        }
    }

    pub fn from_id(id: &str) -> Option<ProofExpr> {
        Self::ALL.into_iter().find(|e| e.id() == id)
    }

    pub fn case(self) -> Case {
        match self {
            P::DCase1 | P::Dv2Case1 | P::Dv3Case1 | P::D2Case1 | P::DtildeCase1 | P::D1Case1 => Case::Case1,
            _ => Case::Case2,
        }
    }

    /// Variables the closed form depends on.
    pub fn vars(self) -> &'static [Var] {
        match self {
            P::DCase1 | P::DCase2 | P::Dv2Case1 | P::Dv3Case1 | P::D1Case2 => &[U, V, W],
            P::D111 => &[W],
            _ => &[U, W],
        }
    }

    /// Whether the argument claims the expression is negative on its case
    /// region (away from the degenerate boundary). `dv3_case1` only enters
    /// through its sign pattern.
    pub fn claims_negative(self) -> bool {
        self != P::Dv3Case1
    }

    pub fn eval<R: Real>(self, u: R, v: R, w: R) -> R {
        let c = R::cst;
        let s = w.sinhc();
        match self {
            P::DCase1 => {
                let (ew, emu, emv) = (w.exp(), (-u).exp(), (-v).exp());
                let (u2, v2) = (u.sqr(), v.sqr());
                u * (ew - emu) + v * (ew - emv) - s * (ew * (u2 + v2) + emv * u2 + emu * v2)
            }
            P::DCase2 => {
                let (ew, emv) = (w.exp(), (-v).exp());
                let (u2, v2) = (u.sqr(), v.sqr());
                c(2.0) * u * u.sinh() + v * (ew - emv) - s * (c(2.0) * u.cosh() * v2 + (ew + emv) * u2)
            }
            P::Dv2Case1 => {
                let emv = (-v).exp();
                emv * (c(2.0) - v) - s * (emv * u.sqr() + c(2.0) * (-u).exp() + c(2.0) * w.exp())
            }
            P::Dv3Case1 => (-v).exp() * (v - c(3.0) + u.sqr() * s),
            P::D2Case1 => w * (c(2.0) - u) - w.sinh() * (u.sqr() + c(2.0) + c(2.0) * (u + w).exp()),
            P::DtildeCase1 => {
                let (a, ew) = ((u + c(2.0) * w).exp(), w.exp());
                c(2.0) * w * (a - ew) - c(2.0) * u * w.sinh() * (a + ew)
            }
            P::D1Case1 => {
                let a = (u + w).exp();
                w * a - w + u * w - w.sinh() * (c(2.0) * u * a - u.sqr() + c(2.0) * u)
            }
            P::D1Case2 => {
                w * (v + w).exp() - w + w * v - w.sinh() * (c(4.0) * v * v.exp() * u.cosh() - u.sqr())
            }
            P::DvD1AtWCase2 => {
                let ew = w.exp();
                ew * (ew * w - c(4.0) * (w + c(1.0)) * u.cosh() * w.sinh()) + w
            }
            P::D11 => {
                let (sh, ch) = (w.sinh(), w.cosh());
                w.exp() * w * (sh + ch - c(3.0) * u.cosh() * sh) + (w - c(1.0)) * w
            }
            P::D12 => (u.sqr() - w.exp() * w * u.cosh()) * w.sinh(),
            P::D111 => w.exp() * w * (w.cosh() - c(2.0) * w.sinh()) + (w - c(1.0)) * w,
            P::D112 => -(c(3.0) * (u.cosh() - c(1.0)) * w.exp() * w * w.sinh()),
            P::DAtVEqWCase2 => {
                let sh = w.sinh();
                c(2.0) * u * u.sinh() + c(2.0) * w * sh - c(2.0) * w * sh * u.cosh() - c(2.0) * s * w.cosh() * u.sqr()
            }
        }
    }
}

impl std::fmt::Display for ProofExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// `∂w d` in Case 3, `-2 (sinh w / w)' (v² ch u + u² ch v)`.
pub fn case3_dw_d<R: Scalar>(u: R, v: R, w: R) -> R {
    -(R::cst(2.0) * w.dsinhc() * (v.sqr() * u.cosh() + u.sqr() * v.cosh()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilted::d_expr;

    #[test]
    fn ids_round_trip_and_are_unique() {
        let mut ids: Vec<_> = ProofExpr::ALL.iter().map(|e| e.id()).collect();
        for e in ProofExpr::ALL {
            assert_eq!(ProofExpr::from_id(e.id()), Some(e));
        }
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 14);
    }

    #[test]
    fn d_forms_match_direct_evaluation() {
        assert!((P::DCase1.eval(1.0, 2.0, 1.0) - d_expr(1.0, 2.0, 1.0)).abs() < 1e-13);
        assert!((P::DCase2.eval(1.0, 1.0, 1.0) + 2.552916).abs() < 1e-6);
        assert!((P::DCase2.eval(0.3, 2.0, 1.1) - d_expr(0.3, 2.0, 1.1)).abs() < 1e-13);
        assert!((P::DAtVEqWCase2.eval(0.3, 0.0, 1.1) - d_expr(0.3, 1.1, 1.1)).abs() < 1e-13);
        assert_eq!(P::DAtVEqWCase2.eval(0.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn splits_add_up() {
        for (u, w) in [(0.2, 0.5), (1.0, 3.0), (0.01, 7.5)] {
            let lhs = P::D1Case2.eval(u, w, w);
            assert!((lhs - P::D11.eval(u, 0.0, w) - P::D12.eval(u, 0.0, w)).abs() < 1e-12 * lhs.abs().max(1.0));
            let d11 = P::D11.eval(u, 0.0, w);
            assert!((d11 - P::D111.eval(0.0, 0.0, w) - P::D112.eval(u, 0.0, w)).abs() < 1e-12 * d11.abs().max(1.0));
        }
    }
}
