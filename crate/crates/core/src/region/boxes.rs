use serde::{Deserialize, Serialize};

use super::interval::Interval;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    U,
    V,
    W,
}

impl Var {
    pub fn slot(self) -> usize {
        self as usize
    }
}

/// Ordering regions of `(u, v, w)` with `u <= v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `w <= u <= v`
    Case1,
    /// `u <= w <= v`
    Case2,
    /// `u <= v <= w`
    Case3,
}

impl Case {
    /// Variables from smallest to largest.
    pub fn order(self) -> [Var; 3] {
        match self {
            Case::Case1 => [Var::W, Var::U, Var::V],
            Case::Case2 => [Var::U, Var::W, Var::V],
            Case::Case3 => [Var::U, Var::V, Var::W],
        }
    }

    pub fn parse(s: &str) -> Option<Case> {
        match s {
            "1" | "case1" => Some(Case::Case1),
            "2" | "case2" => Some(Case::Case2),
            "3" | "case3" => Some(Case::Case3),
            _ => None,
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Case::Case1 => "case1 (w <= u <= v)",
            Case::Case2 => "case2 (u <= w <= v)",
            Case::Case3 => "case3 (u <= v <= w)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub u: Interval,
    pub v: Interval,
    pub w: Interval,
    pub case: Case,
}

impl BoxRegion {
    /// Validates bounds (finite, `0 <= lo <= hi`) and requires the box to
    /// meet the case region.
    pub fn new(u: (f64, f64), v: (f64, f64), w: (f64, f64), case: Case) -> Result<BoxRegion> {
        for (name, (lo, hi)) in [("u", u), ("v", v), ("w", w)] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::InvalidParams(format!("{name} bounds [{lo}, {hi}] must satisfy 0 <= lo <= hi")));
            }
        }
        let b = BoxRegion { u: Interval::new(u.0, u.1), v: Interval::new(v.0, v.1), w: Interval::new(w.0, w.1), case };
        if b.tightened(&[Var::U, Var::V, Var::W]).is_none() {
            return Err(Error::EmptyRegion(format!("box {b} does not meet {case}")));
        }
        Ok(b)
    }

    /// `[lo, hi]^3` in the given case.
    pub fn cube(lo: f64, hi: f64, case: Case) -> Result<BoxRegion> {
        BoxRegion::new((lo, hi), (lo, hi), (lo, hi), case)
    }

    pub fn get(&self, var: Var) -> Interval {
        match var {
            Var::U => self.u,
            Var::V => self.v,
            Var::W => self.w,
        }
    }

    pub fn set(&mut self, var: Var, iv: Interval) {
        match var {
            Var::U => self.u = iv,
            Var::V => self.v = iv,
            Var::W => self.w = iv,
        }
    }

    pub fn intervals(&self) -> [Interval; 3] {
        [self.u, self.v, self.w]
    }

    /// Shrinks the box to the smallest box containing its intersection with
    /// the case order restricted to `vars`; `None` if that is empty.
    pub fn tightened(&self, vars: &[Var]) -> Option<BoxRegion> {
        let chain: Vec<Var> = self.case.order().into_iter().filter(|v| vars.contains(v)).collect();
        let mut b = *self;
        for _ in 0..2 {
            for pair in chain.windows(2) {
                let (a, c) = (b.get(pair[0]), b.get(pair[1]));
                // a <= c
                let a_new = Interval { lo: a.lo, hi: a.hi.min(c.hi) };
                let c_new = Interval { lo: c.lo.max(a.lo), hi: c.hi };
                if a_new.lo > a_new.hi || c_new.lo > c_new.hi {
                    return None;
                }
                b.set(pair[0], a_new);
                b.set(pair[1], c_new);
            }
        }
        Some(b)
    }

    pub fn contains_point(&self, p: [f64; 3]) -> bool {
        self.intervals().iter().zip(p).all(|(iv, x)| iv.contains(x))
    }

    /// Whether a point satisfies the case ordering.
    pub fn in_case(case: Case, p: [f64; 3]) -> bool {
        let o = case.order();
        p[o[0].slot()] <= p[o[1].slot()] && p[o[1].slot()] <= p[o[2].slot()]
    }

    /// Halves every non-degenerate interval among `vars`. The children come
    /// in a fixed order: bit `i` of the index selects the upper half of
    /// `vars[i]`.
    pub fn bisect(&self, vars: &[Var]) -> Vec<BoxRegion> {
        let split: Vec<(Var, Interval, Interval)> = vars
            .iter()
            .filter_map(|&var| {
                let iv = self.get(var);
                let m = iv.mid();
                (iv.lo < m && m < iv.hi).then(|| (var, Interval::new(iv.lo, m), Interval::new(m, iv.hi)))
            })
            .collect();
        (0..1usize << split.len())
            .map(|idx| {
                let mut b = *self;
                for (i, (var, lower, upper)) in split.iter().enumerate() {
                    b.set(*var, if idx >> i & 1 == 1 { *upper } else { *lower });
                }
                b
            })
            .collect()
    }

    /// Largest width among `vars`.
    pub fn max_width(&self, vars: &[Var]) -> f64 {
        vars.iter().map(|&v| self.get(v).width()).fold(0.0, f64::max)
    }
}

impl std::fmt::Display for BoxRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "u in [{}, {}], v in [{}, {}], w in [{}, {}] ({})",
            self.u.lo, self.u.hi, self.v.lo, self.v.hi, self.w.lo, self.w.hi, self.case
        )
    }
}
