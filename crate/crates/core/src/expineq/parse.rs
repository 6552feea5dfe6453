//! Infix grammar for exp-polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*       division by constants only
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := number | 'w' | fn '(' expr ')' | '(' expr ')'
//! fn     := 'exp' | 'sinh' | 'cosh'          argument must be k*w, k integer
//! ```
//! Numbers may carry a decimal point; they are read exactly.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::ExpPoly;
use super::rational::Q;
use crate::error::{Error, Result};

pub fn parse_expr(src: &str) -> Result<ExpPoly> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ExpPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExpPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                let c = as_constant(&d).ok_or(Error::Parse { pos: at, msg: "can only divide by a constant".into() })?;
                if c.is_zero() {
                    return Err(Error::Parse { pos: at, msg: "division by zero".into() });
                }
                acc = acc.scale(&c.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ExpPoly> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExpPoly> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        let at = self.pos;
        let n = self.integer()?;
        let n: u32 = n.try_into().map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() })?;
        if !negative {
            return Ok(base.pow(n));
        }
        // Only units c * t^k can be inverted.
        let mut terms = base.terms();
        match (terms.next(), terms.next()) {
            (Some((0, k, c)), None) => {
                let inv = c.recip();
                Ok(ExpPoly::monomial(num_traits::pow(inv, n as usize), 0, -k * n as i32))
            }
            _ => Err(Error::Parse { pos: at, msg: "negative exponent on a non-unit".into() }),
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })
    }

    fn number(&mut self) -> Result<Q> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let whole = &self.src[start..self.pos];
        let mut digits = String::from_utf8(whole.to_vec()).unwrap();
        let mut scale = 0u32;
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            digits.push_str(std::str::from_utf8(&self.src[fs..self.pos]).unwrap());
            scale = (self.pos - fs) as u32;
        }
        if digits.is_empty() {
            return Err(Error::Parse { pos: start, msg: "malformed number".into() });
        }
        let n: BigInt = digits.parse().map_err(|_| Error::Parse { pos: start, msg: "malformed number".into() })?;
        Ok(Q::new(n, num_traits::pow(BigInt::from(10), scale as usize)))
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn atom(&mut self) -> Result<ExpPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(ExpPoly::constant(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident().to_string();
                match name.as_str() {
                    "w" => Ok(ExpPoly::w()),
                    "exp" | "sinh" | "cosh" => {
                        self.expect(b'(')?;
                        let arg_at = self.pos;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        let k = as_integer_multiple_of_w(&arg).ok_or(Error::Parse {
                            pos: arg_at,
                            msg: "exponential arguments must be k*w with integer k".into(),
                        })?;
                        let half = super::rational::frac(1, 2);
                        Ok(match name.as_str() {
                            "exp" => ExpPoly::exp_w(k),
                            "sinh" => ExpPoly::monomial(half.clone(), 0, k) - ExpPoly::monomial(half, 0, -k),
                            _ => ExpPoly::monomial(half.clone(), 0, k) + ExpPoly::monomial(half, 0, -k),
                        })
                    }
                    _ => Err(Error::Parse { pos: start, msg: format!("unknown identifier {name:?}") }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn as_constant(p: &ExpPoly) -> Option<Q> {
    if p.is_zero() {
        return Some(Q::zero());
    }
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((0, 0, c)), None) => Some(c.clone()),
        _ => None,
    }
}

fn as_integer_multiple_of_w(p: &ExpPoly) -> Option<i32> {
    if p.is_zero() {
        return Some(0);
    }
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((1, 0, c)), None) if c.denom().is_one() => c.numer().try_into().ok(),
        _ => None,
    }
}
