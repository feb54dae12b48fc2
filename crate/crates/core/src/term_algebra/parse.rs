//! Recursive-descent parser for right-hand sides.
//!
//! ```text
//! expr   := ["+"|"-"] term (("+"|"-") term)*
//! term   := factor ("*" factor)*
//! factor := number | "x" ["^" exponent] | "ln(x)" ["^" integer]
//!         | "sin(x)" | "cos(x)" | "(" expr ")"
//! exponent := signed_number | "(" signed_number ")"
//! number := decimal | integer "/" integer
//! ```
//!
//! `log(x)` is accepted as a synonym of `ln(x)`. Products are distributed
//! while parsing; a product of two trigonometric factors is rejected.

use num::rational::BigRational;
use num::{One, Signed, Zero};

use super::{Expr, Expression, Term, Trig};
use crate::error::{Error, Result};
use crate::scalar::parse_rational;

pub fn parse(source: &str) -> Result<Expr> {
    let mut p = Parser { src: source.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { pos: self.pos, message: message.to_string() }
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
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let start = self.pos;
            let rhs = self.factor()?;
            acc = acc.mul(&rhs).ok_or(Error::Parse {
                pos: start,
                message: "product of trigonometric factors is outside the supported class".into(),
            })?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        let one = BigRational::one;
        let zero = BigRational::zero;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                Ok(Expression::from_term(Term::constant(v)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.identifier();
                match name.as_str() {
                    "x" => {
                        let power = if self.eat(b'^') { self.exponent()? } else { one() };
                        Ok(Expression::from_term(Term::new(one(), power, 0, Trig::None)))
                    }
                    "ln" | "log" => {
                        self.argument_x()?;
                        let k = if self.eat(b'^') { self.log_power()? } else { 1 };
                        Ok(Expression::from_term(Term::new(one(), zero(), k, Trig::None)))
                    }
                    "sin" => {
                        self.argument_x()?;
                        Ok(Expression::from_term(Term::new(one(), zero(), 0, Trig::Sin)))
                    }
                    "cos" => {
                        self.argument_x()?;
                        Ok(Expression::from_term(Term::new(one(), zero(), 0, Trig::Cos)))
                    }
                    _ if self.peek() == Some(b'(') => Err(Error::UnsupportedFunction { name, pos: start }),
                    _ => Err(Error::Parse { pos: start, message: format!("unknown symbol `{}`", name) }),
                }
            }
            Some(_) => Err(self.error("expected a number, `x`, a function or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn argument_x(&mut self) -> Result<()> {
        self.expect(b'(')?;
        self.skip_ws();
        let start = self.pos;
        if self.identifier() != "x" {
            return Err(Error::Parse { pos: start, message: "only the argument `x` is supported".into() });
        }
        self.expect(b')')
    }

    fn exponent(&mut self) -> Result<BigRational> {
        if self.eat(b'(') {
            let v = self.signed_number()?;
            self.expect(b')')?;
            Ok(v)
        } else {
            self.signed_number()
        }
    }

    fn log_power(&mut self) -> Result<u32> {
        let start = self.pos;
        let v = self.number()?;
        if !v.is_integer() || v.is_negative() {
            return Err(Error::Parse { pos: start, message: "log power must be a non-negative integer".into() });
        }
        num::ToPrimitive::to_u32(&v.to_integer())
            .ok_or(Error::Parse { pos: start, message: "log power too large".into() })
    }

    fn signed_number(&mut self) -> Result<BigRational> {
        if self.eat(b'-') {
            Ok(-self.number()?)
        } else {
            self.eat(b'+');
            self.number()
        }
    }

    /// Decimal (optionally with exponent) or `p/q`.
    fn number(&mut self) -> Result<BigRational> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let mut value = parse_rational(text).ok_or(Error::Parse { pos: start, message: "malformed number".into() })?;
        let save = self.pos;
        if self.eat(b'/') {
            self.skip_ws();
            let den_start = self.pos;
            digits(self);
            if self.pos == den_start {
                self.pos = save;
                return Err(self.error("expected an integer denominator after `/`"));
            }
            let den = std::str::from_utf8(&self.src[den_start..self.pos])
                .ok()
                .and_then(parse_rational)
                .filter(|d| !d.is_zero())
                .ok_or(Error::Parse { pos: den_start, message: "zero denominator".into() })?;
            value /= den;
        }
        Ok(value)
    }
}
