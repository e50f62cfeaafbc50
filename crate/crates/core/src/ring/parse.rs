//! Small infix parser for polynomial expressions such as
//! `2*Q*c1 - c0*c1 + 1/2*c2^(-1)`.

use std::sync::Arc;

use super::field::Field;
use super::poly::LaurentPoly;
use super::vars::VarTable;
use super::RingError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character `{0}` at byte {1}")]
    Unexpected(char, usize),
    #[error("unexpected end of expression")]
    Eof,
    #[error("bad exponent at byte {0}")]
    BadExponent(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<F: Field> LaurentPoly<F> {
    pub fn parse(table: &Arc<VarTable>, src: &str) -> Result<Self, ParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let v = p.expr(table)?;
        p.skip_ws();
        match p.peek() {
            None => Ok(v),
            Some(c) => Err(ParseError::Unexpected(c as char, p.pos)),
        }
    }
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr<F: Field>(&mut self, t: &Arc<VarTable>) -> Result<LaurentPoly<F>, ParseError> {
        let mut acc = self.term(t)?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term(t)?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term(t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<F: Field>(&mut self, t: &Arc<VarTable>) -> Result<LaurentPoly<F>, ParseError> {
        let mut acc = self.factor(t)?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor(t)?;
            } else if self.eat(b'/') {
                acc = acc.exact_div(&self.factor(t)?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor<F: Field>(&mut self, t: &Arc<VarTable>) -> Result<LaurentPoly<F>, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.factor(t)?);
        }
        let base = self.atom(t)?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let e = self.exponent()?;
        if e >= 0 {
            Ok(base.pow(e as u32))
        } else {
            let inv = base.unit_inverse().ok_or(RingError::NotDivisible)?;
            Ok(inv.pow((-e) as u32))
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        let mut e: i64 = digits.parse().map_err(|_| ParseError::BadExponent(start))?;
        if neg {
            e = -e;
        }
        if paren && !self.eat(b')') {
            return Err(ParseError::BadExponent(start));
        }
        Ok(e)
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom<F: Field>(&mut self, t: &Arc<VarTable>) -> Result<LaurentPoly<F>, ParseError> {
        self.skip_ws();
        let Some(c) = self.peek() else { return Err(ParseError::Eof) };
        if c == b'(' {
            self.pos += 1;
            let v = self.expr(t)?;
            if !self.eat(b')') {
                return match self.peek() {
                    Some(c) => Err(ParseError::Unexpected(c as char, self.pos)),
                    None => Err(ParseError::Eof),
                };
            }
            Ok(v)
        } else if c.is_ascii_digit() {
            let digits = self.take_while(|c| c.is_ascii_digit());
            let n: i64 = digits.parse().map_err(|_| ParseError::Unexpected(c as char, self.pos))?;
            Ok(LaurentPoly::from_int(t, n))
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'');
            Ok(LaurentPoly::var(t, &name)?)
        } else {
            Err(ParseError::Unexpected(c as char, self.pos))
        }
    }
}
