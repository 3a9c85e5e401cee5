//! Literal syntax for constructible reals: integers, decimals, `p/q`,
//! `sqrt(...)`, `+ - * /` and parentheses.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{FieldError, Rational, Real, Session};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("at offset {offset}: {source}")]
    Field {
        offset: usize,
        #[source]
        source: FieldError,
    },
}

/// Unevaluated literal; evaluating it may extend a session's tower.
#[derive(Debug, Clone, PartialEq)]
pub enum RealExpr {
    Num(Rational),
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>, usize),
    Sqrt(Box<RealExpr>, usize),
}

impl RealExpr {
    pub fn eval(&self, session: &Session) -> Result<Real, LiteralError> {
        Ok(match self {
            RealExpr::Num(q) => session.rational(q.clone()),
            RealExpr::Neg(a) => -a.eval(session)?,
            RealExpr::Add(a, b) => a.eval(session)? + b.eval(session)?,
            RealExpr::Sub(a, b) => a.eval(session)? - b.eval(session)?,
            RealExpr::Mul(a, b) => a.eval(session)? * b.eval(session)?,
            RealExpr::Div(a, b, offset) => a
                .eval(session)?
                .checked_div(&b.eval(session)?)
                .map_err(|source| LiteralError::Field { offset: *offset, source })?,
            RealExpr::Sqrt(a, offset) => a
                .eval(session)?
                .sqrt()
                .map_err(|source| LiteralError::Field { offset: *offset, source })?,
        })
    }

    /// The value when it is a plain rational (no square roots involved).
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            RealExpr::Num(q) => Some(q.clone()),
            RealExpr::Neg(a) => a.as_rational().map(|q| -q),
            RealExpr::Add(a, b) => Some(a.as_rational()? + b.as_rational()?),
            RealExpr::Sub(a, b) => Some(a.as_rational()? - b.as_rational()?),
            RealExpr::Mul(a, b) => Some(a.as_rational()? * b.as_rational()?),
            RealExpr::Div(a, b, _) => {
                let d = b.as_rational()?;
                (!d.is_zero()).then(|| a.as_rational().map(|n| n / d))?
            }
            RealExpr::Sqrt(..) => None,
        }
    }
}

pub fn parse_real(session: &Session, text: &str) -> Result<Real, LiteralError> {
    let (expr, end) = parse_expr_at(text, 0)?;
    let rest = skip_ws(text, end);
    if rest < text.len() {
        return Err(LiteralError::Syntax {
            offset: rest,
            expected: "end of input".into(),
        });
    }
    expr.eval(session)
}

/// Parse an expression starting at byte `start`; returns it together with
/// the offset just past it. Parsing stops at the first character that cannot
/// continue the expression.
pub fn parse_expr_at(text: &str, start: usize) -> Result<(RealExpr, usize), LiteralError> {
    let mut p = Parser { text, pos: start };
    let e = p.expr()?;
    Ok((e, p.pos))
}

fn skip_ws(text: &str, mut pos: usize) -> usize {
    let bytes = text.as_bytes();
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    pos
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<u8> {
        self.pos = skip_ws(self.text, self.pos);
        self.text.as_bytes().get(self.pos).copied()
    }

    fn fail<T>(&self, expected: &str) -> Result<T, LiteralError> {
        Err(LiteralError::Syntax {
            offset: self.pos,
            expected: expected.to_string(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<(), LiteralError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&format!("'{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<RealExpr, LiteralError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = RealExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = RealExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RealExpr, LiteralError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = RealExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    lhs = RealExpr::Div(Box::new(lhs), Box::new(self.unary()?), at);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<RealExpr, LiteralError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(RealExpr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<RealExpr, LiteralError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(b's') if self.text[self.pos..].starts_with("sqrt") => {
                let at = self.pos;
                self.pos += 4;
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(RealExpr::Sqrt(Box::new(e), at))
            }
            _ => self.fail("a number, 'sqrt(' or '('"),
        }
    }

    fn number(&mut self) -> Result<RealExpr, LiteralError> {
        let bytes = self.text.as_bytes();
        let start = self.pos;
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int: BigInt = self.text[start..self.pos].parse().expect("digits");
        let mut value = Rational::from_integer(int);
        if self.pos + 1 < bytes.len() && bytes[self.pos] == b'.' && bytes[self.pos + 1].is_ascii_digit() {
            self.pos += 1;
            let fstart = self.pos;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = &self.text[fstart..self.pos];
            let frac: BigInt = digits.parse().expect("digits");
            let scale = (0..digits.len()).fold(BigInt::one(), |acc, _| acc * 10);
            value += Rational::new(frac, scale);
        }
        Ok(RealExpr::Num(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_literal() {
        let s = Session::new();
        let phi = s.parse("(1+sqrt(5))/2").unwrap();
        // phi^2 = phi + 1
        assert!((&phi * &phi - &phi - s.one()).is_zero());
    }

    #[test]
    fn stops_at_foreign_characters() {
        let (e, end) = parse_expr_at("1/2, 3", 0).unwrap();
        assert_eq!(end, 3);
        assert!(e.as_rational().is_some());
    }

    #[test]
    fn decimals_are_exact() {
        let s = Session::new();
        assert_eq!(s.parse("0.25").unwrap(), s.ratio(1, 4));
    }

    #[test]
    fn errors_carry_offsets() {
        let s = Session::new();
        match s.parse("1 + * 2") {
            Err(LiteralError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            s.parse("sqrt(-1)"),
            Err(LiteralError::Field { source: FieldError::NegativeSqrt, .. })
        ));
        assert!(matches!(
            s.parse("1/0"),
            Err(LiteralError::Field { source: FieldError::DivisionByZero, .. })
        ));
    }
}
