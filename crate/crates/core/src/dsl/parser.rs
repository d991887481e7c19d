//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary | unary)*      juxtaposition multiplies
//! unary    := '-' unary | factor
//! factor   := base ('^' exponent)?
//! base     := number | 'x' | '(' expr ')' | 'ln' '(' expr ')'
//! exponent := '-'? integer | '(' '-'? integer ('/' integer)? ')'
//! ```
//! Numbers may carry a decimal part, which is read exactly.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{canon::Canon, Affine, Expr, ParseError};
use crate::poly::Rational;

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(&format!("unexpected character {:?}", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            position: self.pos.min(self.chars.len()),
            message: message.to_string(),
        }
    }

    fn error_at(&self, position: usize, message: &str) -> ParseError {
        ParseError {
            position,
            message: message.to_string(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat('-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_base(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.' || c == 'x' || c == '(' || c == 'l')
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::mul(lhs, self.unary()?);
            } else if self.eat('/') {
                lhs = Expr::div(lhs, self.unary()?);
            } else if self.starts_base() {
                lhs = Expr::mul(lhs, self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exp_pos = self.pos;
        let q = self.exponent()?;
        if q.is_integer() {
            let n: i64 = q
                .to_integer()
                .try_into()
                .map_err(|_| self.error_at(exp_pos, "exponent out of range"))?;
            return Ok(Expr::pow(base, n));
        }
        match affine_of(&base) {
            Some(a) => Ok(Expr::AffinePow(a, q)),
            None => Err(self.error_at(
                start,
                "rational powers are only allowed of affine arguments c0 + c1*x",
            )),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('x') => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Expr::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let mut name = String::new();
                while let Some(c) = self.peek().filter(char::is_ascii_alphabetic) {
                    name.push(c);
                    self.pos += 1;
                }
                if name != "ln" {
                    return Err(self.error_at(start, &format!("unknown identifier {name:?}")));
                }
                self.expect('(')?;
                self.skip_ws();
                let arg_pos = self.pos;
                let arg = self.expr()?;
                self.expect(')')?;
                affine_of(&arg).map(Expr::Ln).ok_or_else(|| {
                    self.error_at(arg_pos, "ln is only allowed of affine arguments c0 + c1*x")
                })
            }
            Some(c) => Err(self.error(&format!("unexpected character {c:?}"))),
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        let start = self.pos;
        let int_part = self.digits();
        let mut frac_part = String::new();
        if self.peek() == Some('.') {
            self.pos += 1;
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(self.error_at(start, "malformed number"));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits
            .parse()
            .map_err(|_| self.error_at(start, "malformed number"))?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Rational::new(numer, denom))
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let negative = self.eat('-');
        self.skip_ws();
        let d = self.digits();
        if d.is_empty() {
            return Err(self.error("expected an integer"));
        }
        let v: BigInt = d.parse().map_err(|_| self.error("malformed integer"))?;
        Ok(if negative { -v } else { v })
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        if self.eat('(') {
            let p = self.integer()?;
            let q = if self.eat('/') {
                let pos = self.pos;
                let q = self.integer()?;
                if q.is_zero() {
                    return Err(self.error_at(pos, "zero denominator in exponent"));
                }
                q
            } else {
                BigInt::one()
            };
            self.expect(')')?;
            Ok(Rational::new(p, q))
        } else {
            Ok(Rational::from_integer(self.integer()?))
        }
    }
}

fn affine_of(e: &Expr) -> Option<Affine> {
    Affine::from_poly(&Canon::from_expr(e).ok()?.as_polynomial()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    #[test]
    fn accepts_typical_test_functions() {
        let e = parse("ln(1-x)").unwrap();
        assert_eq!(
            e,
            Expr::Ln(Affine {
                c0: rat(1),
                c1: rat(-1)
            })
        );
        let e = parse("(1+x)*ln(1+x)").unwrap();
        assert!(matches!(e, Expr::Mul(..)));
        let e = parse("(1-x)^(3/2)").unwrap();
        assert_eq!(
            e,
            Expr::AffinePow(
                Affine {
                    c0: rat(1),
                    c1: rat(-1)
                },
                ratio(3, 2)
            )
        );
        assert_eq!(parse("x^-2").unwrap(), Expr::pow(Expr::X, -2));
        assert_eq!(parse("2x").unwrap(), Expr::mul(Expr::int(2), Expr::X));
        assert_eq!(parse("0.125").unwrap(), Expr::Const(ratio(1, 8)));
    }

    #[test]
    fn rejects_non_affine_arguments() {
        let err = parse("ln(x^2)").unwrap_err();
        assert_eq!(err.position, 3);
        assert!(parse("(1-x^2)^(1/2)").is_err());
        assert!(parse("ln(2)").is_err());
    }

    #[test]
    fn reports_positions() {
        assert_eq!(parse("1 + ").unwrap_err().position, 4);
        assert_eq!(parse("x + y").unwrap_err().position, 4);
        assert_eq!(parse("(1 - x").unwrap_err().position, 6);
        assert_eq!(parse("x^(1/0)").unwrap_err().position, 5);
        assert_eq!(parse("").unwrap_err().position, 0);
    }
}
