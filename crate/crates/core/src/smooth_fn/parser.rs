//! Recursive-descent parser for the coefficient grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' int)?
//! base   := number | 'x' | '(' expr ')'
//!         | ('sin'|'cos'|'exp'|'-') '(' expr ')' | '-' base
//! ```
//!
//! Numbers are decimals with an optional exponent and an optional trailing
//! `i` marking an imaginary literal. Unary minus binds tighter than `^`, so
//! `-x^2` reads as `(-x)^2`.

use thiserror::Error;

use super::SmoothExpr;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected end of input at offset {offset}, expected {expected}")]
    UnexpectedEnd { offset: usize, expected: &'static str },
    #[error("unexpected character {found:?} at offset {offset}, expected {expected}")]
    UnexpectedChar {
        offset: usize,
        found: char,
        expected: &'static str,
    },
    #[error("unknown identifier {name:?} at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("malformed number at offset {offset}")]
    InvalidNumber { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnexpectedEnd { offset, .. }
            | ParseError::UnexpectedChar { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::InvalidNumber { offset } => *offset,
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse_expr(source: &str) -> Result<SmoothExpr, ParseError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(e),
        Some(c) => Err(ParseError::UnexpectedChar {
            offset: p.pos,
            found: c as char,
            expected: "operator or end of input",
        }),
    }
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, want: u8, expected: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(ParseError::UnexpectedChar {
                offset: self.pos,
                found: c as char,
                expected,
            }),
            None => Err(ParseError::UnexpectedEnd {
                offset: self.pos,
                expected,
            }),
        }
    }

    fn expr(&mut self) -> Result<SmoothExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = SmoothExpr::Add(lhs.into(), rhs.into());
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = SmoothExpr::Sub(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<SmoothExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = SmoothExpr::Mul(lhs.into(), rhs.into());
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = SmoothExpr::Div(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<SmoothExpr, ParseError> {
        let base = self.base()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer()?;
            return Ok(SmoothExpr::Pow(base.into(), n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(match self.peek() {
                None => ParseError::UnexpectedEnd {
                    offset: self.pos,
                    expected: "integer exponent",
                },
                Some(c) => ParseError::UnexpectedChar {
                    offset: self.pos,
                    found: c as char,
                    expected: "integer exponent",
                },
            });
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError::InvalidNumber { offset: start })
    }

    fn base(&mut self) -> Result<SmoothExpr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::UnexpectedEnd {
                offset: self.pos,
                expected: "expression",
            }),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')', "')'")?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                let inner = self.base()?;
                Ok(SmoothExpr::Neg(inner.into()))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let wrap: fn(SmoothExpr) -> SmoothExpr = match name {
                    "x" => return Ok(SmoothExpr::X),
                    "sin" => |e| SmoothExpr::Sin(e.into()),
                    "cos" => |e| SmoothExpr::Cos(e.into()),
                    "exp" => |e| SmoothExpr::Exp(e.into()),
                    _ => {
                        return Err(ParseError::UnknownIdentifier {
                            offset: start,
                            name: name.to_string(),
                        })
                    }
                };
                self.expect(b'(', "'(' after function name")?;
                let arg = self.expr()?;
                self.expect(b')', "')'")?;
                Ok(wrap(arg))
            }
            Some(c) => Err(ParseError::UnexpectedChar {
                offset: self.pos,
                found: c as char,
                expected: "expression",
            }),
        }
    }

    fn number(&mut self) -> Result<SmoothExpr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.peek(), Some(c) if c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ParseError::InvalidNumber { offset: start });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // not an exponent after all
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let v: f64 = text
            .parse()
            .map_err(|_| ParseError::InvalidNumber { offset: start })?;
        let imaginary = self.peek() == Some(b'i')
            && !matches!(self.src.get(self.pos + 1), Some(c) if c.is_ascii_alphanumeric());
        if imaginary {
            self.pos += 1;
            Ok(SmoothExpr::Const(Scalar::new(0.0, v)))
        } else {
            Ok(SmoothExpr::Const(Scalar::new(v, 0.0)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert!(matches!(parse_expr("sin(x)").unwrap(), SmoothExpr::Sin(_)));
        let p = parse_expr("0.5*x^2 + 1").unwrap();
        assert!(matches!(p, SmoothExpr::Add(_, _)));
        assert_eq!(p.evaluate(2.0).unwrap(), Scalar::new(3.0, 0.0));
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse_expr("sin(x").unwrap_err();
        assert_eq!(err.offset(), 5);
        assert!(matches!(err, ParseError::UnexpectedEnd { .. }));
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_expr("2*tan(x)").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 2,
                name: "tan".into()
            }
        );
    }

    #[test]
    fn imaginary_and_exponent_literals() {
        let e = parse_expr("1.5e-1 + 2i").unwrap();
        assert_eq!(e.evaluate(0.0).unwrap(), Scalar::new(0.15, 2.0));
        let e = parse_expr("exp(-x) * x^-2").unwrap();
        let want = (-2.0f64).exp() / 4.0;
        assert!((e.evaluate(2.0).unwrap().re - want).abs() < 1e-15);
    }

    #[test]
    fn unary_minus_binds_tighter_than_power() {
        let e = parse_expr("-x^2").unwrap();
        assert_eq!(e.evaluate(3.0).unwrap(), Scalar::new(9.0, 0.0));
        let e = parse_expr("0 - x^2").unwrap();
        assert_eq!(e.evaluate(3.0).unwrap(), Scalar::new(-9.0, 0.0));
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let err = parse_expr("x x").unwrap_err();
        assert_eq!(err.offset(), 2);
    }
}
