//! Recursive-descent parser for the polynomial expression grammar:
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' ['-'] digits)?
//! atom   := number | variable | '(' expr ')'
//! number := digits ('/' digits)?
//! ```
//!
//! Variables are `x`, `y`, `z` (aliases `x1`, `x2`, `x3`); whitespace is
//! ignored. Negative exponents are rejected unless parsing with a designated
//! Laurent variable, and then only directly on that variable.

use super::{Mono, Poly, NVARS};
use crate::Rat;
use num_bigint::BigInt;
use num_traits::{Pow, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { offset: usize, name: String },
    #[error("negative exponent at byte {offset} in a non-Laurent context")]
    NegativeExponent { offset: usize },
}

impl Poly {
    pub fn parse(text: &str) -> Result<Poly, ParseError> {
        Parser::new(text, None).run()
    }

    /// Parses with negative exponents permitted on variable `var`.
    pub fn parse_laurent(text: &str, var: usize) -> Result<Poly, ParseError> {
        assert!(var < NVARS);
        Parser::new(text, Some(var)).run().map(|p| p.with_laurent(var))
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    laurent: Option<usize>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, laurent: Option<usize>) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            laurent,
        }
    }

    fn run(mut self) -> Result<Poly, ParseError> {
        let p = self.expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.syntax("unexpected trailing input"));
        }
        Ok(p)
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = if self.eat(b'-') {
            -self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let atom_pos = {
            self.skip_ws();
            self.pos
        };
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let exp_pos = {
            self.skip_ws();
            self.pos
        };
        let neg = self.eat(b'-');
        let digits = self.digits()?;
        let exp: i32 = digits
            .parse()
            .map_err(|_| self.syntax("exponent out of range"))?;
        if exp > 4096 {
            return Err(self.syntax("exponent out of range"));
        }
        if !neg {
            return Ok(base.pow(exp as u32));
        }
        // Negative exponents: only on the Laurent variable or a nonzero constant.
        if let Some(c) = base.as_constant() {
            if c.is_zero() {
                return Err(ParseError::Syntax {
                    offset: atom_pos,
                    message: "zero raised to a negative power".to_string(),
                });
            }
            return Ok(Poly::constant(Pow::pow(c, -(exp as i64))));
        }
        match self.laurent {
            Some(v) if base == Poly::var(v) => {
                let mut e = [0; NVARS];
                e[v] = -exp;
                Ok(Poly::monomial(Mono(e), Rat::from_integer(BigInt::from(1))))
            }
            _ => Err(ParseError::NegativeExponent { offset: exp_pos }),
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits()?.parse().expect("digit run");
                if self.eat(b'/') {
                    let den_pos = self.pos;
                    let den: BigInt = self.digits()?.parse().expect("digit run");
                    if den.is_zero() {
                        return Err(ParseError::Syntax {
                            offset: den_pos,
                            message: "zero denominator".to_string(),
                        });
                    }
                    Ok(Poly::constant(Rat::new(num, den)))
                } else {
                    Ok(Poly::constant(Rat::from_integer(num)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && self.bytes[self.pos].is_ascii_alphanumeric()
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos])
                    .expect("ascii")
                    .to_string();
                match name.as_str() {
                    "x" | "x1" => Ok(Poly::var(0)),
                    "y" | "x2" => Ok(Poly::var(1)),
                    "z" | "x3" => Ok(Poly::var(2)),
                    _ => Err(ParseError::UnknownVariable {
                        offset: start,
                        name,
                    }),
                }
            }
            _ => Err(self.syntax("expected a number, variable or `(`")),
        }
    }

    fn digits(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected digits"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii")
            .to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_loop_surface() {
        let p = Poly::parse("y^2 - x^2*(x+z)").unwrap();
        let q = Poly::parse("x2^2 - x1^3 - x1^2*x3").unwrap();
        assert_eq!(p, q);
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn zero_and_whitespace() {
        assert!(Poly::parse("0").unwrap().is_zero());
        assert_eq!(
            Poly::parse(" ( x + y ) ^ 2 ").unwrap(),
            Poly::parse("x^2+2*x*y+y^2").unwrap()
        );
    }

    #[test]
    fn rational_literals() {
        assert_eq!(
            Poly::parse("1/3*y^3").unwrap(),
            Poly::parse("y^3").unwrap().scale(&Rat::new(1.into(), 3.into()))
        );
        assert!(matches!(
            Poly::parse("1/0"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn error_offsets() {
        match Poly::parse("x + w^2") {
            Err(ParseError::UnknownVariable { offset, name }) => {
                assert_eq!(offset, 4);
                assert_eq!(name, "w");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Poly::parse("x^-1"),
            Err(ParseError::NegativeExponent { offset: 2 })
        ));
        assert!(Poly::parse_laurent("x^-1", 0).is_ok());
        assert!(matches!(
            Poly::parse_laurent("y^-1", 0),
            Err(ParseError::NegativeExponent { .. })
        ));
        assert!(matches!(
            Poly::parse("x + "),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn constant_negative_power_is_a_unit() {
        assert_eq!(
            Poly::parse("2^-1*x").unwrap(),
            Poly::parse("1/2*x").unwrap()
        );
    }
}
