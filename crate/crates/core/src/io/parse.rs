//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ('^' uint)*
//! atom     := rational | 'x' | 'y' | '(' expr ')'
//! rational := uint ('/' uint)?
//! ```
//!
//! Whitespace is insignificant and there is no implicit multiplication.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{Poly2, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error_at(&self, pos: usize, expected: Vec<&'static str>) -> ParseError {
        let (mut line, mut column) = (1, 1);
        for c in self.chars.iter().take(pos) {
            if *c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        let found = match self.chars.get(pos) {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        };
        ParseError {
            line,
            column,
            expected,
            found,
        }
    }

    fn error(&mut self, expected: Vec<&'static str>) -> ParseError {
        self.skip_ws();
        self.error_at(self.pos, expected)
    }

    fn uint(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(vec!["digit"]));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn expr(&mut self) -> Result<Poly2, ParseError> {
        let negate = self.eat('-');
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat('+') {
                acc += &self.term()?;
            } else if self.eat('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly2, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc * self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly2, ParseError> {
        let mut base = self.atom()?;
        while self.eat('^') {
            let at = self.pos;
            let n = self.uint()?;
            let n: u32 = n
                .try_into()
                .map_err(|_| self.error_at(at, vec!["exponent below 2^32"]))?;
            base = base.pow(n);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly2, ParseError> {
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                Ok(Poly2::x())
            }
            Some('y') => {
                self.pos += 1;
                Ok(Poly2::y())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(vec!["'+'", "'-'", "'*'", "'^'", "')'"]));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let mut den = BigInt::from(1);
                if self.eat('/') {
                    let at = self.pos;
                    den = self.uint()?;
                    if den.is_zero() {
                        return Err(self.error_at(at, vec!["nonzero denominator"]));
                    }
                }
                Ok(Poly2::constant(Rational::new(num, den)))
            }
            _ => Err(self.error(vec!["number", "'x'", "'y'", "'('"])),
        }
    }
}

pub fn parse_poly(text: &str) -> Result<Poly2, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error(vec!["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, MultiIndex};
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = Poly2> {
        let coeff = (-1_000_000i64..=1_000_000, 1i64..=999);
        prop::collection::vec((coeff, 0u32..7, 0u32..7), 0..8).prop_map(|ts| {
            Poly2::from_terms(
                ts.into_iter()
                    .map(|((n, d), i, j)| (MultiIndex::new(i, j), rat(n, d))),
            )
        })
    }

    #[test]
    fn examples() {
        let p = parse_poly("3/2*x^2*y - y^3").unwrap();
        assert_eq!(
            p,
            Poly2::from_terms([
                (MultiIndex::new(2, 1), rat(3, 2)),
                (MultiIndex::new(0, 3), rat(-1, 1))
            ])
        );
        assert_eq!(parse_poly("x*y").unwrap(), Poly2::x() * Poly2::y());
        assert_eq!(
            parse_poly(" (x + 1)^2 ").unwrap(),
            Poly2::x().pow(2) + Poly2::x().scale(&rat(2, 1)) + Poly2::one()
        );
        assert_eq!(parse_poly("-x - -0").unwrap_err().column, 6);
        assert_eq!(parse_poly("4/6").unwrap(), Poly2::constant(rat(2, 3)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_poly("x y").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
        assert!(e.expected.contains(&"'*'"));
        let e = parse_poly("x +\n  * y").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert_eq!(parse_poly("").unwrap_err().found, "end of input");
        assert_eq!(parse_poly("(x").unwrap_err().expected.last(), Some(&"')'"));
        assert_eq!(
            parse_poly("1/0").unwrap_err().expected,
            vec!["nonzero denominator"]
        );
        assert!(parse_poly("x^-1").is_err());
        assert!(parse_poly("2x").is_err());
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(p in arb_poly()) {
            prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }

        #[test]
        fn printing_canonicalizes(p in arb_poly()) {
            let once = parse_poly(&p.to_string()).unwrap().to_string();
            prop_assert_eq!(parse_poly(&once).unwrap().to_string(), once);
        }
    }
}
