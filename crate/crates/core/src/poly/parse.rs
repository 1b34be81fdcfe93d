use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Polynomial, Rat, Ring};
use crate::{Error, Result};

/// Recursive descent parser for `+ - * ^ ( )`, rational literals and
/// ring variables. Division is only allowed between integer literals.
pub(crate) struct Parser<'a> {
    ring: &'a Ring,
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(ring: &'a Ring, src: &'a str) -> Self {
        Parser { ring, src, bytes: src.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { input: self.src.to_string(), message: alloc::format!("{msg} at byte {}", self.pos) }
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

    pub(crate) fn parse(mut self) -> Result<Polynomial> {
        if self.peek().is_none() {
            return Err(self.err("empty input"));
        }
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc * self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.integer()?;
            let n: u32 = u32::try_from(n).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        self.src[start..self.pos].parse().map_err(|_| self.err("bad integer"))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.ring.nvars();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut den = BigInt::one();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                }
                Ok(Polynomial::constant(n, Rat::new(num, den)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len() {
                    let b = self.bytes[self.pos];
                    if b.is_ascii_alphanumeric() || b == b'_' || b == b'\'' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name: String = self.src[start..self.pos].into();
                match self.ring.index_of(&name) {
                    Some(i) => Ok(Polynomial::var(n, i)),
                    None => Err(self.err(&alloc::format!("unknown variable `{name}`"))),
                }
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::poly::{int, Ring};

    #[test]
    fn parses_products_and_powers() {
        let r = Ring::new(["x", "y", "z'"], None).unwrap();
        let p = r.parse("2*(x - y)^2 - z'*x").unwrap();
        let q = r.parse("2*x^2 - 4*x*y + 2*y^2 - x*z'").unwrap();
        assert_eq!(p, q);
        assert_eq!(r.parse("-3/6").unwrap().as_constant(), Some(crate::poly::rat(-1, 2)));
        assert_eq!(r.parse("x^0").unwrap().as_constant(), Some(int(1)));
    }

    #[test]
    fn reports_errors() {
        let r = Ring::new(["x"], None).unwrap();
        for bad in ["", "x +", "w", "x^", "(x", "1/0", "x y"] {
            assert!(r.parse(bad).is_err(), "{bad}");
        }
    }
}
