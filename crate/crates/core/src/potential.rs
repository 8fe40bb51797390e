//! Power-law potentials `V(x) = Σ cᵢ x^βᵢ` and their text form.
//!
//! Grammar (whitespace allowed between tokens):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := number ['*' 'x' ['^' ['-'] number]]
//!         | 'x' ['^' ['-'] number]
//! number := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! Terms are kept sorted by exponent with duplicates merged, so
//! `"0.1*x^4 + x^2"` and `"x^2 + 0.1*x^4"` parse to the same value and
//! serialize to `"x^2 + 0.1*x^4"`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialExpression {
    terms: Vec<PowerTerm>,
}

impl PotentialExpression {
    /// Builds the canonical form: sorted by exponent, equal exponents merged,
    /// zero coefficients dropped.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut out: Vec<PowerTerm> = Vec::new();
        for (coefficient, exponent) in terms {
            if !coefficient.is_finite() || !exponent.is_finite() {
                return Err(Error::Usage("potential terms must be finite".into()));
            }
            match out.iter_mut().find(|t| t.exponent == exponent) {
                Some(t) => t.coefficient += coefficient,
                None => out.push(PowerTerm {
                    coefficient,
                    exponent,
                }),
            }
        }
        out.retain(|t| t.coefficient != 0.0);
        out.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        Ok(Self { terms: out })
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * x.powf(t.exponent))
            .sum()
    }

    pub fn min_exponent(&self) -> Option<f64> {
        self.terms.first().map(|t| t.exponent)
    }

    /// True when some term is singular at the origin.
    pub fn is_singular(&self) -> bool {
        self.terms.iter().any(|t| t.exponent < 0.0)
    }

    pub fn coefficient_of(&self, exponent: f64) -> f64 {
        self.terms
            .iter()
            .find(|t| t.exponent == exponent)
            .map_or(0.0, |t| t.coefficient)
    }

    /// γ for a centrifugal term `γ(γ+1)/x²`, taking the root `γ ≥ −1/2`.
    /// `None` without an `x^-2` term or when its coefficient is below −1/4.
    pub fn centrifugal_gamma(&self) -> Option<f64> {
        let c = self.coefficient_of(-2.0);
        if c == 0.0 || c < -0.25 {
            return None;
        }
        Some(0.5 * (-1.0 + (1.0 + 4.0 * c).sqrt()))
    }

    /// Recognizes `x^2 [+ γ(γ+1) x^-2] [+ A x^-α]` and returns `(γ, A, α)`.
    /// An `x^-2` term is always read as the centrifugal part; without a
    /// further spike term the result has `A = 0, α = 2`.
    pub fn as_spiked(&self) -> Option<(f64, f64, f64)> {
        if self.coefficient_of(2.0) != 1.0 {
            return None;
        }
        let mut gamma = 0.0;
        let mut spike = None;
        for t in &self.terms {
            match t.exponent {
                e if e == 2.0 => {}
                e if e == -2.0 => gamma = self.centrifugal_gamma()?,
                e if e < 0.0 && spike.is_none() => spike = Some((t.coefficient, -e)),
                _ => return None,
            }
        }
        let (a, alpha) = spike.unwrap_or((0.0, 2.0));
        Some((gamma, a, alpha))
    }
}

impl fmt::Display for PotentialExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mag = t.coefficient.abs();
            match (i, t.coefficient < 0.0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if t.exponent == 0.0 {
                write!(f, "{mag}")?;
                continue;
            }
            if mag != 1.0 {
                write!(f, "{mag}*")?;
            }
            f.write_str("x")?;
            if t.exponent != 1.0 {
                write!(f, "^{}", t.exponent)?;
            }
        }
        Ok(())
    }
}

impl FromStr for PotentialExpression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_potential(s)
    }
}

pub fn parse_potential(text: &str) -> Result<PotentialExpression> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut terms = Vec::new();
    p.skip_ws();
    let mut sign = 1.0;
    if p.eat(b'-') {
        sign = -1.0;
    }
    loop {
        p.skip_ws();
        let (c, e) = p.term()?;
        terms.push((sign * c, e));
        p.skip_ws();
        match p.peek() {
            None => break,
            Some(b'+') => sign = 1.0,
            Some(b'-') => sign = -1.0,
            Some(_) => return Err(p.error("expected '+', '-' or end of input")),
        }
        p.pos += 1;
    }
    PotentialExpression::from_terms(terms)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn term(&mut self) -> Result<(f64, f64)> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok((1.0, self.exponent()?))
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => {
                let c = self.number()?;
                self.skip_ws();
                if !self.eat(b'*') {
                    if self.peek() == Some(b'x') {
                        return Err(self.error("missing '*' between coefficient and x"));
                    }
                    return Ok((c, 0.0));
                }
                self.skip_ws();
                if !self.eat(b'x') {
                    return Err(self.error("expected 'x' after '*'"));
                }
                Ok((c, self.exponent()?))
            }
            _ => Err(self.error("expected a number or 'x'")),
        }
    }

    fn exponent(&mut self) -> Result<f64> {
        self.skip_ws();
        if !self.eat(b'^') {
            return Ok(1.0);
        }
        self.skip_ws();
        let neg = self.eat(b'-');
        self.skip_ws();
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.peek(), Some(b) if b.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.eat(b'.') {
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if !self.eat(b'+') {
                self.eat(b'-');
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.error("malformed exponent in number"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("invalid number '{text}'"),
        })
    }
}
