//! Polynomial expressions with exact rational coefficients.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | identifier | '(' expr ')'
//! number := digits ('.' digits)? (('e' | 'E') '-'? digits)?
//! ```
//!
//! Division is only allowed by a nonzero constant. Exponents are literal
//! integers in `0..=MAX_EXPONENT`.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{One, Zero};

use crate::monomial::Monomial;
use crate::rational::{format_rational, parse_rational};

use super::ParseError;

pub const MAX_EXPONENT: u32 = 12;
/// Upper bound on the number of monomials an expression may expand to.
pub const MAX_TERMS: usize = 4096;
pub const MAX_DEGREE: u32 = 64;
const MAX_COEFF_BITS: u64 = 8192;

/// Sparse multivariate polynomial over the rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(pub BTreeMap<Monomial, BigRational>);

impl Poly {
    pub fn constant(c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::one(), c);
        }
        Self(m)
    }

    pub fn var(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Monomial::var(name), BigRational::one());
        Self(m)
    }

    pub fn max_degree(&self) -> u32 {
        self.0.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    fn add_in(&mut self, m: Monomial, c: BigRational) {
        let e = self.0.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_in(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_in(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.0 {
            out.add_in(m.clone(), c * k);
        }
        out
    }

    /// Canonical text accepted back by [`parse_poly`].
    pub fn to_text(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.0.iter().enumerate() {
            let neg = c < &BigRational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coeff = format_rational(&mag);
            match (m.is_one(), mag.is_one()) {
                (true, _) => s.push_str(&coeff),
                (false, true) => s.push_str(&m.to_string()),
                (false, false) => s.push_str(&format!("{coeff}*{m}")),
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a str,
    line: usize,
    col0: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, offset: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.col0 + self.src[..offset].chars().count(), message: msg.into() }
    }

    fn tokens(&self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let bytes = self.src.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'-' || bytes[j] == b'+') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &self.src[start..i];
                let q = parse_rational(text).ok_or_else(|| self.err(start, format!("invalid number `{text}`")))?;
                out.push((start, Tok::Num(q)));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(self.src[start..i].to_string())));
            } else if "+-*/^()".contains(c) {
                out.push((i, Tok::Op(c)));
                i += 1;
            } else {
                let ch = self.src[i..].chars().next().unwrap_or('?');
                return Err(self.err(i, format!("unexpected character `{ch}`")));
            }
        }
        Ok(out)
    }
}

struct Parser<'a, F: Fn(&str) -> bool> {
    lex: &'a Lexer<'a>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    known: F,
    depth: usize,
}

impl<F: Fn(&str) -> bool> Parser<'_, F> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.lex.src.len())
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        self.lex.err(self.offset(), msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn mul_checked(&self, a: &Poly, b: &Poly) -> Result<Poly, ParseError> {
        if a.0.len().saturating_mul(b.0.len()) > 16 * MAX_TERMS {
            return Err(self.err(format!("expression expands to more than {MAX_TERMS} terms")));
        }
        if a.max_degree() + b.max_degree() > MAX_DEGREE {
            return Err(self.err(format!("expression has degree above {MAX_DEGREE}")));
        }
        self.check_size(a.mul(b))
    }

    fn check_size(&self, p: Poly) -> Result<Poly, ParseError> {
        if p.0.len() > MAX_TERMS {
            return Err(self.err(format!("expression expands to more than {MAX_TERMS} terms")));
        }
        if p.0.values().any(|c| c.numer().bits() > MAX_COEFF_BITS || c.denom().bits() > MAX_COEFF_BITS) {
            return Err(self.err("coefficient too large"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        self.depth += 1;
        if self.depth > 64 {
            return Err(self.err("expression nested too deeply"));
        }
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.add(&rhs.neg()) };
            acc = self.check_size(acc)?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let at = self.offset();
            let rhs = self.unary()?;
            if c == '*' {
                acc = self.mul_checked(&acc, &rhs)?;
            } else {
                let d = rhs.as_constant().ok_or_else(|| self.lex.err(at, "division by a non-constant expression"))?;
                if d.is_zero() {
                    return Err(self.lex.err(at, "division by zero"));
                }
                acc = acc.scale(&(BigRational::one() / d));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                self.depth += 1;
                if self.depth > 64 {
                    return Err(self.err("expression nested too deeply"));
                }
                let v = self.unary()?.neg();
                self.depth -= 1;
                Ok(v)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.depth += 1;
                if self.depth > 64 {
                    return Err(self.err("expression nested too deeply"));
                }
                let v = self.unary();
                self.depth -= 1;
                v
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let n = match self.peek().cloned() {
                Some(Tok::Num(q)) if q.is_integer() => q,
                _ => return Err(self.err("exponent must be a non-negative integer literal")),
            };
            let n: u32 = n
                .to_integer()
                .try_into()
                .ok()
                .filter(|n| *n <= MAX_EXPONENT)
                .ok_or_else(|| self.err(format!("exponent must be at most {MAX_EXPONENT}")))?;
            self.pos += 1;
            let mut acc = Poly::constant(BigRational::one());
            for _ in 0..n {
                acc = self.mul_checked(&acc, &base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Poly::constant(q))
            }
            Some(Tok::Ident(name)) => {
                if !(self.known)(&name) {
                    return Err(self.err(format!("unknown identifier `{name}`")));
                }
                self.pos += 1;
                Ok(Poly::var(&name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("expected `)`")),
                }
            }
            Some(t) => Err(self.err(format!("unexpected token {}", describe(&t)))),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(q) => format!("number {q}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
    }
}

/// Parses `src` as a polynomial. `line`/`column` locate `src` inside its
/// file for error messages; `known` accepts identifier names.
pub fn parse_poly(src: &str, line: usize, column: usize, known: impl Fn(&str) -> bool) -> Result<Poly, ParseError> {
    let lex = Lexer { src, line, col0: column };
    let toks = lex.tokens()?;
    let mut p = Parser { lex: &lex, toks, pos: 0, known, depth: 0 };
    if p.peek().is_none() {
        return Err(p.err("empty expression"));
    }
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Poly, ParseError> {
        parse_poly(s, 1, 1, |n| ["y", "ydot", "mu", "beta"].contains(&n))
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn expands_vdpd_nonlinearity() {
        let p = parse("mu*(1 - y^2)*ydot - beta*y^3").unwrap();
        let mut want = BTreeMap::new();
        want.insert(Monomial::from_pairs([("mu", 1), ("ydot", 1)]), q(1, 1));
        want.insert(Monomial::from_pairs([("mu", 1), ("y", 2), ("ydot", 1)]), q(-1, 1));
        want.insert(Monomial::from_pairs([("beta", 1), ("y", 3)]), q(-1, 1));
        assert_eq!(p, Poly(want));
    }

    #[test]
    fn rational_literals_and_division() {
        let p = parse("0.5*mu*y/3 + (1/6)*mu*y").unwrap();
        assert_eq!(p.0.get(&Monomial::from_pairs([("mu", 1), ("y", 1)])), Some(&q(1, 3)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("mu*(y + 1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 10));
        let e = parse("mu*z").unwrap_err();
        assert_eq!(e.column, 4);
        assert!(e.message.contains("unknown identifier"));
        assert!(parse("mu/y").unwrap_err().message.contains("non-constant"));
        assert!(parse("y^99").is_err());
        assert!(parse("").is_err());
        assert!(parse("y $").is_err());
        assert!(parse("mu/0").unwrap_err().message.contains("zero"));
    }

    #[test]
    fn text_round_trip() {
        let p = parse("-(3/4)*mu*y^2*ydot + 2*beta*y - mu").unwrap();
        let again = parse(&p.to_text()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn blowup_is_bounded() {
        assert!(parse("(y+ydot+mu+beta+1)^12*(y+ydot+mu+beta+1)^12").is_err());
        assert!(parse("((((((((((y^12)^12)^12)^12)^12)^12)^12)^12)^12)^12)").is_err());
        assert!(parse("((((((((1e4000)^12)^12)^12)^12)^12)^12)^12)").is_err());
        let deep = format!("{}y{}", "(".repeat(200), ")".repeat(200));
        assert!(parse(&deep).is_err());
    }
}
