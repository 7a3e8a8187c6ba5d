//! Exact Gaussian rationals, the coefficient field of every symbolic series.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// `re + i·im` with both parts exact, reduced rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl RationalComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    /// `num/den` on the real axis. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    /// `i·num/den`. Panics if `den == 0`.
    pub fn imag_ratio(num: i64, den: i64) -> Self {
        Self { re: BigRational::zero(), im: BigRational::new(num.into(), den.into()) }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero() && !self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { re: &self.re * k, im: &self.im * k }
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // to_f64 only fails on overflow; keep the sign.
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Parses a decimal literal such as `-0.125`, `3`, `2.5e-3` or `7/16` exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    // Guard against absurd exponents that would allocate huge integers.
    if exp.unsigned_abs() > 4096 || digits.len() > 4096 {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let q = if scale >= 0 {
        BigRational::from_integer(num * num::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num::pow(ten, (-scale) as usize))
    };
    Some(q)
}

/// Formats an exact rational as `a` or `(a/b)`; a leading minus sits outside.
pub fn format_rational(q: &BigRational) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let a = q.abs();
    if a.is_integer() {
        format!("{sign}{}", a.numer())
    } else {
        format!("{sign}({}/{})", a.numer(), a.denom())
    }
}

impl fmt::Display for RationalComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-self.im.clone()).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", format_rational(&self.im))
                }
            }
            (false, false) => {
                let op = if self.im.is_negative() { "-" } else { "+" };
                let im_abs = self.im.abs();
                if im_abs.is_one() {
                    write!(f, "({} {op} i)", format_rational(&self.re))
                } else {
                    write!(f, "({} {op} {}*i)", format_rational(&self.re), format_rational(&im_abs))
                }
            }
        }
    }
}

impl Add for &RationalComplex {
    type Output = RationalComplex;
    fn add(self, rhs: &RationalComplex) -> RationalComplex {
        RationalComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Add for RationalComplex {
    type Output = RationalComplex;
    fn add(self, rhs: RationalComplex) -> RationalComplex {
        &self + &rhs
    }
}

impl AddAssign<&RationalComplex> for RationalComplex {
    fn add_assign(&mut self, rhs: &RationalComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &RationalComplex {
    type Output = RationalComplex;
    fn sub(self, rhs: &RationalComplex) -> RationalComplex {
        RationalComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Sub for RationalComplex {
    type Output = RationalComplex;
    fn sub(self, rhs: RationalComplex) -> RationalComplex {
        &self - &rhs
    }
}

impl Mul for &RationalComplex {
    type Output = RationalComplex;
    fn mul(self, rhs: &RationalComplex) -> RationalComplex {
        RationalComplex { re: &self.re * &rhs.re - &self.im * &rhs.im, im: &self.re * &rhs.im + &self.im * &rhs.re }
    }
}

impl Mul for RationalComplex {
    type Output = RationalComplex;
    fn mul(self, rhs: RationalComplex) -> RationalComplex {
        &self * &rhs
    }
}

impl Div for &RationalComplex {
    type Output = RationalComplex;
    /// Panics on division by zero, like the integer types.
    fn div(self, rhs: &RationalComplex) -> RationalComplex {
        self * &rhs.inv().expect("division by zero RationalComplex")
    }
}

impl Neg for &RationalComplex {
    type Output = RationalComplex;
    fn neg(self) -> RationalComplex {
        RationalComplex { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for RationalComplex {
    type Output = RationalComplex;
    fn neg(self) -> RationalComplex {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn reduced_with_positive_denominator() {
        let z = RationalComplex::new(q(2, -4), q(6, 8));
        assert_eq!(z.re.numer(), &BigInt::from(-1));
        assert_eq!(z.re.denom(), &BigInt::from(2));
        assert_eq!(z.im.denom(), &BigInt::from(4));
    }

    #[test]
    fn field_operations_exact() {
        let a = RationalComplex::new(q(1, 3), q(-2, 5));
        let b = RationalComplex::new(q(7, 2), q(1, 9));
        let prod = &a * &b;
        assert_eq!(&(&prod / &b), &a);
        assert_eq!(&(&a - &a), &RationalComplex::zero());
        assert_eq!(&RationalComplex::i() * &RationalComplex::i(), RationalComplex::from_int(-1));
        assert!(RationalComplex::zero().inv().is_none());
    }

    #[test]
    fn parses_decimal_literals_exactly() {
        assert_eq!(parse_rational("0.1"), Some(q(1, 10)));
        assert_eq!(parse_rational("-2.5e-3"), Some(q(-1, 400)));
        assert_eq!(parse_rational("7/16"), Some(q(7, 16)));
        assert_eq!(parse_rational("3"), Some(q(3, 1)));
        assert_eq!(parse_rational("1e3"), Some(q(1000, 1)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(parse_rational("1e99999"), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(RationalComplex::ratio(1, 2).to_string(), "(1/2)");
        assert_eq!(RationalComplex::ratio(-3, 1).to_string(), "-3");
        assert_eq!(RationalComplex::imag_ratio(-1, 16).to_string(), "-(1/16)*i");
        assert_eq!(RationalComplex::i().to_string(), "i");
        assert_eq!(RationalComplex::new(q(1, 2), q(-1, 1)).to_string(), "((1/2) - i)");
    }
}
