//! Exact coefficient fields: the rationals, and real quadratic extensions
//! `Q(sqrt(d))` for a positive nonsquare integer `d`.
//!
//! Every order decision downstream reduces to [`Scalar::sign`], which is
//! decided by exact case analysis on the signs of the two parts together
//! with a comparison of `a^2` against `b^2 d`. No floating point anywhere.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;

/// Coefficient field of a model: plain rationals or a fixed quadratic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    /// `Q(sqrt(d))`, `d` a positive nonsquare integer fixed per model.
    Quadratic(u32),
}

impl Field {
    pub fn quadratic(d: u32) -> Result<Field> {
        if d == 0 || is_square(d) {
            return Err(Error::BadElement(format!("radicand {d} must be a positive nonsquare")));
        }
        Ok(Field::Quadratic(d))
    }

    pub fn radicand(&self) -> Option<u32> {
        match self {
            Field::Rational => None,
            Field::Quadratic(d) => Some(*d),
        }
    }

    /// Whether scalars of this field are admissible in a model over `self`.
    pub fn admits(&self, s: &Scalar) -> bool {
        match (self, s.d) {
            (_, None) => true,
            (Field::Quadratic(d), Some(sd)) => *d == sd,
            (Field::Rational, Some(_)) => false,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "rational"),
            Field::Quadratic(d) => write!(f, "sqrt {d}"),
        }
    }
}

fn is_square(d: u32) -> bool {
    let r = (d as f64).sqrt() as u32;
    (r.saturating_sub(1)..=r + 1).any(|k| k * k == d)
}

/// An element `a + b*sqrt(d)` of the coefficient field.
///
/// Canonical form: `d` is `None` exactly when `b = 0`, so plain rationals
/// compare equal regardless of which model they came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    d: Option<u32>,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { a: BigRational::zero(), b: BigRational::zero(), d: None }
    }

    pub fn one() -> Scalar {
        Scalar::from_rational(BigRational::one())
    }

    pub fn from_rational(a: BigRational) -> Scalar {
        Scalar { a, b: BigRational::zero(), d: None }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        Scalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `a + b*sqrt(d)`; normalizes to the rational form when `b = 0`.
    pub fn quadratic(a: BigRational, b: BigRational, d: u32) -> Result<Scalar> {
        Field::quadratic(d)?;
        if b.is_zero() {
            return Ok(Scalar::from_rational(a));
        }
        Ok(Scalar { a, b, d: Some(d) })
    }

    pub fn sqrt_of(d: u32) -> Result<Scalar> {
        Scalar::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> Option<u32> {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Rational value when `b = 0`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    fn unify(&self, other: &Scalar) -> Result<Option<u32>> {
        match (self.d, other.d) {
            (None, d) | (d, None) => Ok(d),
            (Some(x), Some(y)) if x == y => Ok(Some(x)),
            (Some(x), Some(y)) => Err(Error::RadicandMismatch(x.to_string(), y.to_string())),
        }
    }

    fn normalized(a: BigRational, b: BigRational, d: Option<u32>) -> Scalar {
        if b.is_zero() {
            Scalar { a, b, d: None }
        } else {
            Scalar { a, b, d }
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        let d = self.unify(other)?;
        Ok(Scalar::normalized(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        let d = self.unify(other)?;
        Ok(Scalar::normalized(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn neg(&self) -> Scalar {
        Scalar::normalized(-self.a.clone(), -self.b.clone(), self.d)
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        let d = self.unify(other)?;
        let rad = d.map(|d| BigRational::from_integer(BigInt::from(d))).unwrap_or_else(BigRational::zero);
        let a = &self.a * &other.a + &self.b * &other.b * &rad;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Scalar::normalized(a, b, d))
    }

    pub fn mul_rational(&self, q: &BigRational) -> Scalar {
        Scalar::normalized(&self.a * q, &self.b * q, self.d)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.mul(&other.inverse()?)
    }

    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self.d {
            None => Ok(Scalar::from_rational(self.a.recip())),
            Some(d) => {
                // Norm a^2 - b^2 d is nonzero since d is a nonsquare.
                let rad = BigRational::from_integer(BigInt::from(d));
                let norm = &self.a * &self.a - &self.b * &self.b * &rad;
                debug_assert!(!norm.is_zero());
                Ok(Scalar::normalized(&self.a / &norm, -&self.b / &norm, self.d))
            }
        }
    }

    /// Exact sign of the real number `a + b*sqrt(d)` under the embedding with
    /// `sqrt(d) > 0`. Decided by comparing `a^2` with `b^2 d` when the two
    /// parts pull in opposite directions.
    pub fn sign(&self) -> i32 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let d = self.d.expect("irrational part without radicand");
        let rad = BigRational::from_integer(BigInt::from(d));
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rad;
        // Opposite signs: |a| vs |b|sqrt(d) decides; equality cannot happen.
        match a2.cmp(&b2d) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => unreachable!("sqrt({d}) would be rational"),
        }
    }

    pub fn cmp_exact(&self, other: &Scalar) -> Result<std::cmp::Ordering> {
        Ok(sign_to_ordering(self.sub(other)?.sign()))
    }
}

pub(crate) fn rat_sign(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn sign_to_ordering(s: i32) -> std::cmp::Ordering {
    match s {
        0 => std::cmp::Ordering::Equal,
        x if x > 0 => std::cmp::Ordering::Greater,
        _ => std::cmp::Ordering::Less,
    }
}

pub(crate) fn fmt_rat(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rat(&self.a));
        }
        let d = self.d.unwrap();
        let root = |b: &BigRational| -> String {
            if b.is_one() {
                format!("sqrt({d})")
            } else {
                format!("{}*sqrt({d})", fmt_rat(b))
            }
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{}", root(&-self.b.clone()))
            } else {
                write!(f, "{}", root(&self.b))
            }
        } else if self.b.is_negative() {
            write!(f, "{}-{}", fmt_rat(&self.a), root(&-self.b.clone()))
        } else {
            write!(f, "{}+{}", fmt_rat(&self.a), root(&self.b))
        }
    }
}

/// Parses the canonical text form: `p/q`, `p/q+r/s*sqrt(d)`, `sqrt(d)`, etc.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let mut p = ScalarParser { bytes: text.as_bytes(), pos: 0 };
    let s = p.scalar()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(Error::parse(p.pos, "trailing input after scalar"));
    }
    Ok(s)
}

struct ScalarParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ScalarParser<'a> {
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

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected `{}`", b as char)))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(Error::parse(self.pos, "expected integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn rational(&mut self) -> Result<BigRational> {
        let n = self.integer()?;
        if self.eat(b'/') {
            let d = self.integer()?;
            if d.is_zero() {
                return Err(Error::parse(self.pos, "zero denominator"));
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(n))
        }
    }

    fn sqrt(&mut self) -> Result<u32> {
        // caller consumed "sqrt"
        self.expect(b'(')?;
        let d = self.integer()?;
        self.expect(b')')?;
        let d: u32 = d
            .to_string()
            .parse()
            .map_err(|_| Error::parse(self.pos, "radicand out of range"))?;
        Field::quadratic(d)?;
        Ok(d)
    }

    fn at_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        self.bytes[self.pos..].starts_with(kw.as_bytes())
    }

    fn term(&mut self, sign: i32) -> Result<Scalar> {
        // term := rat ['*' sqrt(d)] | ['-'] sqrt(d)
        let q = if self.at_keyword("sqrt") {
            BigRational::one()
        } else if self.peek() == Some(b'-') && {
            let save = self.pos;
            self.pos += 1;
            let is_root = self.at_keyword("sqrt");
            self.pos = save;
            is_root
        } {
            self.pos += 1;
            -BigRational::one()
        } else {
            let r = self.rational()?;
            if !self.eat(b'*') {
                let r = if sign < 0 { -r } else { r };
                return Ok(Scalar::from_rational(r));
            }
            r
        };
        if !self.at_keyword("sqrt") {
            return Err(Error::parse(self.pos, "expected sqrt(..) factor"));
        }
        self.pos += 4;
        let d = self.sqrt()?;
        let q = if sign < 0 { -q } else { q };
        Scalar::quadratic(BigRational::zero(), q, d)
    }

    fn scalar(&mut self) -> Result<Scalar> {
        let mut acc = self.term(1)?;
        loop {
            if self.eat(b'+') {
                let t = self.term(1)?;
                acc = acc.add(&t)?;
            } else if self.eat(b'-') {
                let t = self.term(1)?;
                acc = acc.sub(&t)?;
            } else {
                return Ok(acc);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2(a: i64, b: i64) -> Scalar {
        Scalar::quadratic(
            BigRational::from_integer(BigInt::from(a)),
            BigRational::from_integer(BigInt::from(b)),
            2,
        )
        .unwrap()
    }

    #[test]
    fn sign_of_one_minus_sqrt2_is_negative() {
        // 1 < sqrt(2), decided through 1^2 < 2
        assert_eq!(sqrt2(1, -1).sign(), -1);
        assert_eq!(sqrt2(-1, 1).sign(), 1);
        assert_eq!(sqrt2(3, -2).sign(), 1); // 9 > 8
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let r = sqrt2(0, 1).mul(&sqrt2(0, 1)).unwrap();
        assert_eq!(r, Scalar::from_int(2));
        assert!(r.is_rational());
    }

    #[test]
    fn sign_of_zero() {
        assert_eq!(Scalar::zero().sign(), 0);
    }

    #[test]
    fn mixed_radicands_rejected() {
        let x = Scalar::sqrt_of(2).unwrap();
        let y = Scalar::sqrt_of(3).unwrap();
        assert!(matches!(x.add(&y), Err(Error::RadicandMismatch(_, _))));
    }

    #[test]
    fn division_by_zero_rejected() {
        assert_eq!(Scalar::one().div(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_in_quadratic_field() {
        let x = sqrt2(1, 1); // 1 + sqrt 2
        let inv = x.inverse().unwrap();
        assert_eq!(x.mul(&inv).unwrap(), Scalar::one());
        assert_eq!(inv, sqrt2(-1, 1)); // 1/(1+s2) = s2 - 1
    }

    #[test]
    fn nonsquare_validation() {
        assert!(Field::quadratic(4).is_err());
        assert!(Field::quadratic(0).is_err());
        assert!(Field::quadratic(2).is_ok());
        assert!(Field::quadratic(10).is_ok());
    }

    #[test]
    fn display_parse_round_trip() {
        for s in [
            Scalar::ratio(3, 2),
            Scalar::from_int(-5),
            Scalar::zero(),
            sqrt2(0, 1),
            sqrt2(1, -1),
            sqrt2(-3, 2),
            Scalar::quadratic(BigRational::new(BigInt::from(1), BigInt::from(2)), BigRational::new(BigInt::from(-2), BigInt::from(7)), 5).unwrap(),
        ] {
            let text = s.to_string();
            let back = parse_scalar(&text).unwrap();
            assert_eq!(back, s, "round trip through `{text}`");
        }
    }
}
