use dashu_int::{IBig, UBig};
use std::str::FromStr;

use super::{Domain, Field};

pub type Rational = dashu_ratio::RBig;

impl Field for Rational {
    fn domain(&self) -> Domain {
        Domain::Exact
    }
    fn zero(_: &Domain) -> Self {
        Rational::ZERO
    }
    fn one(_: &Domain) -> Self {
        Rational::ONE
    }
    fn from_i64(v: i64, _: &Domain) -> Self {
        Rational::from(v)
    }
    fn from_rational(r: &Rational, _: &Domain) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        self.numerator() < &IBig::ZERO
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self).value()
    }
    fn mul_i64(&self, k: i64) -> Self {
        self * Rational::from(k)
    }
    fn div_i64(&self, k: i64) -> Self {
        self / Rational::from(k)
    }
}

/// Parses `p`, `p/q` or a plain decimal such as `0.125` into an exact rational.
pub fn rational_from_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int}{frac}");
        let num = IBig::from_str(&digits).ok()?;
        let den = UBig::from(10u8).pow(frac.len());
        return Some(Rational::from_parts(num, den));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num = IBig::from_str(p).ok()?;
        let den = UBig::from_str(q).ok()?;
        if den == UBig::ZERO {
            return None;
        }
        return Some(Rational::from_parts(num, den));
    }
    IBig::from_str(s).ok().map(Rational::from)
}

/// Canonical `p` or `p/q` rendering.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denominator() == &UBig::ONE {
        r.numerator().to_string()
    } else {
        format!("{}/{}", r.numerator(), r.denominator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(rational_from_str("3/8").unwrap(), Rational::from_parts(3.into(), 8u8.into()));
        assert_eq!(rational_from_str("0.125").unwrap(), Rational::from_parts(1.into(), 8u8.into()));
        assert_eq!(rational_from_str("-6/4").unwrap(), Rational::from_parts((-3).into(), 2u8.into()));
        assert!(rational_from_str("1/0").is_none());
        assert!(rational_from_str("x").is_none());
    }

    #[test]
    fn printing_is_reduced() {
        let r = Rational::from_parts(10.into(), 4u8.into());
        assert_eq!(rational_to_string(&r), "5/2");
        assert_eq!(rational_to_string(&Rational::from(-7)), "-7");
    }
}
