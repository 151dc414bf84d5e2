use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_float::ops::SquareRoot;
use dashu_int::{IBig, Sign};
use std::cmp::Ordering;
use std::fmt;

use super::{Domain, Field, Rational, Real};

type Repr = FBig<HalfEven, 2>;

/// Binary floating point number carrying a fixed precision in bits.
#[derive(Clone, PartialEq)]
pub struct BigFloat(Repr);

impl BigFloat {
    pub fn bits(&self) -> usize {
        self.0.precision()
    }

    fn wrap(v: Repr, bits: usize) -> Self {
        BigFloat(v.with_precision(bits).value())
    }

    pub fn from_f64_bits(v: f64, bits: usize) -> Self {
        let r = Repr::try_from(v).expect("finite f64");
        Self::wrap(r, bits)
    }

    pub fn from_int(v: i64, bits: usize) -> Self {
        Self::wrap(Repr::from(IBig::from(v)), bits)
    }

    /// Re-rounds to a different precision.
    pub fn with_bits(&self, bits: usize) -> Self {
        Self::wrap(self.0.clone(), bits)
    }

    /// Decimal rendering with a fixed number of significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.0.repr().is_zero() {
            return "0".to_string();
        }
        let d = self.0.to_decimal().value().with_precision(digits.max(1)).value();
        d.to_string()
    }

    /// Exact conversion to a rational (every binary float is one).
    pub fn to_rational(&self) -> Rational {
        let (sig, exp) = self.0.repr().clone().into_parts();
        if exp >= 0 {
            Rational::from(sig << exp as usize)
        } else {
            Rational::from_parts(sig, dashu_int::UBig::ONE << (-exp) as usize)
        }
    }

    fn atan_inv(x: i64, bits: usize) -> Self {
        // atan(1/x) by its alternating Taylor series
        let xb = Self::from_int(x, bits);
        let x2 = xb.mul(&xb);
        let mut power = Self::from_int(1, bits).div(&xb);
        let mut sum = power.clone();
        let eps = Self::wrap(Repr::ONE, bits).ldexp(-(bits as isize) - 4);
        let mut k = 1i64;
        loop {
            power = power.div(&x2);
            let term = power.div_i64(2 * k + 1);
            if term.abs() < eps {
                break;
            }
            if k % 2 == 1 {
                sum = sum.sub(&term);
            } else {
                sum = sum.add(&term);
            }
            k += 1;
        }
        sum
    }

    fn ldexp(&self, e: isize) -> Self {
        let (sig, exp) = self.0.repr().clone().into_parts();
        Self::wrap(Repr::from_parts(sig, exp + e), self.bits())
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(self.bits() * 3 / 10 + 1))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(self.bits() * 3 / 10 + 1))
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Field for BigFloat {
    fn domain(&self) -> Domain {
        Domain::Float { bits: self.bits() }
    }
    fn zero(d: &Domain) -> Self {
        Self::from_int(0, bits_of(d))
    }
    fn one(d: &Domain) -> Self {
        Self::from_int(1, bits_of(d))
    }
    fn from_i64(v: i64, d: &Domain) -> Self {
        Self::from_int(v, bits_of(d))
    }
    fn from_rational(r: &Rational, d: &Domain) -> Self {
        let bits = bits_of(d);
        BigFloat(r.to_float::<HalfEven, 2>(bits).value())
    }
    fn add(&self, o: &Self) -> Self {
        BigFloat(&self.0 + &o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        BigFloat(&self.0 - &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        BigFloat(&self.0 * &o.0)
    }
    fn div(&self, o: &Self) -> Self {
        BigFloat(&self.0 / &o.0)
    }
    fn neg(&self) -> Self {
        BigFloat(-&self.0)
    }
    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }
    fn is_negative(&self) -> bool {
        self.0.repr().sign() == Sign::Negative && !self.0.repr().is_zero()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
}

impl Real for BigFloat {
    fn from_f64(v: f64, d: &Domain) -> Self {
        Self::from_f64_bits(v, bits_of(d))
    }
    fn exp(&self) -> Self {
        BigFloat(self.0.exp())
    }
    fn ln(&self) -> Self {
        BigFloat(self.0.ln())
    }
    fn sqrt(&self) -> Self {
        BigFloat(self.0.sqrt())
    }
    fn pi(d: &Domain) -> Self {
        let bits = bits_of(d);
        let work = bits + 32;
        let a = Self::atan_inv(5, work).mul_i64(16);
        let b = Self::atan_inv(239, work).mul_i64(4);
        a.sub(&b).with_bits(bits)
    }
    fn is_finite(&self) -> bool {
        self.0.repr().is_finite()
    }
}

fn bits_of(d: &Domain) -> usize {
    match d {
        Domain::Float { bits } => *bits,
        Domain::Machine => 53,
        Domain::Exact => panic!("exact domain has no float precision"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_at_256_bits() {
        let d = Domain::float(256);
        let e = BigFloat::one(&d).exp();
        assert!(e.to_decimal_string(40).starts_with("2.71828182845904523536028747135266249"));
        let pi = BigFloat::pi(&d);
        assert!(pi.to_decimal_string(40).starts_with("3.14159265358979323846264338327950288"));
    }

    #[test]
    fn rational_round_trip() {
        let d = Domain::float(128);
        let r = Rational::from_parts(3.into(), 8u8.into());
        let f = BigFloat::from_rational(&r, &d);
        assert_eq!(f.to_rational(), r);
        assert_eq!(f.bits(), 128);
    }

    #[test]
    fn precision_is_preserved_by_arithmetic() {
        let d = Domain::float(200);
        let x = BigFloat::from_i64(7, &d).div(&BigFloat::from_i64(3, &d));
        assert_eq!(x.bits(), 200);
        assert_eq!(x.ln().bits(), 200);
        assert_eq!(x.sqrt().bits(), 200);
    }
}
