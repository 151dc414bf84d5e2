//! Coefficient domains: exact rationals, fixed-precision binary floats and
//! machine doubles (the latter only for coarse scans).

mod bigfloat;
mod rational;

use std::fmt::Debug;

pub use bigfloat::BigFloat;
pub use rational::{rational_from_str, rational_to_string, Rational};

/// Default working precision for root finding.
pub const DEFAULT_PRECISION: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Exact,
    Float { bits: usize },
    Machine,
}

impl Domain {
    pub fn float(bits: usize) -> Self {
        Domain::Float { bits }
    }

    pub fn bits(&self) -> Option<usize> {
        match self {
            Domain::Float { bits } => Some(*bits),
            Domain::Machine => Some(53),
            Domain::Exact => None,
        }
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Exact => write!(f, "exact-rational"),
            Domain::Float { bits } => write!(f, "big-float({bits})"),
            Domain::Machine => write!(f, "f64"),
        }
    }
}

/// Field operations shared by every coefficient type.
///
/// Binary operations assume both operands live in the same [`Domain`];
/// series-level code checks this before calling into the field.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn domain(&self) -> Domain;
    fn zero(d: &Domain) -> Self;
    fn one(d: &Domain) -> Self;
    fn from_i64(v: i64, d: &Domain) -> Self;
    fn from_rational(r: &Rational, d: &Domain) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Division; the divisor must be nonzero.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn mul_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k, &self.domain()))
    }

    fn div_i64(&self, k: i64) -> Self {
        self.div(&Self::from_i64(k, &self.domain()))
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.domain());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Ordered fields with the transcendental functions needed for numerics.
pub trait Real: Field + PartialOrd {
    fn from_f64(v: f64, d: &Domain) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn pi(d: &Domain) -> Self;

    fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    fn is_finite(&self) -> bool;

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl Field for f64 {
    fn domain(&self) -> Domain {
        Domain::Machine
    }
    fn zero(_: &Domain) -> Self {
        0.0
    }
    fn one(_: &Domain) -> Self {
        1.0
    }
    fn from_i64(v: i64, _: &Domain) -> Self {
        v as f64
    }
    fn from_rational(r: &Rational, _: &Domain) -> Self {
        r.to_f64().value()
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
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Real for f64 {
    fn from_f64(v: f64, _: &Domain) -> Self {
        v
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn pi(_: &Domain) -> Self {
        std::f64::consts::PI
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}
