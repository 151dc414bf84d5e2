//! Truncated power series over a [`Field`] with the labelled and Pólya
//! operators.

use std::fmt;

use crate::num::{Domain, Field, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("{0} requires a zero constant term")]
    NonzeroConstant(&'static str),
    #[error("log requires constant term 1")]
    LogConstant,
    #[error("plethysm exponent must be at least 1")]
    ZeroPlethysm,
}

pub type SeriesResult<T> = Result<T, SeriesError>;

/// A polynomial `c_0 + c_1 z + ... + c_N z^N` standing for a power series
/// known up to and including `z^N`.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
    domain: Domain,
}

pub type ExactSeries = TruncatedSeries<Rational>;

impl<C: Field> TruncatedSeries<C> {
    pub fn from_coeffs(mut coeffs: Vec<C>, order: usize, domain: Domain) -> Self {
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, C::zero(&domain));
        TruncatedSeries { coeffs, domain }
    }

    pub fn zero(order: usize, domain: Domain) -> Self {
        TruncatedSeries { coeffs: vec![C::zero(&domain); order + 1], domain }
    }

    pub fn constant(c: C, order: usize) -> Self {
        let domain = c.domain();
        let mut s = Self::zero(order, domain);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize, domain: Domain) -> Self {
        Self::constant(C::one(&domain), order)
    }

    /// The series `z`.
    pub fn atom(order: usize, domain: Domain) -> Self {
        let mut s = Self::zero(order, domain);
        if order >= 1 {
            s.coeffs[1] = C::one(&domain);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> C {
        self.coeffs.get(n).cloned().unwrap_or_else(|| C::zero(&self.domain))
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn truncate(&self, m: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), m, self.domain)
    }

    /// Same coefficients, possibly padded with zeros, at order `m`.
    pub fn with_order(&self, m: usize) -> Self {
        self.truncate(m)
    }

    fn check(&self, other: &Self) -> SeriesResult<usize> {
        if self.domain != other.domain {
            return Err(SeriesError::DomainMismatch(self.domain, other.domain));
        }
        Ok(self.order().min(other.order()))
    }

    pub fn add(&self, other: &Self) -> SeriesResult<Self> {
        let n = self.check(other)?;
        let coeffs = (0..=n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect();
        Ok(TruncatedSeries { coeffs, domain: self.domain })
    }

    pub fn sub(&self, other: &Self) -> SeriesResult<Self> {
        let n = self.check(other)?;
        let coeffs = (0..=n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect();
        Ok(TruncatedSeries { coeffs, domain: self.domain })
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), domain: self.domain }
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(), domain: self.domain }
    }

    pub fn mul(&self, other: &Self) -> SeriesResult<Self> {
        let n = self.check(other)?;
        let mut coeffs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = C::zero(&self.domain);
            for i in 0..=k {
                let (a, b) = (&self.coeffs[i], &other.coeffs[k - i]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            coeffs.push(acc);
        }
        Ok(TruncatedSeries { coeffs, domain: self.domain })
    }

    /// `e^f` through `(e^f)' = f' e^f`.
    pub fn exp(&self) -> SeriesResult<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant("exp"));
        }
        let n = self.order();
        let d = self.domain;
        let mut g = vec![C::one(&d)];
        for m in 1..=n {
            let mut acc = C::zero(&d);
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc = acc.add(&self.coeffs[k].mul_i64(k as i64).mul(&g[m - k]));
                }
            }
            g.push(acc.div_i64(m as i64));
        }
        Ok(TruncatedSeries { coeffs: g, domain: d })
    }

    pub fn log(&self) -> SeriesResult<Self> {
        if self.coeffs[0] != C::one(&self.domain) {
            return Err(SeriesError::LogConstant);
        }
        let n = self.order();
        let d = self.domain;
        let mut h = vec![C::zero(&d)];
        for m in 1..=n {
            let mut acc = self.coeffs[m].mul_i64(m as i64);
            for k in 1..m {
                if !h[k].is_zero() {
                    acc = acc.sub(&h[k].mul_i64(k as i64).mul(&self.coeffs[m - k]));
                }
            }
            h.push(acc.div_i64(m as i64));
        }
        Ok(TruncatedSeries { coeffs: h, domain: d })
    }

    /// Formal derivative; the result is known to order `N-1`.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0, self.domain);
        }
        let coeffs = (1..=n).map(|k| self.coeffs[k].mul_i64(k as i64)).collect();
        TruncatedSeries { coeffs, domain: self.domain }
    }

    /// `z f'(z)`.
    pub fn point(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, c)| c.mul_i64(k as i64)).collect();
        TruncatedSeries { coeffs, domain: self.domain }
    }

    /// `∫_0^z f(t)/t dt`.
    pub fn unroot(&self) -> SeriesResult<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant("unroot"));
        }
        let mut coeffs = vec![C::zero(&self.domain)];
        coeffs.extend(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.div_i64(k as i64)));
        Ok(TruncatedSeries { coeffs, domain: self.domain })
    }

    /// `f(z^k)` at the same order; only `⌊N/k⌋ + 1` input coefficients are read.
    pub fn plethysm_scale(&self, k: usize) -> SeriesResult<Self> {
        self.plethysm_to(k, self.order())
    }

    /// `f(z^k)` at an explicit target order `n`; needs `self.order() ≥ ⌊n/k⌋`.
    pub fn plethysm_to(&self, k: usize, n: usize) -> SeriesResult<Self> {
        if k == 0 {
            return Err(SeriesError::ZeroPlethysm);
        }
        let mut out = Self::zero(n, self.domain);
        for j in 0..=n / k {
            out.coeffs[j * k] = self.coeff(j);
        }
        Ok(out)
    }

    /// `exp(Σ_{i≥1} f(z^i)/i)`.
    pub fn polya_exp(&self) -> SeriesResult<Self> {
        self.polya_sum(1)?.exp()
    }

    /// `exp(Σ_{i≥2} f(z^i)/i)`, so that `polya_exp = exp · polya_exp_tail`.
    pub fn polya_exp_tail(&self) -> SeriesResult<Self> {
        self.polya_sum(2)?.exp()
    }

    fn polya_sum(&self, from: usize) -> SeriesResult<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant("polya_exp"));
        }
        let n = self.order();
        let mut acc = Self::zero(n, self.domain);
        for i in from..=n.max(1) {
            let term = self.plethysm_scale(i)?;
            let inv = C::one(&self.domain).div_i64(i as i64);
            acc = acc.add(&term.scale(&inv))?;
        }
        Ok(acc)
    }

    /// `g(f(z))` by Horner's rule.
    pub fn compose(g: &Self, f: &Self) -> SeriesResult<Self> {
        if !f.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant("compose"));
        }
        let n = g.check(f)?;
        let f = f.truncate(n);
        let mut acc = Self::constant(g.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.mul(&f)?;
            acc.coeffs[0] = acc.coeffs[0].add(&g.coeffs[k]);
        }
        Ok(acc)
    }

    /// `1/(1-b)`.
    pub fn geom(&self) -> SeriesResult<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant("geom"));
        }
        let n = self.order();
        let d = self.domain;
        let mut g = vec![C::one(&d)];
        for m in 1..=n {
            let mut acc = C::zero(&d);
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc = acc.add(&self.coeffs[k].mul(&g[m - k]));
                }
            }
            g.push(acc);
        }
        Ok(TruncatedSeries { coeffs: g, domain: d })
    }

    /// Converts every coefficient into another domain.
    pub fn map_domain<D: Field>(&self, domain: Domain, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries { coeffs: self.coeffs.iter().map(f).collect(), domain }
    }
}

impl TruncatedSeries<Rational> {
    pub fn to_domain<D: Field>(&self, domain: Domain) -> TruncatedSeries<D> {
        self.map_domain(domain, |c| D::from_rational(c, &domain))
    }

    pub fn from_ints(values: &[i64]) -> Self {
        let coeffs = values.iter().map(|&v| Rational::from(v)).collect::<Vec<_>>();
        let n = coeffs.len().saturating_sub(1);
        Self::from_coeffs(coeffs, n, Domain::Exact)
    }
}

impl<C: Field> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, "] + O(z^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::BigFloat;

    type S = ExactSeries;

    fn q(p: i64, r: u64) -> Rational {
        Rational::from_parts(p.into(), r.into())
    }

    fn ints(v: &[i64]) -> S {
        S::from_ints(v)
    }

    #[test]
    fn add_cancels_and_has_identity() {
        let a = ints(&[1, 1, 0, 0]);
        let b = ints(&[1, -1, 0, 0]);
        assert_eq!(a.add(&b).unwrap(), ints(&[2, 0, 0, 0]));
        assert_eq!(a.add(&S::zero(3, Domain::Exact)).unwrap(), a);
    }

    #[test]
    fn mul_examples() {
        let a = ints(&[1, 1, 0, 0]);
        let b = ints(&[1, -1, 0, 0]);
        assert_eq!(a.mul(&b).unwrap(), ints(&[1, 0, -1, 0]));
        assert_eq!(a.mul(&S::one(3, Domain::Exact)).unwrap(), a);
        let geo = ints(&[0, 1, 1, 1, 1]);
        assert_eq!(geo.mul(&geo).unwrap().coeff(4), Rational::from(3));
    }

    #[test]
    fn mul_output_order_is_min() {
        let a = ints(&[1, 1, 1]);
        let b = ints(&[1, 1, 1, 1, 1]);
        assert_eq!(a.mul(&b).unwrap().order(), 2);
    }

    #[test]
    fn exp_of_atom_is_inverse_factorials() {
        let e = S::atom(6, Domain::Exact).exp().unwrap();
        let mut f = 1i64;
        for n in 0..=6 {
            if n > 0 {
                f *= n;
            }
            assert_eq!(e.coeff(n as usize), q(1, f as u64));
        }
        assert_eq!(S::zero(4, Domain::Exact).exp().unwrap(), S::one(4, Domain::Exact));
        assert!(S::one(4, Domain::Exact).exp().is_err());
    }

    #[test]
    fn exp_log_round_trip() {
        let one_plus_z = ints(&[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let l = one_plus_z.log().unwrap();
        assert_eq!(l.exp().unwrap(), one_plus_z);
    }

    #[test]
    fn calculus_examples() {
        let geo = ints(&[0, 1, 1, 1, 1, 1]);
        assert_eq!(geo.point(), ints(&[0, 1, 2, 3, 4, 5]));
        assert!(ints(&[7, 0, 0]).derivative().is_zero());
        // z e^z unrooted: [z^n] = 1/((n-1)! n)
        let zez = S::atom(6, Domain::Exact).exp().unwrap().mul(&S::atom(6, Domain::Exact)).unwrap();
        let u = zez.unroot().unwrap();
        let mut fact = 1u64;
        for n in 1..=6u64 {
            assert_eq!(u.coeff(n as usize), q(1, fact * n));
            fact *= n;
        }
        assert_eq!(u.order(), 6);
    }

    #[test]
    fn plethysm_examples() {
        let f = ints(&[0, 1, 1, 0, 0]);
        assert_eq!(f.plethysm_scale(2).unwrap(), ints(&[0, 0, 1, 0, 1]));
        assert_eq!(f.plethysm_scale(1).unwrap(), f);
        let g = ints(&[1; 8]);
        assert_eq!(g.plethysm_scale(3).unwrap(), ints(&[1, 0, 0, 1, 0, 0, 1, 0]));
        assert!(f.plethysm_scale(0).is_err());
    }

    #[test]
    fn polya_exp_examples() {
        let z = S::atom(8, Domain::Exact);
        assert_eq!(z.polya_exp().unwrap(), ints(&[1; 9]));
        assert_eq!(S::zero(5, Domain::Exact).polya_exp().unwrap(), S::one(5, Domain::Exact));
        let tail = S::atom(4, Domain::Exact).polya_exp_tail().unwrap();
        let expect = vec![Rational::ONE, Rational::ZERO, q(1, 2), q(1, 3), q(3, 8)];
        assert_eq!(tail.coeffs(), &expect[..]);
        assert_eq!(S::zero(5, Domain::Exact).polya_exp_tail().unwrap(), S::one(5, Domain::Exact));
    }

    #[test]
    fn unlabelled_rooted_trees_by_iteration() {
        let n = 7;
        let z = S::atom(n, Domain::Exact);
        let mut y = S::zero(n, Domain::Exact);
        for _ in 0..=n + 1 {
            y = z.mul(&y.polya_exp().unwrap()).unwrap();
        }
        assert_eq!(y, ints(&[0, 1, 1, 2, 4, 9, 20, 48]));
    }

    #[test]
    fn compose_examples() {
        let e = S::atom(6, Domain::Exact).exp().unwrap();
        assert_eq!(S::compose(&e, &S::atom(6, Domain::Exact)).unwrap(), e);
        let g = ints(&[1; 5]);
        let f = ints(&[0, 1, 1, 1, 1]);
        assert_eq!(S::compose(&g, &f).unwrap(), ints(&[1, 1, 2, 4, 8]));
        assert_eq!(S::compose(&g, &S::zero(4, Domain::Exact)).unwrap(), S::one(4, Domain::Exact));
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let a: TruncatedSeries<BigFloat> = TruncatedSeries::one(3, Domain::float(64));
        let b: TruncatedSeries<BigFloat> = TruncatedSeries::one(3, Domain::float(128));
        assert!(matches!(a.add(&b), Err(SeriesError::DomainMismatch(_, _))));
    }

    #[test]
    fn geom_is_reciprocal() {
        let b = ints(&[0, 1, 0, 0, 0]);
        assert_eq!(b.geom().unwrap(), ints(&[1; 5]));
    }
}
