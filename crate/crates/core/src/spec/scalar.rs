//! Pointwise evaluation of frozen expressions over a [`Real`] domain.

use std::collections::HashMap;
use std::sync::Arc;

use super::expr::{Expr, Node};
use crate::num::{Domain, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScalarError {
    #[error("unbound variable '{0}'")]
    UnboundVar(String),
    #[error("unbound marker '{0}'")]
    UnboundMarker(String),
    #[error("{0} has no pointwise value; freeze the system first")]
    NotScalar(&'static str),
    #[error("Geom argument {0} is not below 1")]
    Divergent(f64),
}

/// Evaluates many expressions at one point `(vars; z, markers)`, sharing
/// a memo across all of them.
pub struct ScalarEvaluator<R: Real> {
    domain: Domain,
    z: R,
    vars: HashMap<String, R>,
    markers: HashMap<String, R>,
    memo: HashMap<(*const Node, u32), (Expr, R)>,
    polys: HashMap<*const Vec<crate::num::Rational>, (Arc<Vec<crate::num::Rational>>, Vec<R>)>,
}

impl<R: Real> ScalarEvaluator<R> {
    pub fn new(domain: Domain) -> Self {
        ScalarEvaluator {
            domain,
            z: R::zero(&domain),
            vars: HashMap::new(),
            markers: HashMap::new(),
            memo: HashMap::new(),
            polys: HashMap::new(),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn set_point(&mut self, z: R, vars: HashMap<String, R>, markers: HashMap<String, R>) {
        self.z = z;
        self.vars = vars;
        self.markers = markers;
        self.memo.clear();
    }

    pub fn eval(&mut self, e: &Expr) -> Result<R, ScalarError> {
        self.eval_at(e, 1)
    }

    fn eval_at(&mut self, e: &Expr, power: u32) -> Result<R, ScalarError> {
        let key = (Arc::as_ptr(e), power);
        if let Some((_, v)) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(e, power)?;
        self.memo.insert(key, (e.clone(), v.clone()));
        Ok(v)
    }

    fn compute(&mut self, e: &Expr, k: u32) -> Result<R, ScalarError> {
        let d = self.domain;
        Ok(match &**e {
            Node::Const(c) => R::from_rational(c, &d),
            Node::Atom => self.z.powi(k),
            Node::Marker(m) => self.markers.get(m).ok_or_else(|| ScalarError::UnboundMarker(m.clone()))?.powi(k),
            Node::Var(v) => {
                if k != 1 {
                    return Err(ScalarError::NotScalar("Subst over a variable"));
                }
                self.vars.get(v).cloned().ok_or_else(|| ScalarError::UnboundVar(v.clone()))?
            }
            Node::Sum(ts) => {
                let mut acc = self.eval_at(&ts[0], k)?;
                for t in &ts[1..] {
                    acc = acc.add(&self.eval_at(t, k)?);
                }
                acc
            }
            Node::Prod(fs) => {
                let mut acc = self.eval_at(&fs[0], k)?;
                for f in &fs[1..] {
                    acc = acc.mul(&self.eval_at(f, k)?);
                }
                acc
            }
            Node::Neg(x) => self.eval_at(x, k)?.neg(),
            Node::Exp(x) => self.eval_at(x, k)?.exp(),
            Node::SetGe(m, x) => {
                let x = self.eval_at(x, k)?;
                set_ge_value(&x, *m, d)
            }
            Node::Subst(x, j) => self.eval_at(x, k * j)?,
            Node::Geom(x) => {
                let b = self.eval_at(x, k)?;
                let one = R::one(&d);
                if b >= one || !b.is_finite() {
                    return Err(ScalarError::Divergent(b.to_f64()));
                }
                one.div(&one.sub(&b))
            }
            Node::Frozen(p) => {
                let zk = self.z.powi(k);
                let entry = self
                    .polys
                    .entry(Arc::as_ptr(p))
                    .or_insert_with(|| (p.clone(), p.iter().map(|c| R::from_rational(c, &d)).collect()));
                let mut acc = R::zero(&d);
                for c in entry.1.iter().rev() {
                    acc = acc.mul(&zk).add(c);
                }
                acc
            }
            Node::PSet(_) => return Err(ScalarError::NotScalar("PSet")),
            Node::PSetTail(_) => return Err(ScalarError::NotScalar("PSetTail")),
            Node::PSetGe(..) => return Err(ScalarError::NotScalar("PSetGe")),
            Node::Unroot(_) => return Err(ScalarError::NotScalar("Unroot")),
        })
    }
}

/// `Σ_{j≥m} x^j/j!`, summed directly for small `|x|` to avoid cancellation.
fn set_ge_value<R: Real>(x: &R, m: u32, d: Domain) -> R {
    let one = R::one(&d);
    if x.abs() >= one {
        let mut acc = x.exp();
        let mut t = one.clone();
        for j in 0..m {
            if j > 0 {
                t = t.mul(x).div_i64(j as i64);
            }
            acc = acc.sub(&t);
        }
        return acc;
    }
    let mut t = one;
    for j in 1..=m {
        t = t.mul(x).div_i64(j as i64);
    }
    let bits = d.bits().unwrap_or(256) as i32 + 8;
    let eps = R::from_f64(2f64.powi(-bits.min(1000)), &d);
    let mut acc = t.clone();
    let mut j = m as i64;
    loop {
        j += 1;
        t = t.mul(x).div_i64(j);
        acc = acc.add(&t);
        if t.abs() <= acc.abs().mul(&eps) || j > 100_000 {
            return acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::expr::*;
    use super::*;
    use crate::num::{BigFloat, Field};

    #[test]
    fn evaluates_frozen_and_subst() {
        let d = Domain::Machine;
        let mut ev = ScalarEvaluator::<f64>::new(d);
        let mut vars = HashMap::new();
        vars.insert("C".to_string(), 0.5);
        ev.set_point(0.5, vars, HashMap::new());
        let e = sum([var("C"), subst(mul(atom(), atom()), 2), geom(var("C"))]);
        let got = ev.eval(&e).unwrap();
        assert!((got - (0.5 + 0.0625 + 2.0)).abs() < 1e-15);
        let f = frozen(vec![1.into(), 2.into(), 3.into()]);
        assert!((ev.eval(&f).unwrap() - (1.0 + 1.0 + 0.75)).abs() < 1e-15);
        assert!(matches!(ev.eval(&pset(var("C"))), Err(ScalarError::NotScalar("PSet"))));
        assert!(matches!(ev.eval(&geom(int(2))), Err(ScalarError::Divergent(_))));
    }

    #[test]
    fn set_ge_is_accurate_near_zero() {
        let d = Domain::float(256);
        let mut ev = ScalarEvaluator::<BigFloat>::new(d);
        let mut vars = HashMap::new();
        vars.insert("C".to_string(), BigFloat::from_f64_bits(1e-30, 256));
        ev.set_point(BigFloat::zero(&d), vars, HashMap::new());
        let got = ev.eval(&set_ge(2, var("C"))).unwrap();
        // x^2/2 + x^3/6 with x = 1e-30 (as a binary double)
        let rel = (got.to_f64() / (1e-60 / 2.0) - 1.0).abs();
        assert!(rel < 1e-12, "{rel}");
        vars = HashMap::new();
        vars.insert("C".to_string(), BigFloat::from_f64_bits(2.0, 256));
        ev.set_point(BigFloat::zero(&d), vars, HashMap::new());
        let got = ev.eval(&set_ge(1, var("C"))).unwrap();
        assert!((got.to_f64() - (2f64.exp() - 1.0)).abs() < 1e-14);
    }
}
