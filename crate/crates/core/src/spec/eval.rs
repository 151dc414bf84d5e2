//! Series-valued evaluation of expressions.
//!
//! Evaluation carries a *power* `k`: the expression is read with every
//! marker `v` replaced by `v^k` and every variable replaced by its value at
//! `v^k`, while `z` stays `z`.  `Subst(e, j)` evaluates `e` at power `k*j`
//! and order `N/j`, then substitutes `z^j`.

use std::collections::HashMap;
use std::sync::Arc;

use super::expr::{Expr, Node};
use crate::num::{Domain, Field};
use crate::series::{SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable '{0}'")]
    UnboundVar(String),
    #[error("unbound marker '{0}'")]
    UnboundMarker(String),
    #[error("variable '{name}' is known only to order {have}, order {need} requested")]
    ShortSeries { name: String, have: usize, need: usize },
    #[error("variable '{name}' is needed at marker power {power}, which this environment cannot supply")]
    MarkerPower { name: String, power: u32 },
    #[error("{0}")]
    Series(#[from] SeriesError),
}

/// Supplies variable values to the series evaluator.
pub trait SeriesEnv<C: Field> {
    /// `name` evaluated with markers raised to `power`, as a series in `z`
    /// known at least to `order`.
    fn lookup(&self, name: &str, power: u32, order: usize) -> Result<TruncatedSeries<C>, EvalError>;
}

/// Plain map environment.  Variables at marker power `k > 1` resolve to
/// the same series, which is correct when every marker value `v` satisfies
/// `v^k = v` (no markers, or markers pinned to 1).
pub struct MapEnv<'a, C> {
    pub vars: &'a HashMap<String, TruncatedSeries<C>>,
}

impl<C: Field> SeriesEnv<C> for MapEnv<'_, C> {
    fn lookup(&self, name: &str, _power: u32, order: usize) -> Result<TruncatedSeries<C>, EvalError> {
        let s = self.vars.get(name).ok_or_else(|| EvalError::UnboundVar(name.into()))?;
        if s.order() < order {
            return Err(EvalError::ShortSeries { name: name.into(), have: s.order(), need: order });
        }
        Ok(s.truncate(order))
    }
}

type Key = (*const Node, usize, u32);

pub struct SeriesEvaluator<'a, C: Field> {
    env: &'a dyn SeriesEnv<C>,
    markers: &'a HashMap<String, C>,
    domain: Domain,
    cache: HashMap<Key, (Expr, TruncatedSeries<C>)>,
}

impl<'a, C: Field> SeriesEvaluator<'a, C> {
    pub fn new(env: &'a dyn SeriesEnv<C>, markers: &'a HashMap<String, C>, domain: Domain) -> Self {
        SeriesEvaluator { env, markers, domain, cache: HashMap::new() }
    }

    pub fn eval(&mut self, e: &Expr, order: usize) -> Result<TruncatedSeries<C>, EvalError> {
        self.eval_at(e, order, 1)
    }

    pub fn eval_at(&mut self, e: &Expr, order: usize, power: u32) -> Result<TruncatedSeries<C>, EvalError> {
        let key = (Arc::as_ptr(e), order, power);
        if let Some((_, s)) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let s = self.compute(e, order, power)?;
        self.cache.insert(key, (e.clone(), s.clone()));
        Ok(s)
    }

    fn konst(&self, c: C, order: usize) -> TruncatedSeries<C> {
        TruncatedSeries::constant(c, order)
    }

    fn subst_term(&mut self, e: &Expr, j: u32, order: usize, power: u32) -> Result<TruncatedSeries<C>, EvalError> {
        let inner = self.eval_at(e, order / j as usize, power * j)?;
        Ok(inner.plethysm_to(j as usize, order)?)
    }

    fn polya_terms(&mut self, e: &Expr, order: usize, power: u32) -> Result<Vec<TruncatedSeries<C>>, EvalError> {
        (1..=order.max(1)).map(|i| self.subst_term(e, i as u32, order, power)).collect()
    }

    fn polya_exp(&mut self, e: &Expr, from: usize, order: usize, power: u32) -> Result<TruncatedSeries<C>, EvalError> {
        let mut acc = TruncatedSeries::zero(order, self.domain);
        for i in from..=order.max(1) {
            let t = self.subst_term(e, i as u32, order, power)?;
            acc = acc.add(&t.scale(&C::one(&self.domain).div_i64(i as i64)))?;
        }
        Ok(acc.exp()?)
    }

    fn compute(&mut self, e: &Expr, order: usize, power: u32) -> Result<TruncatedSeries<C>, EvalError> {
        let d = self.domain;
        Ok(match &**e {
            Node::Const(c) => self.konst(C::from_rational(c, &d), order),
            Node::Atom => TruncatedSeries::atom(order, d),
            Node::Marker(m) => {
                let v = self.markers.get(m).ok_or_else(|| EvalError::UnboundMarker(m.clone()))?;
                self.konst(v.powi(power), order)
            }
            Node::Var(v) => self.env.lookup(v, power, order)?,
            Node::Sum(ts) => {
                let mut acc = self.eval_at(&ts[0], order, power)?;
                for t in &ts[1..] {
                    acc = acc.add(&self.eval_at(t, order, power)?)?;
                }
                acc
            }
            Node::Prod(fs) => {
                let mut acc = self.eval_at(&fs[0], order, power)?;
                for f in &fs[1..] {
                    acc = acc.mul(&self.eval_at(f, order, power)?)?;
                }
                acc
            }
            Node::Neg(x) => self.eval_at(x, order, power)?.neg(),
            Node::Exp(x) => self.eval_at(x, order, power)?.exp()?,
            Node::PSet(x) => self.polya_exp(x, 1, order, power)?,
            Node::PSetTail(x) => self.polya_exp(x, 2, order, power)?,
            Node::SetGe(m, x) => {
                let s = self.eval_at(x, order, power)?;
                let mut acc = s.exp()?;
                let mut p = TruncatedSeries::one(order, d);
                let mut fact = C::one(&d);
                for j in 0..*m {
                    if j > 0 {
                        p = p.mul(&s)?;
                        fact = fact.mul_i64(j as i64);
                    }
                    acc = acc.sub(&p.scale(&C::one(&d).div(&fact)))?;
                }
                acc
            }
            Node::PSetGe(m, x) => {
                let terms = self.polya_terms(x, order, power)?;
                let mut sum = TruncatedSeries::zero(order, d);
                for (i, t) in terms.iter().enumerate() {
                    sum = sum.add(&t.scale(&C::one(&d).div_i64(i as i64 + 1)))?;
                }
                let mut acc = sum.exp()?;
                // h_j = (1/j) sum_{i=1..j} p_i h_{j-i}: the cycle-index slices of size j
                let mut h = vec![TruncatedSeries::one(order, d)];
                for j in 0..*m as usize {
                    if j > 0 {
                        let mut hj = TruncatedSeries::zero(order, d);
                        for i in 1..=j {
                            let p = terms.get(i - 1).cloned().unwrap_or_else(|| TruncatedSeries::zero(order, d));
                            hj = hj.add(&p.mul(&h[j - i])?)?;
                        }
                        h.push(hj.scale(&C::one(&d).div_i64(j as i64)));
                    }
                    acc = acc.sub(&h[j])?;
                }
                acc
            }
            Node::Subst(x, j) => self.subst_term(x, *j, order, power)?,
            Node::Geom(x) => self.eval_at(x, order, power)?.geom()?,
            Node::Unroot(x) => self.eval_at(x, order, power)?.unroot()?,
            Node::Frozen(p) => {
                let coeffs = p.iter().map(|c| C::from_rational(c, &d)).collect();
                TruncatedSeries::from_coeffs(coeffs, order, d)
            }
        })
    }
}

/// Evaluates `e` to order `n` with variables from `env`.
pub fn evaluate<C: Field>(
    e: &Expr,
    env: &HashMap<String, TruncatedSeries<C>>,
    markers: &HashMap<String, C>,
    n: usize,
    domain: Domain,
) -> Result<TruncatedSeries<C>, EvalError> {
    let env = MapEnv { vars: env };
    SeriesEvaluator::new(&env, markers, domain).eval(e, n)
}

#[cfg(test)]
mod tests {
    use super::super::expr::*;
    use super::*;
    use crate::num::Rational;
    use crate::series::ExactSeries;

    fn env(pairs: &[(&str, ExactSeries)]) -> HashMap<String, ExactSeries> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn exp_and_pset_of_atom() {
        let n = 6;
        let z = ExactSeries::atom(n, Domain::Exact);
        let e = env(&[("C", z.clone())]);
        let none = HashMap::new();
        let got = evaluate(&exp(var("C")), &e, &none, n, Domain::Exact).unwrap();
        assert_eq!(got, z.exp().unwrap());
        let got = evaluate(&pset(var("C")), &e, &none, n, Domain::Exact).unwrap();
        assert_eq!(got, ExactSeries::from_ints(&[1; 7]));
    }

    #[test]
    fn pset_factors_as_exp_times_tail() {
        let n = 10;
        let f = ExactSeries::from_ints(&[0, 1, 3, 0, 2, 5, 1, 0, 7, 1, 2]);
        let e = env(&[("C", f)]);
        let none = HashMap::new();
        let lhs = evaluate(&pset(var("C")), &e, &none, n, Domain::Exact).unwrap();
        let rhs = evaluate(&mul(exp(var("C")), pset_tail(var("C"))), &e, &none, n, Domain::Exact).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn set_ge_and_pset_ge() {
        let n = 6;
        let z = ExactSeries::atom(n, Domain::Exact);
        let e = env(&[("C", z.clone())]);
        let none = HashMap::new();
        // SetGe(2, z) = e^z - 1 - z
        let got = evaluate(&set_ge(2, var("C")), &e, &none, n, Domain::Exact).unwrap();
        let want = z.exp().unwrap().sub(&ExactSeries::from_ints(&[1, 1, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(got, want);
        // multisets of at least 2 copies of one atom: z^2 + z^3 + ...
        let got = evaluate(&pset_ge(2, var("C")), &e, &none, n, Domain::Exact).unwrap();
        assert_eq!(got, ExactSeries::from_ints(&[0, 0, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn subst_raises_markers() {
        let n = 6;
        let mut markers = HashMap::new();
        markers.insert("v".to_string(), Rational::from(2));
        let e = subst(mul(marker("v"), atom()), 2);
        let got = evaluate(&e, &HashMap::new(), &markers, n, Domain::Exact).unwrap();
        assert_eq!(got, ExactSeries::from_ints(&[0, 0, 4, 0, 0, 0, 0]));
    }

    #[test]
    fn cacti_slice_matches_closed_form() {
        // y + y^2/(2(1-y)) + (1+y) s2/(2(1-s2)) with y, s2 given series
        let n = 8;
        let y = ExactSeries::from_ints(&[0, 1, 1, 3, 0, 2, 1, 0, 1]);
        let f = ExactSeries::from_ints(&[0, 1, 2, 0, 1, 0, 0, 3, 1]);
        let e = env(&[("Y", y.clone()), ("F", f.clone())]);
        let g = parse_g();
        let got = evaluate(&g, &e, &HashMap::new(), n, Domain::Exact).unwrap();
        let half = Rational::from_parts(1.into(), 2u8.into());
        let geo_y = y.geom().unwrap();
        let f2 = f.plethysm_scale(2).unwrap();
        let one = ExactSeries::one(n, Domain::Exact);
        let want = y
            .add(&y.mul(&y).unwrap().mul(&geo_y).unwrap().scale(&half))
            .unwrap()
            .add(&one.add(&y).unwrap().mul(&f2).unwrap().mul(&f2.geom().unwrap()).unwrap().scale(&half))
            .unwrap();
        assert_eq!(got, want);
    }

    fn parse_g() -> Expr {
        super::super::parse_expr(
            "Y + 1/2*Y*Y*Geom(Y) + 1/2*(1 + Y)*Subst(F, 2)*Geom(Subst(F, 2))",
            super::super::Flavor::Unlabelled,
            &[],
        )
        .unwrap()
    }

    #[test]
    fn unbound_errors() {
        let r = evaluate::<Rational>(&var("Q"), &HashMap::new(), &HashMap::new(), 3, Domain::Exact);
        assert_eq!(r, Err(EvalError::UnboundVar("Q".into())));
        let r = evaluate::<Rational>(&marker("w"), &HashMap::new(), &HashMap::new(), 3, Domain::Exact);
        assert_eq!(r, Err(EvalError::UnboundMarker("w".into())));
        let e = env(&[("C", ExactSeries::one(3, Domain::Exact))]);
        let r = evaluate(&exp(var("C")), &e, &HashMap::new(), 3, Domain::Exact);
        assert!(matches!(r, Err(EvalError::Series(SeriesError::NonzeroConstant(_)))));
    }
}
