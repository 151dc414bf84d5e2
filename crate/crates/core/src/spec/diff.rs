//! Symbolic partial derivatives.
//!
//! Variables are the `i = 1` slice of the system: occurrences under
//! `Subst(., k >= 2)` are separate (frozen) inputs and have zero derivative
//! with respect to a variable.  The same convention gives
//! `d PSet(e) / dy = PSet(e) * de/dy`.

use std::collections::HashMap;
use std::sync::Arc;

use super::expr::{self, Expr, Node, Wrt};
use crate::num::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiffError {
    #[error("{ctor} has no closed-form derivative with respect to {wrt}; freeze the system first")]
    NotDifferentiable { ctor: &'static str, wrt: Wrt },
}

/// Memoizing differentiator for one target; reuse it across expressions
/// of the same system to keep the output DAG shared.
pub struct Differentiator {
    wrt: Wrt,
    memo: HashMap<*const Node, (Expr, Expr)>,
    deps: HashMap<*const Node, (Expr, bool)>,
}

impl Differentiator {
    pub fn new(wrt: Wrt) -> Self {
        Differentiator { wrt, memo: HashMap::new(), deps: HashMap::new() }
    }

    fn depends(&mut self, e: &Expr) -> bool {
        let key = Arc::as_ptr(e);
        if let Some((_, d)) = self.deps.get(&key) {
            return *d;
        }
        let d = match (&**e, &self.wrt) {
            (Node::Atom | Node::Frozen(_), Wrt::Z) => true,
            (Node::Var(v), Wrt::Var(w)) | (Node::Marker(v), Wrt::Marker(w)) => v == w,
            (Node::Subst(_, _), Wrt::Var(_)) => false,
            (Node::Subst(x, _) | Node::PSet(x) | Node::PSetTail(x) | Node::PSetGe(_, x), _) if expr::has_var(x) => true,
            (n, _) => {
                let kids: Vec<Expr> = n.children().into_iter().cloned().collect();
                kids.iter().any(|c| self.depends(c))
            }
        };
        self.deps.insert(key, (e.clone(), d));
        d
    }

    pub fn diff(&mut self, e: &Expr) -> Result<Expr, DiffError> {
        let key = Arc::as_ptr(e);
        if let Some((_, d)) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let d = if self.depends(e) { self.rule(e)? } else { expr::zero() };
        self.memo.insert(key, (e.clone(), d.clone()));
        Ok(d)
    }

    fn not_diff(&self, ctor: &'static str) -> DiffError {
        DiffError::NotDifferentiable { ctor, wrt: self.wrt.clone() }
    }

    fn rule(&mut self, e: &Expr) -> Result<Expr, DiffError> {
        use expr::*;
        let by_var = matches!(self.wrt, Wrt::Var(_));
        Ok(match &**e {
            Node::Const(_) => zero(),
            Node::Atom | Node::Var(_) | Node::Marker(_) => one(),
            Node::Sum(ts) => {
                let mut out = Vec::with_capacity(ts.len());
                for t in ts {
                    out.push(self.diff(t)?);
                }
                sum(out)
            }
            Node::Prod(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let di = self.diff(&fs[i])?;
                    if is_zero(&di) {
                        continue;
                    }
                    let mut parts: Vec<Expr> =
                        fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
                    parts.push(di);
                    terms.push(prod(parts));
                }
                sum(terms)
            }
            Node::Neg(x) => neg(self.diff(x)?),
            Node::Exp(x) => mul(e.clone(), self.diff(x)?),
            Node::SetGe(k, x) => mul(set_ge(k - 1, x.clone()), self.diff(x)?),
            Node::Geom(x) => prod([e.clone(), e.clone(), self.diff(x)?]),
            Node::PSet(x) if by_var => mul(e.clone(), self.diff(x)?),
            Node::PSetGe(k, x) if by_var => mul(pset_ge(k - 1, x.clone()), self.diff(x)?),
            Node::PSetTail(_) if by_var => zero(),
            Node::PSet(_) => return Err(self.not_diff("PSet")),
            Node::PSetGe(..) => return Err(self.not_diff("PSetGe")),
            Node::PSetTail(_) => return Err(self.not_diff("PSetTail")),
            Node::Unroot(x) => match self.wrt {
                Wrt::Z => return Err(self.not_diff("Unroot")),
                _ => unroot(self.diff(x)?),
            },
            Node::Subst(x, k) => {
                let base = match &self.wrt {
                    Wrt::Var(_) => return Ok(zero()),
                    Wrt::Z => atom(),
                    Wrt::Marker(m) => marker(m),
                };
                if expr::has_var(x) {
                    return Err(self.not_diff("Subst over a variable"));
                }
                let dx = self.diff(x)?;
                prod([int(*k as i64), pow(base, k - 1), subst(dx, *k)])
            }
            Node::Frozen(p) => {
                let dp: Vec<Rational> =
                    p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from(i as i64)).collect();
                frozen(dp)
            }
        })
    }
}

/// `∂e/∂wrt`.
pub fn differentiate(e: &Expr, wrt: &Wrt) -> Result<Expr, DiffError> {
    Differentiator::new(wrt.clone()).diff(e)
}

#[cfg(test)]
mod tests {
    use super::super::expr::*;
    use super::*;

    #[test]
    fn tree_derivatives() {
        let f = mul(atom(), exp(var("C")));
        assert_eq!(differentiate(&f, &Wrt::Var("C".into())).unwrap(), f);
        assert_eq!(differentiate(&f, &Wrt::Z).unwrap(), exp(var("C")));
    }

    #[test]
    fn subst_rules() {
        let c = var("C");
        let e = subst(c.clone(), 2);
        assert_eq!(differentiate(&e, &Wrt::Var("C".into())).unwrap(), zero());
        let e = subst(mul(marker("v"), atom()), 3);
        let d = differentiate(&e, &Wrt::Marker("v".into())).unwrap();
        // 3 v^2 z^3
        assert_eq!(d, prod([int(3), marker("v"), marker("v"), subst(atom(), 3)]));
    }

    #[test]
    fn pset_by_var_and_z() {
        let e = pset(var("C"));
        assert_eq!(differentiate(&e, &Wrt::Var("C".into())).unwrap(), e);
        assert!(differentiate(&mul(atom(), e), &Wrt::Z).is_err());
        assert!(differentiate(&pset(var("C")), &Wrt::Z).is_err());
        assert!(differentiate(&subst(var("C"), 2), &Wrt::Marker("v".into())).is_err());
        assert_eq!(differentiate(&pset(var("C")), &Wrt::Marker("v".into())).ok(), None);
    }

    #[test]
    fn frozen_and_geom() {
        let f = frozen(vec![1.into(), 2.into(), 3.into()]);
        assert_eq!(differentiate(&f, &Wrt::Z).unwrap(), frozen(vec![2.into(), 6.into()]));
        assert_eq!(differentiate(&f, &Wrt::Var("C".into())).unwrap(), zero());
        let g = geom(var("C"));
        assert_eq!(differentiate(&g, &Wrt::Var("C".into())).unwrap(), prod([g.clone(), g]));
    }
}
