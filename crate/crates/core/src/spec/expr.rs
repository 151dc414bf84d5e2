//! Expression DAG for right-hand sides of functional systems.
//!
//! Nodes are shared through [`Arc`] and built only through the smart
//! constructors below, which keep every expression in a normal form:
//! sums and products are flattened, constants are folded (one trailing
//! constant per sum, one leading constant per product), a product whose
//! constant is `-1` becomes [`Node::Neg`], and `Neg` never wraps a
//! constant, a product with a constant, or another `Neg`.  Printing then
//! parsing a normal-form expression yields the same tree.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::num::Rational;

pub type Expr = Arc<Node>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Const(Rational),
    Atom,
    Marker(String),
    Var(String),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Neg(Expr),
    Exp(Expr),
    PSet(Expr),
    PSetTail(Expr),
    SetGe(u32, Expr),
    PSetGe(u32, Expr),
    Subst(Expr, u32),
    Geom(Expr),
    Unroot(Expr),
    /// Exact polynomial in `z`, coefficients from degree 0 upward, with no
    /// trailing zeros.
    Frozen(Arc<Vec<Rational>>),
}

/// Differentiation / evaluation target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wrt {
    Z,
    Var(String),
    Marker(String),
}

impl fmt::Display for Wrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wrt::Z => write!(f, "z"),
            Wrt::Var(v) | Wrt::Marker(v) => write!(f, "{v}"),
        }
    }
}

pub fn konst(c: Rational) -> Expr {
    Arc::new(Node::Const(c))
}

pub fn int(v: i64) -> Expr {
    konst(Rational::from(v))
}

pub fn ratio(p: i64, q: u64) -> Expr {
    konst(Rational::from_parts(p.into(), q.into()))
}

pub fn zero() -> Expr {
    int(0)
}

pub fn one() -> Expr {
    int(1)
}

pub fn atom() -> Expr {
    Arc::new(Node::Atom)
}

pub fn var(name: &str) -> Expr {
    Arc::new(Node::Var(name.to_string()))
}

pub fn marker(name: &str) -> Expr {
    Arc::new(Node::Marker(name.to_string()))
}

pub fn as_const(e: &Expr) -> Option<&Rational> {
    match &**e {
        Node::Const(c) => Some(c),
        _ => None,
    }
}

pub fn is_zero(e: &Expr) -> bool {
    as_const(e).is_some_and(|c| *c == Rational::ZERO)
}

pub fn is_one(e: &Expr) -> bool {
    as_const(e).is_some_and(|c| *c == Rational::ONE)
}

pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
    let mut out = Vec::new();
    let mut c = Rational::ZERO;
    for t in terms {
        match &*t {
            Node::Const(k) => c += k,
            Node::Sum(inner) => {
                for u in inner {
                    match &**u {
                        Node::Const(k) => c += k,
                        _ => out.push(u.clone()),
                    }
                }
            }
            _ => out.push(t),
        }
    }
    if c != Rational::ZERO {
        out.push(konst(c));
    }
    match out.len() {
        0 => zero(),
        1 => out.pop().unwrap(),
        _ => Arc::new(Node::Sum(out)),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    sum([a, b])
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    sum([a, neg(b)])
}

pub fn prod(factors: impl IntoIterator<Item = Expr>) -> Expr {
    let mut out = Vec::new();
    let mut c = Rational::ONE;
    fn absorb(f: &Expr, c: &mut Rational, out: &mut Vec<Expr>) {
        match &**f {
            Node::Const(k) => *c *= k,
            Node::Neg(x) => {
                *c = -c.clone();
                absorb(x, c, out);
            }
            Node::Prod(inner) => {
                for u in inner {
                    absorb(u, c, out);
                }
            }
            _ => out.push(f.clone()),
        }
    }
    for f in factors {
        absorb(&f, &mut c, &mut out);
    }
    if c == Rational::ZERO {
        return zero();
    }
    let body = match out.len() {
        0 => return konst(c),
        1 if c == Rational::ONE || c == -Rational::ONE => out.pop().unwrap(),
        _ => {
            if c != Rational::ONE && c != -Rational::ONE {
                out.insert(0, konst(c));
                return Arc::new(Node::Prod(out));
            }
            Arc::new(Node::Prod(out))
        }
    };
    if c == Rational::ONE {
        body
    } else {
        wrap_neg(body)
    }
}

fn wrap_neg(e: Expr) -> Expr {
    match &*e {
        Node::Const(c) => konst(-c.clone()),
        Node::Neg(x) => x.clone(),
        _ => Arc::new(Node::Neg(e)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    prod([a, b])
}

pub fn neg(e: Expr) -> Expr {
    match &*e {
        Node::Const(c) => konst(-c.clone()),
        Node::Neg(x) => x.clone(),
        Node::Prod(_) => prod([int(-1), e]),
        _ => Arc::new(Node::Neg(e)),
    }
}

pub fn scale(c: Rational, e: Expr) -> Expr {
    prod([konst(c), e])
}

pub fn pow(e: Expr, k: u32) -> Expr {
    prod(std::iter::repeat(e).take(k as usize))
}

pub fn exp(e: Expr) -> Expr {
    if is_zero(&e) {
        return one();
    }
    Arc::new(Node::Exp(e))
}

pub fn pset(e: Expr) -> Expr {
    if is_zero(&e) {
        return one();
    }
    Arc::new(Node::PSet(e))
}

pub fn pset_tail(e: Expr) -> Expr {
    if is_zero(&e) {
        return one();
    }
    Arc::new(Node::PSetTail(e))
}

pub fn set_ge(k: u32, e: Expr) -> Expr {
    if k == 0 {
        return exp(e);
    }
    if is_zero(&e) {
        return zero();
    }
    Arc::new(Node::SetGe(k, e))
}

pub fn pset_ge(k: u32, e: Expr) -> Expr {
    if k == 0 {
        return pset(e);
    }
    if is_zero(&e) {
        return zero();
    }
    Arc::new(Node::PSetGe(k, e))
}

pub fn subst(e: Expr, k: u32) -> Expr {
    if k == 1 || as_const(&e).is_some() {
        return e;
    }
    if let Node::Subst(inner, j) = &*e {
        return subst(inner.clone(), j * k);
    }
    Arc::new(Node::Subst(e, k))
}

pub fn geom(e: Expr) -> Expr {
    if is_zero(&e) {
        return one();
    }
    Arc::new(Node::Geom(e))
}

pub fn unroot(e: Expr) -> Expr {
    if is_zero(&e) {
        return zero();
    }
    Arc::new(Node::Unroot(e))
}

pub fn frozen(mut poly: Vec<Rational>) -> Expr {
    while poly.last().is_some_and(|c| *c == Rational::ZERO) {
        poly.pop();
    }
    match poly.len() {
        0 => zero(),
        1 => konst(poly.pop().unwrap()),
        _ => Arc::new(Node::Frozen(Arc::new(poly))),
    }
}

impl Node {
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Node::Const(_) | Node::Atom | Node::Marker(_) | Node::Var(_) | Node::Frozen(_) => vec![],
            Node::Sum(v) | Node::Prod(v) => v.iter().collect(),
            Node::Neg(e)
            | Node::Exp(e)
            | Node::PSet(e)
            | Node::PSetTail(e)
            | Node::SetGe(_, e)
            | Node::PSetGe(_, e)
            | Node::Subst(e, _)
            | Node::Geom(e)
            | Node::Unroot(e) => vec![e],
        }
    }

    /// Rebuilds this node with new children (same arity, same order).
    pub fn rebuild(&self, kids: Vec<Expr>) -> Expr {
        let one_kid = || kids[0].clone();
        match self {
            Node::Const(_) | Node::Atom | Node::Marker(_) | Node::Var(_) | Node::Frozen(_) => {
                Arc::new(self.clone())
            }
            Node::Sum(_) => sum(kids),
            Node::Prod(_) => prod(kids),
            Node::Neg(_) => neg(one_kid()),
            Node::Exp(_) => exp(one_kid()),
            Node::PSet(_) => pset(one_kid()),
            Node::PSetTail(_) => pset_tail(one_kid()),
            Node::SetGe(k, _) => set_ge(*k, one_kid()),
            Node::PSetGe(k, _) => pset_ge(*k, one_kid()),
            Node::Subst(_, k) => subst(one_kid(), *k),
            Node::Geom(_) => geom(one_kid()),
            Node::Unroot(_) => unroot(one_kid()),
        }
    }
}

fn walk<'a>(e: &'a Expr, seen: &mut std::collections::HashSet<*const Node>, f: &mut impl FnMut(&'a Expr)) {
    if !seen.insert(Arc::as_ptr(e)) {
        return;
    }
    f(e);
    for c in e.children() {
        walk(c, seen, f);
    }
}

/// Calls `f` once for every distinct node reachable from `e`.
pub fn visit<'a>(e: &'a Expr, mut f: impl FnMut(&'a Expr)) {
    walk(e, &mut Default::default(), &mut f);
}

pub fn vars_of(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    visit(e, |n| {
        if let Node::Var(v) = &**n {
            out.insert(v.clone());
        }
    });
    out
}

pub fn markers_of(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    visit(e, |n| {
        if let Node::Marker(v) = &**n {
            out.insert(v.clone());
        }
    });
    out
}

pub fn has_var(e: &Expr) -> bool {
    let mut found = false;
    visit(e, |n| found |= matches!(&**n, Node::Var(_)));
    found
}

/// Replaces every `Var(name)` by `map(name)` when it returns `Some`.
pub fn substitute_vars(e: &Expr, map: &impl Fn(&str) -> Option<Expr>) -> Expr {
    let mut memo = std::collections::HashMap::new();
    subst_rec(e, map, &mut memo)
}

fn subst_rec(
    e: &Expr,
    map: &impl Fn(&str) -> Option<Expr>,
    memo: &mut std::collections::HashMap<*const Node, Expr>,
) -> Expr {
    if let Some(r) = memo.get(&Arc::as_ptr(e)) {
        return r.clone();
    }
    let r = match &**e {
        Node::Var(v) => map(v).unwrap_or_else(|| e.clone()),
        n if n.children().is_empty() => e.clone(),
        n => {
            let kids = n.children().into_iter().map(|c| subst_rec(c, map, memo)).collect();
            n.rebuild(kids)
        }
    };
    memo.insert(Arc::as_ptr(e), r.clone());
    r
}

/// Rebuilds `e` with every leaf for which `map` returns `Some` replaced.
pub fn replace_leaves(e: &Expr, map: &impl Fn(&Node) -> Option<Expr>) -> Expr {
    fn rec(
        e: &Expr,
        map: &impl Fn(&Node) -> Option<Expr>,
        memo: &mut std::collections::HashMap<*const Node, Expr>,
    ) -> Expr {
        if let Some(r) = memo.get(&Arc::as_ptr(e)) {
            return r.clone();
        }
        let kids = e.children();
        let r = if kids.is_empty() {
            map(e).unwrap_or_else(|| e.clone())
        } else {
            let kids = kids.into_iter().map(|c| rec(c, map, memo)).collect();
            e.rebuild(kids)
        };
        memo.insert(Arc::as_ptr(e), r.clone());
        r
    }
    rec(e, map, &mut std::collections::HashMap::new())
}

/// Replaces `Marker(name)` nodes by `map(name)` when it returns `Some`.
pub fn substitute_markers(e: &Expr, map: &impl Fn(&str) -> Option<Expr>) -> Expr {
    fn rec(
        e: &Expr,
        map: &impl Fn(&str) -> Option<Expr>,
        memo: &mut std::collections::HashMap<*const Node, Expr>,
    ) -> Expr {
        if let Some(r) = memo.get(&Arc::as_ptr(e)) {
            return r.clone();
        }
        let r = match &**e {
            Node::Marker(m) => map(m).unwrap_or_else(|| e.clone()),
            n if n.children().is_empty() => e.clone(),
            n => {
                let kids = n.children().into_iter().map(|c| rec(c, map, memo)).collect();
                n.rebuild(kids)
            }
        };
        memo.insert(Arc::as_ptr(e), r.clone());
        r
    }
    rec(e, map, &mut Default::default())
}

/// Number of distinct nodes in the DAG.
pub fn dag_size(e: &Expr) -> usize {
    let mut n = 0;
    visit(e, |_| n += 1);
    n
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::print::print_expr(&Arc::new(self.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_flatten_and_fold() {
        let e = sum([int(1), sum([var("C"), int(2)]), int(-3)]);
        assert_eq!(e, var("C"));
        assert_eq!(sum([int(1), int(-1)]), zero());
    }

    #[test]
    fn products_pull_signs_and_constants() {
        let c = var("C");
        assert_eq!(prod([int(-1), c.clone()]), neg(c.clone()));
        assert_eq!(neg(neg(c.clone())), c);
        assert_eq!(neg(int(3)), int(-3));
        let p = prod([neg(c.clone()), atom()]);
        assert!(matches!(&*p, Node::Neg(x) if matches!(&**x, Node::Prod(_))));
        let q = prod([int(2), neg(c.clone())]);
        assert_eq!(q, prod([int(-2), c.clone()]));
        assert_eq!(prod([int(0), c]), zero());
    }

    #[test]
    fn subst_normalizes() {
        let c = var("C");
        assert_eq!(subst(c.clone(), 1), c);
        assert_eq!(subst(subst(c.clone(), 2), 3), subst(c, 6));
        assert_eq!(subst(int(5), 4), int(5));
    }

    #[test]
    fn frozen_trims() {
        let r = |v: i64| Rational::from(v);
        assert_eq!(frozen(vec![r(2), r(0)]), int(2));
        assert!(matches!(&*frozen(vec![r(1), r(0), r(1)]), Node::Frozen(p) if p.len() == 3));
    }
}
