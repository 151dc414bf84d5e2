//! Exponent supports of `F(y; z, v)` and the determinant test for `σ² > 0`.
//!
//! `F` is expanded in exact arithmetic as a polynomial in `(z, y, v)`
//! truncated at degree [`CAP`] in each variable.  The principal variable
//! becomes `y`, inner variables are expanded as functions of `(y, z, v)`,
//! and every `Subst(x, k)` with `k >= 2` uses the solved bivariate series
//! of `x` in `(z, v)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::num::Rational;
use crate::solver::{expand_pset_ge, FunctionalSystem};
use crate::spec::expr::{Expr, Node};

/// Per-variable degree cap of the expansion.
pub const CAP: u32 = 4;
/// Number of support triples searched by [`positivity_check`].
pub const SEARCH: usize = 30;

type Mono = [u32; 3];

#[derive(Clone, Debug, PartialEq, Default)]
struct Poly(BTreeMap<Mono, Rational>);

impl Poly {
    fn constant(c: Rational) -> Self {
        Poly::monomial([0, 0, 0], c)
    }

    fn monomial(m: Mono, c: Rational) -> Self {
        let mut p = Poly::default();
        if m.iter().all(|&e| e <= CAP) && c != Rational::ZERO {
            p.0.insert(m, c);
        }
        p
    }

    fn constant_term(&self) -> Rational {
        self.0.get(&[0, 0, 0]).cloned().unwrap_or(Rational::ZERO)
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (m, c) in &o.0 {
            let e = out.entry(*m).or_insert(Rational::ZERO);
            *e += c;
            if *e == Rational::ZERO {
                out.remove(m);
            }
        }
        Poly(out)
    }

    fn scale(&self, c: &Rational) -> Poly {
        if *c == Rational::ZERO {
            return Poly::default();
        }
        Poly(self.0.iter().map(|(m, a)| (*m, a * c)).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out: BTreeMap<Mono, Rational> = BTreeMap::new();
        for (a, ca) in &self.0 {
            for (b, cb) in &o.0 {
                let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                if m.iter().any(|&e| e > CAP) {
                    continue;
                }
                *out.entry(m).or_insert(Rational::ZERO) += ca * cb;
            }
        }
        out.retain(|_, c| *c != Rational::ZERO);
        Poly(out)
    }

    /// `p(z^k, y^k, v^k)`.
    fn dilate(&self, k: u32) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(m, c)| ([m[0] * k, m[1] * k, m[2] * k], c.clone()))
                .filter(|(m, _)| m.iter().all(|&e| e <= CAP))
                .collect(),
        )
    }

    /// `Σ_j c_j u^j` for the nilpotent `u = self - constant`; at most
    /// `3 CAP` powers survive the truncation.
    fn power_series(&self, coeff: impl Fn(usize) -> Rational) -> Poly {
        let mut out = Poly::constant(coeff(0));
        let mut pw = Poly::constant(Rational::ONE);
        for j in 1..=(3 * CAP as usize) {
            pw = pw.mul(self);
            if pw.0.is_empty() {
                break;
            }
            out = out.add(&pw.scale(&coeff(j)));
        }
        out
    }

    fn exp(&self) -> Result<Poly, &'static str> {
        if self.constant_term() != Rational::ZERO {
            return Err("Exp of an argument with a nonzero constant term has irrational coefficients");
        }
        let mut fact = Rational::ONE;
        let mut facts = vec![Rational::ONE];
        for j in 1..=(3 * CAP as i64) {
            fact *= Rational::from(j);
            facts.push(fact.clone());
        }
        Ok(self.power_series(|j| Rational::ONE / &facts[j]))
    }

    fn geom(&self) -> Result<Poly, &'static str> {
        let c = self.constant_term();
        let s = Rational::ONE - &c;
        if s == Rational::ZERO {
            return Err("Geom of an argument with constant term 1");
        }
        let u = self.add(&Poly::constant(-c)).scale(&(Rational::ONE / &s));
        let inv = Rational::ONE / &s;
        Ok(u.power_series(|_| Rational::ONE).scale(&inv))
    }
}

struct Expander<'a> {
    marker: &'a str,
    markers: &'a HashMap<String, Rational>,
    slice1: &'a HashMap<String, Poly>,
    known: &'a HashMap<String, Poly>,
    memo: HashMap<(*const Node, u32), (Expr, Poly)>,
}

impl Expander<'_> {
    fn eval(&mut self, e: &Expr, k: u32) -> Result<Poly, &'static str> {
        let key = (Arc::as_ptr(e), k);
        if let Some((_, p)) = self.memo.get(&key) {
            return Ok(p.clone());
        }
        let p = self.compute(e, k)?;
        self.memo.insert(key, (e.clone(), p.clone()));
        Ok(p)
    }

    fn compute(&mut self, e: &Expr, k: u32) -> Result<Poly, &'static str> {
        Ok(match &**e {
            Node::Const(c) => Poly::constant(c.clone()),
            Node::Atom => Poly::monomial([k, 0, 0], Rational::ONE),
            Node::Marker(m) if m == self.marker => Poly::monomial([0, 0, k], Rational::ONE),
            Node::Marker(m) => {
                let c = self.markers.get(m).ok_or("unbound marker")?;
                let mut p = Rational::ONE;
                for _ in 0..k {
                    p *= c;
                }
                Poly::constant(p)
            }
            Node::Var(v) if k == 1 => self.slice1.get(v).cloned().ok_or("unknown variable")?,
            Node::Var(v) => self.known.get(v).ok_or("unknown variable")?.dilate(k),
            Node::Sum(ts) => {
                let mut acc = Poly::default();
                for t in ts {
                    acc = acc.add(&self.eval(t, k)?);
                }
                acc
            }
            Node::Prod(fs) => {
                let mut acc = Poly::constant(Rational::ONE);
                for f in fs {
                    acc = acc.mul(&self.eval(f, k)?);
                }
                acc
            }
            Node::Neg(x) => self.eval(x, k)?.scale(&Rational::from(-1)),
            Node::Exp(x) => self.eval(x, k)?.exp()?,
            Node::SetGe(m, x) => {
                let x = self.eval(x, k)?;
                let mut out = x.exp()?;
                let mut t = Poly::constant(Rational::ONE);
                for j in 0..*m {
                    if j > 0 {
                        t = t.mul(&x).scale(&Rational::from_parts(1.into(), (j as u64).into()));
                    }
                    out = out.add(&t.scale(&Rational::from(-1)));
                }
                out
            }
            Node::PSet(x) => self.pset(x, k, 1)?,
            Node::PSetTail(x) => self.pset(x, k, 2)?,
            Node::PSetGe(m, x) => {
                let expanded = expand_pset_ge(*m, x);
                self.eval(&expanded, k)?
            }
            Node::Subst(x, j) => self.eval(x, k * j)?,
            Node::Geom(x) => self.eval(x, k)?.geom()?,
            Node::Frozen(p) => {
                let mut acc = Poly::default();
                for (i, c) in p.iter().enumerate() {
                    acc = acc.add(&Poly::monomial([i as u32 * k, 0, 0], c.clone()));
                }
                acc
            }
            Node::Unroot(_) => return Err("Unroot has no support expansion"),
        })
    }

    /// `exp(Σ_{i >= from} x(z^{ki}, ...)/i)`.
    fn pset(&mut self, x: &Expr, k: u32, from: u32) -> Result<Poly, &'static str> {
        let mut arg = Poly::default();
        for i in from..=CAP {
            let xi = self.eval(x, k * i)?;
            if xi.constant_term() != Rational::ZERO {
                return Err("PSet of an argument with a nonzero constant term");
            }
            arg = arg.add(&xi.scale(&Rational::from_parts(1.into(), (i as u64).into())));
        }
        if self.eval(x, k)?.constant_term() != Rational::ZERO {
            return Err("PSet of an argument with a nonzero constant term");
        }
        arg.exp()
    }
}

fn iterate(
    system: &FunctionalSystem,
    marker: &str,
    which: &[usize],
    slice1: &mut HashMap<String, Poly>,
    known: &HashMap<String, Poly>,
) -> Result<(), &'static str> {
    let cap = 3 * (CAP as usize + 1) * (system.len() + 1);
    for _ in 0..cap {
        let mut ex = Expander { marker, markers: &system.markers, slice1, known, memo: HashMap::new() };
        let mut next = Vec::with_capacity(which.len());
        for &i in which {
            next.push(ex.eval(&system.rhs[i], 1)?);
        }
        let mut changed = false;
        for (&i, p) in which.iter().zip(next) {
            let slot = slice1.get_mut(&system.vars[i]).expect("seeded");
            if *slot != p {
                *slot = p;
                changed = true;
            }
        }
        if !changed {
            return Ok(());
        }
    }
    Err("support expansion did not stabilise")
}

/// Support triples `(n, m, k)` (exponents of `z`, `y`, `v`) of the
/// principal equation, inner variables eliminated, sorted by total degree.
pub fn support_triples(
    system: &FunctionalSystem,
    principal: &str,
    marker: &str,
) -> Result<Vec<(u32, u32, u32)>, &'static str> {
    let p = system.index_of(principal).ok_or("unknown principal variable")?;
    let all: Vec<usize> = (0..system.len()).collect();
    let mut known: HashMap<String, Poly> = system.vars.iter().map(|v| (v.clone(), Poly::default())).collect();
    // Solve the full system with y-free polynomials first; every slice
    // k >= 2 refers to these.
    loop {
        let before = known.clone();
        let mut cur = known.clone();
        iterate(system, marker, &all, &mut cur, &before)?;
        known = cur;
        if known == before {
            break;
        }
    }
    let mut slice1 = known.clone();
    slice1.insert(principal.to_string(), Poly::monomial([0, 1, 0], Rational::ONE));
    let inner: Vec<usize> = all.iter().copied().filter(|&i| i != p).collect();
    for &i in &inner {
        slice1.insert(system.vars[i].clone(), Poly::default());
    }
    iterate(system, marker, &inner, &mut slice1, &known)?;
    let mut ex = Expander { marker, markers: &system.markers, slice1: &slice1, known: &known, memo: HashMap::new() };
    let f = ex.eval(&system.rhs[p], 1)?;
    let mut out: Vec<(u32, u32, u32)> = f.0.keys().map(|m| (m[0], m[1], m[2])).collect();
    out.sort_by_key(|&(n, m, k)| (n + m + k, n, m, k));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum PositivityOutcome {
    /// Rows `(n, m - 1, k)` of the witnesses have a nonzero determinant.
    Certified { witness: [(u32, u32, u32); 3], det: i64 },
    Inconclusive,
}

impl PositivityOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, PositivityOutcome::Certified { .. })
    }
}

/// Searches 3-subsets of the first [`SEARCH`] triples with `m > 0` for a
/// nonzero determinant of the rows `(n, m - 1, k)`.
pub fn positivity_check(support: &[(u32, u32, u32)]) -> PositivityOutcome {
    let t: Vec<(u32, u32, u32)> = support.iter().copied().filter(|t| t.1 > 0).take(SEARCH).collect();
    let row = |&(n, m, k): &(u32, u32, u32)| [n as i64, m as i64 - 1, k as i64];
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            for c in b + 1..t.len() {
                let (r, s, u) = (row(&t[a]), row(&t[b]), row(&t[c]));
                let det = r[0] * (s[1] * u[2] - s[2] * u[1]) - r[1] * (s[0] * u[2] - s[2] * u[0])
                    + r[2] * (s[0] * u[1] - s[1] * u[0]);
                if det != 0 {
                    return PositivityOutcome::Certified { witness: [t[a], t[b], t[c]], det };
                }
            }
        }
    }
    PositivityOutcome::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse;

    #[test]
    fn determinant_examples() {
        assert!(positivity_check(&[(1, 1, 0), (1, 2, 1), (2, 1, 1)]).is_certified());
        assert_eq!(positivity_check(&[(1, 1, 0), (2, 2, 0), (3, 3, 0)]), PositivityOutcome::Inconclusive);
        assert_eq!(positivity_check(&[(1, 1, 0), (1, 2, 1)]), PositivityOutcome::Inconclusive);
    }

    #[test]
    fn tree_edge_support_is_diagonal() {
        let spec = parse("class t labelled { marker v; C = z*Exp(v*C); expose C; }").unwrap();
        let sys = FunctionalSystem::new(spec).with_marker("v", Rational::ONE);
        let s = support_triples(&sys, "C", "v").unwrap();
        assert_eq!(s, vec![(1, 0, 0), (1, 1, 1), (1, 2, 2), (1, 3, 3), (1, 4, 4)]);
        assert_eq!(positivity_check(&s), PositivityOutcome::Inconclusive);
    }

    #[test]
    fn inner_variables_are_eliminated() {
        // C = z Exp(B), B = v C + C^2: the support of z exp(vy + y^2)
        let spec = parse("class t labelled { marker v; C = z*Exp(B); B = v*C + C*C; expose C; }").unwrap();
        let sys = FunctionalSystem::new(spec).with_marker("v", Rational::ONE);
        let s = support_triples(&sys, "C", "v").unwrap();
        assert!(s.contains(&(1, 2, 0)) && s.contains(&(1, 2, 2)) && s.contains(&(1, 3, 1)));
        assert!(positivity_check(&s).is_certified());
    }
}
