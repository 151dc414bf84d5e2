//! Taylor coefficients of `y = F(y; z)` by truncate-and-iterate, and tail
//! freezing for the singular-point solver.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::num::{Domain, Field, Rational};
use crate::series::{ExactSeries, TruncatedSeries};
use crate::spec::expr::{self, Expr, Node, Wrt};
use crate::spec::{ClassSpec, Differentiator, EvalError, SeriesEnv, SeriesEvaluator};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("iteration did not stabilize after {0} sweeps")]
    NotStabilized(usize),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("freeze_tails needs a stabilized solution")]
    Unstabilized,
    #[error("solution lacks variable '{0}'")]
    MissingVar(String),
}

/// `y = F(y; z, v)` with markers bound to exact values.
#[derive(Clone, Debug)]
pub struct FunctionalSystem {
    pub spec: ClassSpec,
    pub vars: Vec<String>,
    pub rhs: Vec<Expr>,
    pub markers: HashMap<String, Rational>,
}

impl FunctionalSystem {
    /// Builds the system with every marker bound to 1.
    pub fn new(spec: ClassSpec) -> Self {
        let vars = spec.vars();
        let rhs = spec.equations.iter().map(|(_, e)| e.clone()).collect();
        let markers = spec.markers.iter().map(|m| (m.clone(), Rational::ONE)).collect();
        FunctionalSystem { spec, vars, rhs, markers }
    }

    pub fn with_marker(mut self, name: &str, value: Rational) -> Self {
        self.markers.insert(name.to_string(), value);
        self
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// The subsystem on `keep`, provided its equations mention no other
    /// variable.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self, SolveError> {
        let mut spec = ClassSpec::new(&self.spec.name, self.spec.flavor);
        spec.markers = self.spec.markers.clone();
        for &v in keep {
            let i = self.index_of(v).ok_or_else(|| SolveError::MissingVar(v.into()))?;
            if let Some(other) = expr::vars_of(&self.rhs[i]).into_iter().find(|u| !keep.contains(&u.as_str())) {
                return Err(SolveError::MissingVar(other));
            }
            spec = spec.eq(v, self.rhs[i].clone());
        }
        spec.exposed = keep.iter().map(|v| v.to_string()).collect();
        let mut out = FunctionalSystem::new(spec);
        out.markers = self.markers.clone();
        Ok(out)
    }

    fn with_rhs(&self, rhs: Vec<Expr>) -> Self {
        let mut spec = self.spec.clone();
        for (eq, r) in spec.equations.iter_mut().zip(&rhs) {
            eq.1 = r.clone();
        }
        FunctionalSystem { spec, vars: self.vars.clone(), rhs, markers: self.markers.clone() }
    }

    fn markers_at_power(&self, k: u32) -> HashMap<String, Rational> {
        self.markers.iter().map(|(m, v)| (m.clone(), v.powi(k))).collect()
    }

    fn power_is_trivial(&self, k: u32) -> bool {
        self.markers.values().all(|v| v.powi(k) == *v)
    }

    /// True when no node needs the Pólya machinery (the system is already
    /// pointwise evaluable).
    pub fn is_frozen(&self) -> bool {
        self.rhs.iter().all(|e| {
            let mut ok = true;
            expr::visit(e, |n| match &**n {
                Node::PSet(_) | Node::PSetTail(_) | Node::PSetGe(..) | Node::Unroot(_) => ok = false,
                Node::Subst(x, _) if expr::has_var(x) => ok = false,
                _ => {}
            });
            ok
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSolution {
    pub vars: Vec<String>,
    pub series: Vec<ExactSeries>,
    pub order: usize,
    pub iterations_used: usize,
    pub stabilized: bool,
}

impl SeriesSolution {
    pub fn get(&self, var: &str) -> Option<&ExactSeries> {
        self.vars.iter().position(|v| v == var).map(|i| &self.series[i])
    }

    pub fn as_map(&self) -> HashMap<String, ExactSeries> {
        self.vars.iter().cloned().zip(self.series.iter().cloned()).collect()
    }
}

/// Environment over the current iterate; variables needed at a nontrivial
/// marker power are solved recursively with the powered marker values.
struct SolverEnv<'a> {
    system: &'a FunctionalSystem,
    current: &'a HashMap<String, ExactSeries>,
    top_order: usize,
    powered: RefCell<HashMap<u32, HashMap<String, ExactSeries>>>,
}

impl SeriesEnv<Rational> for SolverEnv<'_> {
    fn lookup(&self, name: &str, power: u32, order: usize) -> Result<ExactSeries, EvalError> {
        let pick = |m: &HashMap<String, ExactSeries>| -> Result<ExactSeries, EvalError> {
            let s = m.get(name).ok_or_else(|| EvalError::UnboundVar(name.into()))?;
            if s.order() < order {
                return Err(EvalError::ShortSeries { name: name.into(), have: s.order(), need: order });
            }
            Ok(s.truncate(order))
        };
        // Constant terms are taken to be marker-free, which stops the
        // power chain v, v^2, v^4, ... at order zero.
        if power == 1 || order == 0 || self.system.power_is_trivial(power) {
            return pick(self.current);
        }
        if let Some(m) = self.powered.borrow().get(&power) {
            return pick(m);
        }
        let mut sub = self.system.clone();
        sub.markers = self.system.markers_at_power(power);
        let sol = fixed_point(&sub, self.top_order / power as usize)
            .map_err(|_| EvalError::MarkerPower { name: name.into(), power })?;
        let map = sol.as_map();
        let r = pick(&map);
        self.powered.borrow_mut().insert(power, map);
        r
    }
}

/// Gauss–Seidel sweeps of `y <- pol_N F(y)` from `y = 0` until a sweep
/// changes nothing.
pub fn fixed_point(system: &FunctionalSystem, n: usize) -> Result<SeriesSolution, SolveError> {
    let d = Domain::Exact;
    let mut current: HashMap<String, ExactSeries> =
        system.vars.iter().map(|v| (v.clone(), TruncatedSeries::zero(n, d))).collect();
    let cap = (n + 2) * system.len().max(1);
    let powered = RefCell::new(HashMap::new());
    for sweep in 0..=cap {
        let mut changed = false;
        for (v, rhs) in system.vars.iter().zip(&system.rhs) {
            let env = SolverEnv { system, current: &current, top_order: n, powered: RefCell::new(powered.take()) };
            let new = SeriesEvaluator::new(&env, &system.markers, d).eval(rhs, n)?;
            powered.replace(env.powered.into_inner());
            if current[v] != new {
                changed = true;
                current.insert(v.clone(), new);
            }
        }
        if !changed {
            let series = system.vars.iter().map(|v| current[v].clone()).collect();
            return Ok(SeriesSolution {
                vars: system.vars.clone(),
                series,
                order: n,
                iterations_used: sweep,
                stabilized: true,
            });
        }
    }
    Err(SolveError::NotStabilized(cap))
}

/// Directed dependency graph: `edges[i]` lists `j` with `∂F_j/∂y_i ≢ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    pub vars: Vec<String>,
    pub edges: Vec<Vec<usize>>,
}

impl DependencyGraph {
    pub fn strongly_connected(&self) -> bool {
        let n = self.vars.len();
        if n == 0 {
            return false;
        }
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.iter().all(|&s| s)
        };
        let mut rev = vec![Vec::new(); n];
        for (i, out) in self.edges.iter().enumerate() {
            for &j in out {
                rev[j].push(i);
            }
        }
        reach(&self.edges) && reach(&rev)
    }
}

pub fn dependency_graph(system: &FunctionalSystem) -> DependencyGraph {
    let mut edges = vec![Vec::new(); system.len()];
    for (i, v) in system.vars.iter().enumerate() {
        let mut d = Differentiator::new(Wrt::Var(v.clone()));
        for (j, f) in system.rhs.iter().enumerate() {
            if d.diff(f).map(|e| !expr::is_zero(&e)).unwrap_or(true) {
                edges[i].push(j);
            }
        }
    }
    DependencyGraph { vars: system.vars.clone(), edges }
}

/// A single equation with `F_y ≢ 0`, or a strongly connected system.
pub fn strongly_recursive(system: &FunctionalSystem) -> bool {
    dependency_graph(system).strongly_connected()
}

/// Expands `PSetGe(m, x) = PSet(x) - Σ_{j<m} h_j` with the cycle-index
/// slices `j h_j = Σ_{i=1..j} Subst(x, i) h_{j-i}`.
pub fn expand_pset_ge(m: u32, x: &Expr) -> Expr {
    let mut h = vec![expr::one()];
    for j in 1..m as usize {
        let terms = (1..=j).map(|i| expr::mul(expr::subst(x.clone(), i as u32), h[j - i].clone()));
        h.push(expr::scale(Rational::from_parts(1.into(), (j as u64).into()), expr::sum(terms)));
    }
    expr::sum(std::iter::once(expr::pset(x.clone())).chain(h.into_iter().map(expr::neg)))
}

struct Freezer<'a> {
    eval: SeriesEvaluator<'a, Rational>,
    order: usize,
    slice1: HashMap<*const Node, (Expr, bool)>,
    memo: HashMap<*const Node, (Expr, Expr)>,
}

impl Freezer<'_> {
    /// Whether a variable occurs outside every `Subst(., k >= 2)`.
    fn has_slice1_var(&mut self, e: &Expr) -> bool {
        if let Some((_, b)) = self.slice1.get(&Arc::as_ptr(e)) {
            return *b;
        }
        let b = match &**e {
            Node::Var(_) => true,
            Node::Subst(..) => false,
            Node::PSet(x) | Node::PSetGe(_, x) => self.has_slice1_var(x),
            Node::PSetTail(_) => false,
            n => {
                let kids: Vec<Expr> = n.children().into_iter().cloned().collect();
                kids.iter().any(|c| self.has_slice1_var(c))
            }
        };
        self.slice1.insert(Arc::as_ptr(e), (e.clone(), b));
        b
    }

    fn needs_series(e: &Expr) -> bool {
        let mut needs = false;
        expr::visit(e, |n| {
            needs |= matches!(&**n, Node::PSet(_) | Node::PSetTail(_) | Node::PSetGe(..) | Node::Unroot(_) | Node::Var(_))
        });
        needs
    }

    fn poly(&mut self, e: &Expr) -> Result<Expr, SolveError> {
        let s = self.eval.eval(e, self.order)?;
        Ok(expr::frozen(s.into_coeffs()))
    }

    fn freeze(&mut self, e: &Expr) -> Result<Expr, SolveError> {
        if let Some((_, r)) = self.memo.get(&Arc::as_ptr(e)) {
            return Ok(r.clone());
        }
        let r = if !self.has_slice1_var(e) {
            if Self::needs_series(e) {
                self.poly(e)?
            } else {
                e.clone()
            }
        } else {
            match &**e {
                Node::PSet(x) => {
                    let tail = self.poly(&expr::pset_tail(x.clone()))?;
                    expr::mul(expr::exp(self.freeze(x)?), tail)
                }
                Node::PSetGe(m, x) => {
                    let expanded = expand_pset_ge(*m, x);
                    self.freeze(&expanded)?
                }
                n => {
                    let kids: Vec<Expr> = n.children().into_iter().cloned().collect();
                    let mut out = Vec::with_capacity(kids.len());
                    for k in &kids {
                        out.push(self.freeze(k)?);
                    }
                    n.rebuild(out)
                }
            }
        };
        self.memo.insert(Arc::as_ptr(e), (e.clone(), r.clone()));
        Ok(r)
    }
}

/// Replaces every maximal subexpression whose variables all sit under
/// `Subst(., k >= 2)`, and every `PSetTail`, by the exact polynomial read
/// off the solution; `PSet(x)` becomes `Exp(x) * Frozen(tail)`.
pub fn freeze_tails(system: &FunctionalSystem, solution: &SeriesSolution) -> Result<FunctionalSystem, SolveError> {
    if !solution.stabilized {
        return Err(SolveError::Unstabilized);
    }
    for v in &system.vars {
        if solution.get(v).is_none() {
            return Err(SolveError::MissingVar(v.clone()));
        }
    }
    let current = solution.as_map();
    let env = SolverEnv { system, current: &current, top_order: solution.order, powered: RefCell::new(HashMap::new()) };
    let mut fr = Freezer {
        eval: SeriesEvaluator::new(&env, &system.markers, Domain::Exact),
        order: solution.order,
        slice1: HashMap::new(),
        memo: HashMap::new(),
    };
    let mut rhs = Vec::with_capacity(system.len());
    for e in &system.rhs {
        rhs.push(fr.freeze(e)?);
    }
    Ok(system.with_rhs(rhs))
}

/// Converts an exact solution into another coefficient domain.
pub fn solution_in<C: Field>(solution: &SeriesSolution, domain: Domain) -> Vec<TruncatedSeries<C>> {
    solution.series.iter().map(|s| s.to_domain(domain)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::expr::*;
    use crate::spec::{parse, Flavor};

    fn q(p: i64, r: u64) -> Rational {
        Rational::from_parts(p.into(), r.into())
    }

    fn sys(src: &str) -> FunctionalSystem {
        FunctionalSystem::new(parse(src).unwrap())
    }

    #[test]
    fn labelled_rooted_trees() {
        let s = sys("class T labelled { C = z*Exp(C); }");
        let sol = fixed_point(&s, 5).unwrap();
        let want = [q(0, 1), q(1, 1), q(1, 1), q(3, 2), q(8, 3), q(125, 24)];
        assert_eq!(sol.series[0].coeffs(), &want[..]);
        assert!(sol.stabilized);
    }

    #[test]
    fn unlabelled_rooted_trees() {
        let s = sys("class T unlabelled { C = z*PSet(C); }");
        let sol = fixed_point(&s, 7).unwrap();
        assert_eq!(sol.series[0], ExactSeries::from_ints(&[0, 1, 1, 2, 4, 9, 20, 48]));
    }

    #[test]
    fn no_recursion_is_one_iteration() {
        let s = sys("class T labelled { C = z; }");
        assert_eq!(fixed_point(&s, 6).unwrap().iterations_used, 1);
    }

    #[test]
    fn ill_founded_system_errors() {
        let s = sys("class T labelled { C = C + z; }");
        assert!(matches!(fixed_point(&s, 4), Err(SolveError::NotStabilized(_))));
    }

    #[test]
    fn dependency_graphs() {
        let pf = sys("class PF unlabelled { D = 1 + S + P; S = z*D*(1 + P); P = 2*PSet(S) - S - 2; }");
        assert!(strongly_recursive(&pf));
        assert!(strongly_recursive(&sys("class T labelled { C = z*Exp(C); }")));
        assert!(!strongly_recursive(&sys("class T labelled { A = z*Exp(A); B = z*Exp(B); }")));
    }

    #[test]
    fn freezing_rooted_trees() {
        let s = sys("class T unlabelled { C = z*PSet(C); }");
        let sol = fixed_point(&s, 7).unwrap();
        let fz = freeze_tails(&s, &sol).unwrap();
        let Node::Prod(fs) = &*fz.rhs[0] else { panic!("{:?}", fz.rhs[0]) };
        let tail = fs.iter().find_map(|f| match &**f {
            Node::Frozen(p) => Some(p.clone()),
            _ => None,
        });
        let tail = tail.unwrap();
        assert_eq!(&tail[..4], &[q(1, 1), q(0, 1), q(1, 2), q(1, 3)]);
        assert!(fz.is_frozen());
        let again = fixed_point(&fz, 7).unwrap();
        assert_eq!(again.series, sol.series);
    }

    #[test]
    fn freezing_labelled_is_identity() {
        let s = sys("class T labelled { C = z*Exp(C + SetGe(2, C)); }");
        let sol = fixed_point(&s, 6).unwrap();
        let fz = freeze_tails(&s, &sol).unwrap();
        assert_eq!(fz.rhs, s.rhs);
    }

    #[test]
    fn pset_ge_expansion_matches() {
        let x = var("C");
        let s = ClassSpec::new("X", Flavor::Unlabelled)
            .eq("C", mul(atom(), add(one(), pset_ge(3, x.clone()))))
            .eq("D", mul(atom(), add(one(), expand_pset_ge(3, &x))));
        let sol = fixed_point(&FunctionalSystem::new(s), 10).unwrap();
        assert_eq!(sol.series[0], sol.series[1]);
    }

    #[test]
    fn marker_powers_solve_recursively() {
        // C = z v PSet(C): at v = 2 the coefficient of z^n counts trees weighted by 2^n
        let s = sys("class T unlabelled { marker v; C = v*z*PSet(C); }").with_marker("v", Rational::from(2));
        let sol = fixed_point(&s, 6).unwrap();
        let base = [0i64, 1, 1, 2, 4, 9, 20];
        for (n, b) in base.iter().enumerate() {
            assert_eq!(sol.series[0].coeff(n), Rational::from(b << n));
        }
    }
}
