//! Specification language: expressions, parser, printer, evaluation and
//! symbolic differentiation.

pub mod diff;
pub mod eval;
pub mod expr;
pub mod parse;
pub mod print;
pub mod scalar;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use diff::{differentiate, DiffError, Differentiator};
pub use eval::{evaluate, EvalError, MapEnv, SeriesEnv, SeriesEvaluator};
pub use expr::{Expr, Node, Wrt};
pub use parse::{parse, parse_all, parse_expr};
pub use print::{print_expr, print_spec};
pub use scalar::{ScalarError, ScalarEvaluator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Labelled,
    Unlabelled,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Labelled => "labelled",
            Flavor::Unlabelled => "unlabelled",
        })
    }
}

impl FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "labelled" | "labeled" => Ok(Flavor::Labelled),
            "unlabelled" | "unlabeled" => Ok(Flavor::Unlabelled),
            _ => Err(format!("unknown flavor '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undefined variable '{name}'")]
    Undefined { name: String, line: usize, col: usize },
    #[error("{line}:{col}: variable '{name}' is defined twice")]
    Redefined { name: String, line: usize, col: usize },
    #[error("{line}:{col}: '{name}' is reserved and cannot be a variable")]
    Reserved { name: String, line: usize, col: usize },
    #[error("{line}:{col}: {ctor} is not allowed in a {flavor} class")]
    Flavor { ctor: String, flavor: Flavor, line: usize, col: usize },
}

impl SpecError {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        SpecError::Syntax { line, col, msg: msg.into() }
    }
}

/// A parsed class: an ordered system `var = expr` plus metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpec {
    pub name: String,
    pub flavor: Flavor,
    pub equations: Vec<(String, Expr)>,
    pub exposed: Vec<String>,
    pub markers: Vec<String>,
}

impl ClassSpec {
    pub fn new(name: &str, flavor: Flavor) -> Self {
        ClassSpec { name: name.into(), flavor, equations: vec![], exposed: vec![], markers: vec![] }
    }

    pub fn eq(mut self, var: &str, e: Expr) -> Self {
        self.equations.push((var.into(), e));
        self
    }

    pub fn marker(mut self, m: &str) -> Self {
        self.markers.push(m.into());
        self
    }

    pub fn expose(mut self, v: &str) -> Self {
        self.exposed.push(v.into());
        self
    }

    pub fn vars(&self) -> Vec<String> {
        self.equations.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn rhs(&self, var: &str) -> Option<&Expr> {
        self.equations.iter().find(|(v, _)| v == var).map(|(_, e)| e)
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.equations.iter().position(|(v, _)| v == var)
    }

    pub fn to_source(&self) -> String {
        print_spec(self)
    }

    /// Checks the structural invariants a parsed spec satisfies.
    pub fn validate(&self) -> Result<(), SpecError> {
        let mut defined = HashSet::new();
        let markers: HashSet<&str> = self.markers.iter().map(|s| s.as_str()).collect();
        for (v, _) in &self.equations {
            if v == "z" || markers.contains(v.as_str()) {
                return Err(SpecError::Reserved { name: v.clone(), line: 0, col: 0 });
            }
            if !defined.insert(v.as_str()) {
                return Err(SpecError::Redefined { name: v.clone(), line: 0, col: 0 });
            }
        }
        for (_, e) in &self.equations {
            for v in expr::vars_of(e) {
                if !defined.contains(v.as_str()) {
                    return Err(SpecError::Undefined { name: v, line: 0, col: 0 });
                }
            }
            for m in expr::markers_of(e) {
                if !markers.contains(m.as_str()) {
                    return Err(SpecError::Undefined { name: m, line: 0, col: 0 });
                }
            }
            if self.flavor == Flavor::Labelled {
                let mut bad = None;
                expr::visit(e, |n| match &**n {
                    Node::PSet(_) => bad = Some("PSet"),
                    Node::PSetTail(_) => bad = Some("PSetTail"),
                    Node::PSetGe(..) => bad = Some("PSetGe"),
                    Node::Subst(_, k) if *k >= 2 => bad = Some("Subst"),
                    _ => {}
                });
                if let Some(ctor) = bad {
                    return Err(SpecError::Flavor { ctor: ctor.into(), flavor: self.flavor, line: 0, col: 0 });
                }
            }
        }
        for v in &self.exposed {
            if !defined.contains(v.as_str()) {
                return Err(SpecError::Undefined { name: v.clone(), line: 0, col: 0 });
            }
        }
        Ok(())
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_spec(self))
    }
}

#[cfg(test)]
mod tests {
    use super::expr::*;
    use super::*;

    #[test]
    fn parses_labelled_trees() {
        let s = parse("class T labelled { C = z * Exp(C); expose C; }").unwrap();
        assert_eq!(s.equations.len(), 1);
        assert_eq!(s.rhs("C").unwrap(), &mul(atom(), exp(var("C"))));
        assert_eq!(s.exposed, vec!["C"]);
    }

    #[test]
    fn rejects_pset_in_labelled() {
        let e = parse("class X labelled { C = z * PSet(C); }").unwrap_err();
        assert!(matches!(e, SpecError::Flavor { ref ctor, line: 1, .. } if ctor == "PSet"));
        let e = parse("class X labelled { C = z * Subst(C, 2); }").unwrap_err();
        assert!(matches!(e, SpecError::Flavor { .. }));
    }

    #[test]
    fn reports_undefined_and_redefined() {
        let e = parse("class X labelled {\n  C = z * Exp(D);\n}").unwrap_err();
        assert_eq!(e, SpecError::Undefined { name: "D".into(), line: 2, col: 15 });
        let e = parse("class X labelled { C = z; C = z; }").unwrap_err();
        assert!(matches!(e, SpecError::Redefined { .. }));
        let e = parse("class X labelled { marker v; v = z; }").unwrap_err();
        assert!(matches!(e, SpecError::Reserved { .. }));
        let e = parse("class X labelled { z = z; }").unwrap_err();
        assert!(matches!(e, SpecError::Reserved { .. }));
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse("class X labelled {\n C = z * ;\n}").unwrap_err();
        assert!(matches!(e, SpecError::Syntax { line: 2, col: 10, .. }), "{e:?}");
    }

    #[test]
    fn pf_network_system() {
        let src = "
            # pole-fixing networks
            class PF unlabelled {
              D = 1 + S + P;
              S = z * D * (1 + P);
              P = 2 * PSet(S) - S - 2;
              expose D;
            }";
        let s = parse(src).unwrap();
        assert_eq!(s.vars(), vec!["D", "S", "P"]);
        s.validate().unwrap();
    }

    #[test]
    fn numbers_and_unary_minus() {
        let e = parse_expr("-1/2*z + 0.25 - -C", Flavor::Labelled, &[]).unwrap();
        assert_eq!(e, sum([prod([ratio(-1, 2), atom()]), ratio(1, 4), var("C")]));
    }

    #[test]
    fn markers_resolve() {
        let s = parse("class E labelled { marker v; C = z * Exp(v * C); }").unwrap();
        assert_eq!(s.rhs("C").unwrap(), &mul(atom(), exp(mul(marker("v"), var("C")))));
    }

    #[test]
    fn print_round_trip_examples() {
        let srcs = [
            "class A unlabelled { marker v; C = z*PSet(C)*Geom(v*Subst(C, 2)) - 1/3*SetGe(2, C) + Frozen(1 - 2*z + 1/2*z*z*z); expose C; }",
            "class B labelled { C = -(z + C)*C - z*Exp(-C) + Unroot(z*C); }",
            "class B unlabelled { C = PSetGe(2, C) + PSetTail(z*C) - 2; D = -C; }",
        ];
        for src in srcs {
            let s = parse(src).unwrap();
            let printed = s.to_source();
            let back = parse(&printed).unwrap();
            assert_eq!(back, s, "{printed}");
            assert_eq!(back.to_source(), printed);
        }
    }
}
