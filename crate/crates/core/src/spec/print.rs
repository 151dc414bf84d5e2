//! Canonical printer; its output parses back to the same expression.

use super::expr::{self, Expr, Node};
use super::ClassSpec;
use crate::num::{rational_to_string, Rational};

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    sum_level(e, &mut s);
    s
}

fn sum_level(e: &Expr, out: &mut String) {
    match &**e {
        Node::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    term_level(t, out);
                    continue;
                }
                match negated(t) {
                    Some(pos) => {
                        out.push_str(" - ");
                        term_level(&pos, out);
                    }
                    None => {
                        out.push_str(" + ");
                        term_level(t, out);
                    }
                }
            }
        }
        _ => term_level(e, out),
    }
}

/// For a term that prints with a leading minus, the same term without it.
fn negated(t: &Expr) -> Option<Expr> {
    match &**t {
        Node::Neg(x) => Some(x.clone()),
        Node::Const(c) if *c < Rational::ZERO => Some(expr::konst(-c.clone())),
        Node::Prod(fs) => match expr::as_const(&fs[0]) {
            Some(c) if *c < Rational::ZERO => Some(expr::neg(t.clone())),
            _ => None,
        },
        _ => None,
    }
}

fn term_level(e: &Expr, out: &mut String) {
    match &**e {
        Node::Prod(fs) => {
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                factor_level(f, out);
            }
        }
        Node::Neg(x) => {
            out.push('-');
            match &**x {
                Node::Prod(_) => term_level(x, out),
                _ => factor_level(x, out),
            }
        }
        _ => factor_level(e, out),
    }
}

fn factor_level(e: &Expr, out: &mut String) {
    match &**e {
        Node::Const(c) => out.push_str(&rational_to_string(c)),
        Node::Atom => out.push('z'),
        Node::Marker(m) | Node::Var(m) => out.push_str(m),
        Node::Sum(_) | Node::Prod(_) | Node::Neg(_) => {
            out.push('(');
            sum_level(e, out);
            out.push(')');
        }
        Node::Exp(x) => call("Exp", x, None, out),
        Node::PSet(x) => call("PSet", x, None, out),
        Node::PSetTail(x) => call("PSetTail", x, None, out),
        Node::SetGe(k, x) => {
            out.push_str(&format!("SetGe({k}, "));
            sum_level(x, out);
            out.push(')');
        }
        Node::PSetGe(k, x) => {
            out.push_str(&format!("PSetGe({k}, "));
            sum_level(x, out);
            out.push(')');
        }
        Node::Subst(x, k) => call("Subst", x, Some(*k), out),
        Node::Geom(x) => call("Geom", x, None, out),
        Node::Unroot(x) => call("Unroot", x, None, out),
        Node::Frozen(p) => {
            out.push_str("Frozen(");
            sum_level(&horner(p, 0), out);
            out.push(')');
        }
    }
}

fn call(name: &str, arg: &Expr, k: Option<u32>, out: &mut String) {
    out.push_str(name);
    out.push('(');
    sum_level(arg, out);
    if let Some(k) = k {
        out.push_str(&format!(", {k}"));
    }
    out.push(')');
}

fn horner(p: &[Rational], i: usize) -> Expr {
    if i + 1 == p.len() {
        return expr::konst(p[i].clone());
    }
    expr::sum([expr::konst(p[i].clone()), expr::mul(expr::atom(), horner(p, i + 1))])
}

pub fn print_spec(spec: &ClassSpec) -> String {
    let mut s = format!("class {} {} {{\n", spec.name, spec.flavor);
    for m in &spec.markers {
        s.push_str(&format!("  marker {m};\n"));
    }
    for (v, e) in &spec.equations {
        s.push_str(&format!("  {v} = {};\n", print_expr(e)));
    }
    if !spec.exposed.is_empty() {
        s.push_str(&format!("  expose {};\n", spec.exposed.join(" ")));
    }
    s.push_str("}\n");
    s
}
