//! Recursive-descent parser for spec files.

use std::collections::{HashMap, HashSet};

use super::expr::{self, Expr, Node};
use super::{ClassSpec, Flavor, SpecError};
use crate::num::{rational_from_str, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, SpecError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let (l0, c0) = (line, col);
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let digits = |i: &mut usize| {
                while *i < chars.len() && chars[*i].is_ascii_digit() {
                    *i += 1;
                }
            };
            digits(&mut i);
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                digits(&mut i);
            } else if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                digits(&mut i);
            }
            Tok::Number(chars[start..i].iter().collect())
        } else if "{}()=;,+-*".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(SpecError::syntax(line, col, format!("unexpected character '{c}'")));
        };
        col += i - start;
        out.push(Token { tok, line: l0, col: c0 });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const FUNCS: [&str; 9] = ["Exp", "PSet", "PSetTail", "SetGe", "PSetGe", "Subst", "Geom", "Unroot", "Frozen"];
const KEYWORDS: [&str; 5] = ["class", "labelled", "unlabelled", "expose", "marker"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    flavor: Flavor,
    markers: HashSet<String>,
    uses: Vec<(String, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SpecError> {
        let t = self.peek();
        Err(SpecError::syntax(t.line, t.col, msg))
    }

    fn expect_sym(&mut self, c: char) -> Result<(), SpecError> {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected '{c}', found {}", describe(&self.peek().tok)))
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn ident(&mut self) -> Result<(String, usize, usize), SpecError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            other => Err(SpecError::syntax(t.line, t.col, format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SpecError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            other => self.err(format!("expected '{kw}', found {}", describe(other))),
        }
    }

    fn expr(&mut self) -> Result<Expr, SpecError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.is_sym('+') {
                self.next();
                terms.push(self.term()?);
            } else if self.is_sym('-') {
                self.next();
                terms.push(expr::neg(self.term()?));
            } else {
                return Ok(expr::sum(terms));
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SpecError> {
        let mut fs = vec![self.factor()?];
        while self.is_sym('*') {
            self.next();
            fs.push(self.factor()?);
        }
        Ok(expr::prod(fs))
    }

    fn integer(&mut self) -> Result<u32, SpecError> {
        let t = self.next();
        match &t.tok {
            Tok::Number(s) => s
                .parse::<u32>()
                .map_err(|_| SpecError::syntax(t.line, t.col, format!("expected a nonnegative integer, found {s}"))),
            other => Err(SpecError::syntax(t.line, t.col, format!("expected integer, found {}", describe(other)))),
        }
    }

    fn factor(&mut self) -> Result<Expr, SpecError> {
        let t = self.next();
        match t.tok {
            Tok::Sym('-') => Ok(expr::neg(self.factor()?)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Number(s) => rational_from_str(&s)
                .map(expr::konst)
                .ok_or_else(|| SpecError::syntax(t.line, t.col, format!("bad number {s}"))),
            Tok::Ident(name) if self.is_sym('(') && FUNCS.contains(&name.as_str()) => {
                self.next();
                self.call(&name, t.line, t.col)
            }
            Tok::Ident(name) if FUNCS.contains(&name.as_str()) => {
                Err(SpecError::syntax(t.line, t.col, format!("{name} needs an argument list")))
            }
            Tok::Ident(name) if name == "z" => Ok(expr::atom()),
            Tok::Ident(name) if self.markers.contains(&name) => Ok(expr::marker(&name)),
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
                Err(SpecError::syntax(t.line, t.col, format!("keyword '{name}' in expression")))
            }
            Tok::Ident(name) => {
                self.uses.push((name.clone(), t.line, t.col));
                Ok(expr::var(&name))
            }
            other => Err(SpecError::syntax(t.line, t.col, format!("unexpected {}", describe(&other)))),
        }
    }

    fn call(&mut self, name: &str, line: usize, col: usize) -> Result<Expr, SpecError> {
        if self.flavor == Flavor::Labelled && matches!(name, "PSet" | "PSetTail" | "PSetGe") {
            return Err(SpecError::Flavor { ctor: name.to_string(), flavor: self.flavor, line, col });
        }
        let e = match name {
            "SetGe" | "PSetGe" => {
                let k = self.integer()?;
                self.expect_sym(',')?;
                let a = self.expr()?;
                if name == "SetGe" {
                    expr::set_ge(k, a)
                } else {
                    expr::pset_ge(k, a)
                }
            }
            "Subst" => {
                let a = self.expr()?;
                self.expect_sym(',')?;
                let (kl, kc) = (self.peek().line, self.peek().col);
                let k = self.integer()?;
                if k == 0 {
                    return Err(SpecError::syntax(kl, kc, "Subst exponent must be at least 1"));
                }
                if k >= 2 && self.flavor == Flavor::Labelled {
                    return Err(SpecError::Flavor { ctor: "Subst".into(), flavor: self.flavor, line, col });
                }
                expr::subst(a, k)
            }
            "Frozen" => {
                let a = self.expr()?;
                let poly = polynomial(&a).ok_or_else(|| {
                    SpecError::syntax(line, col, "Frozen takes a polynomial in z with constant coefficients")
                })?;
                expr::frozen(poly)
            }
            _ => {
                let a = self.expr()?;
                match name {
                    "Exp" => expr::exp(a),
                    "PSet" => expr::pset(a),
                    "PSetTail" => expr::pset_tail(a),
                    "Geom" => expr::geom(a),
                    _ => expr::unroot(a),
                }
            }
        };
        self.expect_sym(')')?;
        Ok(e)
    }

    fn class(&mut self) -> Result<ClassSpec, SpecError> {
        self.keyword("class")?;
        let (name, _, _) = self.ident()?;
        let (fl, l, c) = self.ident()?;
        self.flavor = fl.parse().map_err(|_| SpecError::syntax(l, c, format!("expected labelled or unlabelled, found {fl}")))?;
        self.expect_sym('{')?;
        let body_start = self.pos;
        self.markers = self.prescan_markers(body_start)?;
        self.uses.clear();
        let mut spec = ClassSpec {
            name,
            flavor: self.flavor,
            equations: Vec::new(),
            exposed: Vec::new(),
            markers: Vec::new(),
        };
        let mut defined: HashMap<String, (usize, usize)> = HashMap::new();
        loop {
            if self.is_sym('}') {
                self.next();
                break;
            }
            let (id, l, c) = self.ident()?;
            match id.as_str() {
                "expose" => {
                    let mut any = false;
                    while !self.is_sym(';') {
                        let (v, l, c) = self.ident()?;
                        self.uses.push((v.clone(), l, c));
                        spec.exposed.push(v);
                        any = true;
                    }
                    if !any {
                        return self.err("expose needs at least one name");
                    }
                    self.expect_sym(';')?;
                }
                "marker" => {
                    let (m, _, _) = self.ident()?;
                    self.expect_sym(';')?;
                    spec.markers.push(m);
                }
                _ => {
                    if id == "z" || self.markers.contains(&id) || KEYWORDS.contains(&id.as_str()) || FUNCS.contains(&id.as_str()) {
                        return Err(SpecError::Reserved { name: id, line: l, col: c });
                    }
                    if defined.contains_key(&id) {
                        return Err(SpecError::Redefined { name: id, line: l, col: c });
                    }
                    defined.insert(id.clone(), (l, c));
                    self.expect_sym('=')?;
                    let e = self.expr()?;
                    self.expect_sym(';')?;
                    spec.equations.push((id, e));
                }
            }
        }
        for (name, l, c) in &self.uses {
            if !defined.contains_key(name) {
                return Err(SpecError::Undefined { name: name.clone(), line: *l, col: *c });
            }
        }
        Ok(spec)
    }

    fn prescan_markers(&self, from: usize) -> Result<HashSet<String>, SpecError> {
        let mut out = HashSet::new();
        let mut i = from;
        while i + 1 < self.toks.len() {
            match &self.toks[i].tok {
                Tok::Sym('}') | Tok::Eof => break,
                Tok::Ident(k) if k == "marker" => {
                    if let Tok::Ident(m) = &self.toks[i + 1].tok {
                        if m == "z" {
                            let t = &self.toks[i + 1];
                            return Err(SpecError::Reserved { name: m.clone(), line: t.line, col: t.col });
                        }
                        out.insert(m.clone());
                    }
                }
                _ => {}
            }
            i += 1;
        }
        Ok(out)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Number(s) => format!("number {s}"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Eof => "end of input".into(),
    }
}

/// Expands a constant-coefficient polynomial in `z`.
pub fn polynomial(e: &Expr) -> Option<Vec<Rational>> {
    match &**e {
        Node::Const(c) => Some(vec![c.clone()]),
        Node::Atom => Some(vec![Rational::ZERO, Rational::ONE]),
        Node::Neg(x) => Some(polynomial(x)?.into_iter().map(|c| -c).collect()),
        Node::Sum(ts) => {
            let mut acc: Vec<Rational> = Vec::new();
            for t in ts {
                let p = polynomial(t)?;
                if p.len() > acc.len() {
                    acc.resize(p.len(), Rational::ZERO);
                }
                for (a, b) in acc.iter_mut().zip(p) {
                    *a += b;
                }
            }
            Some(acc)
        }
        Node::Prod(fs) => {
            let mut acc = vec![Rational::ONE];
            for f in fs {
                let p = polynomial(f)?;
                let mut next = vec![Rational::ZERO; acc.len() + p.len() - 1];
                for (i, a) in acc.iter().enumerate() {
                    for (j, b) in p.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                acc = next;
            }
            Some(acc)
        }
        Node::Frozen(p) => Some(p.to_vec()),
        _ => None,
    }
}

/// Parses every class in a file.
pub fn parse_all(src: &str) -> Result<Vec<ClassSpec>, SpecError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        flavor: Flavor::Labelled,
        markers: HashSet::new(),
        uses: Vec::new(),
    };
    let mut out = Vec::new();
    while p.peek().tok != Tok::Eof {
        out.push(p.class()?);
    }
    if out.is_empty() {
        return p.err("expected at least one class");
    }
    Ok(out)
}

/// Parses a source holding exactly one class.
pub fn parse(src: &str) -> Result<ClassSpec, SpecError> {
    let mut all = parse_all(src)?;
    if all.len() != 1 {
        return Err(SpecError::syntax(1, 1, format!("expected one class, found {}", all.len())));
    }
    Ok(all.pop().unwrap())
}

/// Parses a bare expression, resolving `markers` as marker names.
pub fn parse_expr(src: &str, flavor: Flavor, markers: &[&str]) -> Result<Expr, SpecError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        flavor,
        markers: markers.iter().map(|s| s.to_string()).collect(),
        uses: Vec::new(),
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.err(format!("unexpected {}", describe(&p.peek().tok)));
    }
    Ok(e)
}
