//! Second-order jets of an output expression after eliminating the inner
//! variables of a system by the implicit function theorem.
//!
//! Coordinates are `p = (y, z, v)` with `y` the principal variable; the
//! inner variables `w` solve `w = G(y, w; z, v)`.  With `M = I - G_w` and
//! `q_a = (e_a, w_a)`:
//!
//! `w_a = M^{-1} G_a`, `w_ab = M^{-1} (q_a' G'' q_b)`,
//! `H_ab = q_a' H'' q_b + H_w w_ab`.

use std::collections::HashMap;

use crate::num::{BigFloat, Domain, Field};
use crate::singular::linalg;
use crate::solver::FunctionalSystem;
use crate::spec::expr::{self, Expr, Wrt};
use crate::spec::{Differentiator, ScalarEvaluator};

use super::LawError;

/// Value, gradient and Hessian in `(y, z, v)`.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub value: BigFloat,
    pub grad: [BigFloat; 3],
    pub hess: [[BigFloat; 3]; 3],
}

pub const Y: usize = 0;
pub const Z: usize = 1;
pub const V: usize = 2;

/// Where to evaluate: `z`, every system variable, and the marker values.
pub struct Point<'a> {
    pub z: &'a BigFloat,
    pub vars: &'a HashMap<String, BigFloat>,
    pub bits: usize,
}

/// Jets of `outputs` (expressions over the system's variables) at `point`.
pub fn reduced_jets(
    system: &FunctionalSystem,
    principal: &str,
    marker: &str,
    outputs: &[Expr],
    point: &Point,
) -> Result<Vec<Jet2>, LawError> {
    let d = Domain::float(point.bits);
    let inner: Vec<usize> = (0..system.len()).filter(|&i| system.vars[i] != principal).collect();
    if inner.len() + 1 != system.len() {
        return Err(LawError::UnknownVar(principal.to_string()));
    }
    let s = inner.len();
    let mut coords = vec![Wrt::Var(principal.to_string()), Wrt::Z, Wrt::Marker(marker.to_string())];
    coords.extend(inner.iter().map(|&i| Wrt::Var(system.vars[i].clone())));
    let nq = coords.len();
    let mut diffs: Vec<Differentiator> = coords.iter().cloned().map(Differentiator::new).collect();

    let mut ev = ScalarEvaluator::<BigFloat>::new(d);
    let markers = system.markers.iter().map(|(m, v)| (m.clone(), BigFloat::from_rational(v, &d))).collect();
    let vars = point.vars.iter().map(|(k, v)| (k.clone(), v.with_bits(point.bits))).collect();
    ev.set_point(point.z.with_bits(point.bits), vars, markers);

    // grad[c] and hess[c][e] of one expression over all coordinates
    let mut local = |e: &Expr| -> Result<(BigFloat, Vec<BigFloat>, Vec<Vec<BigFloat>>), LawError> {
        let mut eval = |x: &Expr| -> Result<BigFloat, LawError> {
            if expr::is_zero(x) {
                Ok(BigFloat::zero(&d))
            } else {
                Ok(ev.eval(x)?)
            }
        };
        let value = eval(e)?;
        let mut first = Vec::with_capacity(nq);
        for df in diffs.iter_mut() {
            first.push(df.diff(e)?);
        }
        let mut g = Vec::with_capacity(nq);
        let mut h = vec![vec![BigFloat::zero(&d); nq]; nq];
        for a in 0..nq {
            g.push(eval(&first[a])?);
            for b in a..nq {
                let x = diffs[b].diff(&first[a])?;
                let val = eval(&x)?;
                h[a][b] = val.clone();
                h[b][a] = val;
            }
        }
        Ok((value, g, h))
    };

    let inner_local: Vec<_> = inner.iter().map(|&i| local(&system.rhs[i])).collect::<Result<_, _>>()?;
    let out_local: Vec<_> = outputs.iter().map(&mut local).collect::<Result<_, _>>()?;

    let mut m = linalg::identity::<BigFloat>(s, &d);
    for i in 0..s {
        for j in 0..s {
            m[i][j] = m[i][j].sub(&inner_local[i].1[3 + j]);
        }
    }
    let solve = |rhs: Vec<BigFloat>| -> Result<Vec<BigFloat>, LawError> {
        if s == 0 {
            return Ok(rhs);
        }
        linalg::solve(&m, &rhs).ok_or(LawError::InnerSingular)
    };
    // q[a] = d(all coordinates)/d p_a
    let mut q: Vec<Vec<BigFloat>> = Vec::with_capacity(3);
    for a in 0..3 {
        let wa = solve(inner_local.iter().map(|(_, g, _)| g[a].clone()).collect())?;
        let mut col = vec![BigFloat::zero(&d); nq];
        col[a] = BigFloat::one(&d);
        for (j, w) in wa.into_iter().enumerate() {
            col[3 + j] = w;
        }
        q.push(col);
    }
    let quad = |h: &[Vec<BigFloat>], a: usize, b: usize| -> BigFloat {
        let mut acc = BigFloat::zero(&d);
        for c in 0..nq {
            if q[a][c].is_zero() {
                continue;
            }
            for e in 0..nq {
                if !q[b][e].is_zero() && !h[c][e].is_zero() {
                    acc = acc.add(&q[a][c].mul(&h[c][e]).mul(&q[b][e]));
                }
            }
        }
        acc
    };
    let dot = |g: &[BigFloat], x: &[BigFloat]| g.iter().zip(x).fold(BigFloat::zero(&d), |acc, (a, b)| acc.add(&a.mul(b)));
    let mut wab = vec![vec![Vec::new(); 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let w = solve(inner_local.iter().map(|(_, _, h)| quad(h, a, b)).collect())?;
            wab[a][b] = w.clone();
            wab[b][a] = w;
        }
    }
    let zero = || BigFloat::zero(&d);
    Ok(out_local
        .iter()
        .map(|(value, g, h)| {
            let mut grad = [zero(), zero(), zero()];
            let mut hess = [[zero(), zero(), zero()], [zero(), zero(), zero()], [zero(), zero(), zero()]];
            for a in 0..3 {
                grad[a] = dot(g, &q[a]);
                for b in 0..3 {
                    hess[a][b] = quad(h, a, b).add(&dot(&g[3..], &wab[a][b]));
                }
            }
            Jet2 { value: value.clone(), grad, hess }
        })
        .collect())
}
