//! Labelled degree distribution of the root vertex and the CLT for the
//! number of vertices of a given degree.
//!
//! `B'(y, w) = Σ_j B'_j(y) w^j` with `w` marking the root degree inside a
//! block.  The root-degree law is
//! `p(w) = ρ e^{B'(y, w)} ∂_y B'(y, w)` at `y = ρ C'(ρ) = τ`, and the
//! degree-`k` counts come from the system for `C'_1, ..., C'_K, C'_∞`
//! in which every non-root block vertex of in-block degree `j` carries
//! `z W_j`.  The builtin trees and cacti blocks are regular off the root
//! (edges, cycles), so `B'_j(z, W) = B'_j(y)` at `y = z W_j`.

use std::collections::HashMap;

use crate::classes::{BuiltinClass, ClassError, ROOT};
use crate::limitlaws::{clt_single, mean_vector, LawError, LimitLaw, Statistic, MARKER};
use crate::num::{BigFloat, Domain, Field, Rational, Real};
use crate::singular::{self, SingularPoint};
use crate::solver::FunctionalSystem;
use crate::spec::expr::{self, Expr, Wrt};
use crate::spec::{ClassSpec, Differentiator, Flavor, ScalarEvaluator};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DegreeError {
    #[error("{0} has no root-degree-marked block series")]
    NoDegreeSeries(BuiltinClass),
    #[error("degree cap K = {cap} must be at least 1 and at least k = {k}")]
    BadCap { k: u32, cap: u32 },
    #[error("mean of the degree-{k} count {mu} differs from d_{k} = {d}")]
    Mismatch { k: u32, mu: f64, d: f64 },
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Singular(#[from] singular::SingularError),
}

/// `d_1, ..., d_K` and their sum.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDist {
    pub class: BuiltinClass,
    pub d: Vec<BigFloat>,
    pub mass: BigFloat,
    pub bits: usize,
}

fn degree_blocks(b: &BuiltinClass) -> Result<Vec<Expr>, DegreeError> {
    b.degree_blocks().ok_or(DegreeError::NoDegreeSeries(*b))
}

/// Coefficients `[w^0..=w^K] exp(Σ_j t_j w^j)` by `j e_j = Σ_r r t_r e_{j-r}`.
fn exp_coeffs<R: Real>(t: &[R], cap: usize, d: &Domain) -> Vec<R> {
    let mut e = vec![R::one(d)];
    for j in 1..=cap {
        let mut acc = R::zero(d);
        for r in 1..=j.min(t.len()) {
            acc = acc.add(&t[r - 1].mul_i64(r as i64).mul(&e[j - r]));
        }
        e.push(acc.div_i64(j as i64));
    }
    e
}

/// Root-degree probabilities `d_k = ρ Σ_{i=1}^{k} ∂B'_i(τ) C'_{k-i}(ρ)`
/// with `C'_j(ρ) = [w^j] exp(B'(τ, w))` and `C'_0 = 1`.
pub fn degree_gf(b: &BuiltinClass, point: &SingularPoint, cap: u32) -> Result<DegreeDist, DegreeError> {
    if b.flavor != Flavor::Labelled {
        return Err(DegreeError::NoDegreeSeries(*b));
    }
    if cap == 0 {
        return Err(DegreeError::BadCap { k: 1, cap });
    }
    let terms = degree_blocks(b)?;
    let d = Domain::float(point.bits);
    let tau = point.get(ROOT).expect("root variable").clone();
    let mut ev = ScalarEvaluator::<BigFloat>::new(d);
    ev.set_point(BigFloat::zero(&d), HashMap::from([("y".to_string(), tau)]), HashMap::new());
    let mut dy = Differentiator::new(Wrt::Var("y".into()));
    let mut vals = Vec::with_capacity(terms.len());
    let mut slopes = Vec::with_capacity(terms.len());
    for t in &terms {
        vals.push(ev.eval(t).map_err(LawError::from)?);
        let dt = dy.diff(t).map_err(LawError::from)?;
        slopes.push(if expr::is_zero(&dt) { BigFloat::zero(&d) } else { ev.eval(&dt).map_err(LawError::from)? });
    }
    let cap = cap as usize;
    let c = exp_coeffs(&vals, cap, &d);
    let mut out = Vec::with_capacity(cap);
    for k in 1..=cap {
        let mut acc = BigFloat::zero(&d);
        for i in 1..=k.min(slopes.len()) {
            acc = acc.add(&slopes[i - 1].mul(&c[k - i]));
        }
        out.push(point.rho.mul(&acc));
    }
    let mass = out.iter().fold(BigFloat::zero(&d), |a, x| a.add(x));
    Ok(DegreeDist { class: *b, d: out, mass, bits: point.bits })
}

fn cvar(j: usize, cap: usize) -> String {
    if j > cap {
        "Cinf".into()
    } else {
        format!("C{j}")
    }
}

fn vmark(j: usize, k: usize, cap: usize) -> String {
    if j > cap {
        "vinf".into()
    } else if j == k {
        MARKER.into()
    } else {
        format!("v{j}")
    }
}

/// System for `C'_1..C'_K, C'_∞` with `v` marking degree-`k` vertices and
/// every other marker pinned to 1.
pub fn degree_system(b: &BuiltinClass, k: u32, cap: u32) -> Result<FunctionalSystem, DegreeError> {
    if k == 0 || cap < k {
        return Err(DegreeError::BadCap { k, cap });
    }
    if b.flavor != Flavor::Labelled {
        return Err(DegreeError::NoDegreeSeries(*b));
    }
    let terms = degree_blocks(b)?;
    let (k, cap) = (k as usize, cap as usize);
    let c = |i: usize| if i == 0 { expr::one() } else { expr::var(&cvar(i, cap)) };
    let all_from = |lo: usize| expr::sum((lo..=cap).map(c).chain([expr::var("Cinf")]));
    // W_j for j = 1..=K and W_∞ at index K + 1
    let w: Vec<Expr> = (1..=cap + 1)
        .map(|j| {
            if j > cap {
                return expr::mul(expr::marker("vinf"), all_from(0));
            }
            let direct = (0..=cap - j).map(|i| expr::mul(expr::marker(&vmark(i + j, k, cap)), c(i)));
            expr::sum(direct.chain([expr::mul(expr::marker("vinf"), all_from(cap - j + 1))]))
        })
        .collect();
    let t: Vec<Expr> = terms
        .iter()
        .enumerate()
        .map(|(r, e)| {
            let wr = w[r.min(cap)].clone();
            expr::substitute_vars(e, &|name| (name == "y").then(|| expr::mul(expr::atom(), wr.clone())))
        })
        .collect();
    let mut e = vec![expr::one()];
    for j in 1..=cap {
        let parts = (1..=j.min(t.len())).map(|r| expr::prod([expr::int(r as i64), t[r - 1].clone(), e[j - r].clone()]));
        e.push(expr::scale(Rational::from_parts(1.into(), (j as u64).into()), expr::sum(parts)));
    }
    let mut spec = ClassSpec::new(&format!("{}_degree_{k}", b.name.as_str()), Flavor::Labelled);
    for j in 1..=cap {
        spec = spec.eq(&cvar(j, cap), e[j].clone());
    }
    let rest = expr::sub(expr::exp(expr::sum(t.iter().cloned())), expr::sum(e.iter().cloned()));
    spec = spec.eq("Cinf", rest);
    let mut markers: Vec<String> = (1..=cap).map(|j| vmark(j, k, cap)).collect();
    markers.push("vinf".into());
    for m in &markers {
        spec = spec.marker(m);
    }
    spec = spec.expose(&cvar(1, cap));
    let mut sys = FunctionalSystem::new(spec);
    for m in &markers {
        sys = sys.with_marker(m, Rational::ONE);
    }
    Ok(sys)
}

/// CLT for the number of degree-`k` vertices, checked against `d_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeLaw {
    pub law: LimitLaw,
    pub d_k: BigFloat,
    /// Mean from the Perron-vector formula.
    pub mean_vector_mu: BigFloat,
    pub point: SingularPoint,
}

/// Tolerance of the `μ_k = d_k` identity.
pub const MEAN_TOL: f64 = 1e-6;

pub fn degree_clt(b: &BuiltinClass, k: u32, cap: u32, bits: usize) -> Result<DegreeLaw, DegreeError> {
    let sys = degree_system(b, k, cap)?;
    let point = singular::char_solve(&sys, None, bits)?;
    let mut law = clt_single(&sys, &cvar(1, cap as usize), &point, Statistic::Degree(k))?;
    law.parameter = Statistic::Degree(k);
    let mv = mean_vector(&sys, &point, &[MARKER])?;
    let class_point = singular::char_solve(&b.system(), None, bits)?;
    let dist = degree_gf(b, &class_point, k)?;
    let d_k = dist.d[k as usize - 1].clone();
    let gap = law.mu.sub(&d_k).to_f64().abs();
    if gap > MEAN_TOL {
        return Err(DegreeError::Mismatch { k, mu: law.mu.to_f64(), d: d_k.to_f64() });
    }
    Ok(DegreeLaw { law, d_k, mean_vector_mu: mv.mu[0].clone(), point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ClassName;
    use crate::limitlaws::Positivity;

    const BITS: usize = 256;

    fn class(name: ClassName) -> (BuiltinClass, SingularPoint) {
        let b = BuiltinClass::new(name, Flavor::Labelled);
        let p = singular::char_solve(&b.system(), None, BITS).unwrap();
        (b, p)
    }

    #[test]
    fn tree_degrees_are_shifted_poisson() {
        let (b, p) = class(ClassName::Trees);
        let dist = degree_gf(&b, &p, 30).unwrap();
        let mut fact = 1.0;
        for k in 1..=6 {
            if k > 1 {
                fact *= (k - 1) as f64;
            }
            let want = (-1f64).exp() / fact;
            assert!((dist.d[k - 1].to_f64() - want).abs() < 1e-10, "d_{k}");
        }
        assert!(dist.mass.to_f64() > 1.0 - 1e-10);
        assert!(dist.mass.to_f64() < 1.0 + 1e-8);
    }

    #[test]
    fn mass_grows_with_the_cap() {
        for name in [ClassName::Trees, ClassName::Cacti] {
            let (b, p) = class(name);
            let mut last = 0.0;
            for cap in [1, 2, 4, 8, 16, 32] {
                let m = degree_gf(&b, &p, cap).unwrap().mass.to_f64();
                assert!(m >= last && m <= 1.0 + 1e-8, "{name} K = {cap}");
                last = m;
            }
            assert!(last > 1.0 - 1e-8, "{name}: {last}");
        }
    }

    #[test]
    fn degree_means_match_root_probabilities() {
        let e1 = (-1f64).exp();
        for (k, want) in [(1, e1), (2, e1)] {
            let law = degree_clt(&BuiltinClass::new(ClassName::Trees, Flavor::Labelled), k, k.max(2), BITS).unwrap();
            assert!((law.law.mu.to_f64() - want).abs() < 1e-10, "k = {k}");
            assert!((law.mean_vector_mu.to_f64() - want).abs() < 1e-8);
        }
        let cacti = BuiltinClass::new(ClassName::Cacti, Flavor::Labelled);
        for k in 1..=4 {
            degree_clt(&cacti, k, 4, BITS).unwrap();
        }
    }

    #[test]
    fn leaf_variance_is_certified() {
        let law = degree_clt(&BuiltinClass::new(ClassName::Trees, Flavor::Labelled), 1, 2, BITS).unwrap().law;
        assert_eq!(law.positivity, Positivity::CertifiedPositive);
        // leaves of random labelled trees: variance n (e - 2)/e^2
        let e = std::f64::consts::E;
        assert!((law.sigma2.to_f64() - (e - 2.0) / (e * e)).abs() < 1e-10);
    }

    #[test]
    fn unsupported_classes_are_rejected() {
        let b = BuiltinClass::new(ClassName::Sp, Flavor::Labelled);
        assert!(matches!(degree_system(&b, 1, 2), Err(DegreeError::NoDegreeSeries(_))));
        let t = BuiltinClass::new(ClassName::Trees, Flavor::Labelled);
        assert!(matches!(degree_system(&t, 3, 2), Err(DegreeError::BadCap { .. })));
    }
}
