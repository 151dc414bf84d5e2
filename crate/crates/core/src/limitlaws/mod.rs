//! Central and local limit laws for additive parameters marked by `v`.
//!
//! `clt_single` evaluates the combinatorial CLT formulas
//!
//! ```text
//! μ  = F_v / (z0 F_z)
//! σ² = μ + μ² + ( F_z²(F_yy F_vv - F_yv²) - 2 F_z F_v (F_yy F_zv - F_yz F_yv)
//!                 + F_v²(F_yy F_zz - F_yz²) ) / (z0 F_z³ F_yy)
//! ```
//!
//! on the principal equation after eliminating inner variables; `table2`
//! gives the labelled closed forms in `τ`, `ρ` and the block series.

mod reduce;
mod support;

use std::fmt;

use serde::Serialize;

use crate::classes::{BuiltinClass, ClassError, Param, ROOT};
use crate::num::{BigFloat, Domain, Field, Rational, Real};
use crate::singular::{self, linalg, Model, SingularError, SingularPoint};
use crate::solver::{fixed_point, freeze_tails, FunctionalSystem, SolveError};
use crate::spec::expr::{self, Expr, Node, Wrt};
use crate::spec::{DiffError, Differentiator, Flavor, ScalarError, ScalarEvaluator};

pub use reduce::{reduced_jets, Jet2, Point};
pub use support::{positivity_check, support_triples, PositivityOutcome};
use reduce::{V, Y, Z};

/// Name of the marker variable in every parameter system.
pub const MARKER: &str = "v";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LawError {
    #[error("{0} is not a variable of the system")]
    UnknownVar(String),
    #[error("F_yy vanishes at the singular point: the equation is affine in y")]
    Affine,
    #[error("inner variables are not locally solvable: I - G_w is singular at the point")]
    InnerSingular,
    #[error("closed forms are labelled only; use the generic route for {0}")]
    NotLabelled(BuiltinClass),
    #[error("the principal equation is not of the form z*Exp(B'(y))")]
    NotBlockForm,
    #[error("Jacobian is not nonnegative at the singular point")]
    NegativeJacobian,
    #[error("power iteration for the Perron vector did not converge")]
    Perron,
    #[error("variance {0} must be positive for the local limit density")]
    NonPositiveVariance(f64),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Singular(#[from] SingularError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Eval(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Positivity {
    CertifiedPositive,
    ComputedZero,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawSource {
    Table2ClosedForm,
    GenericClt,
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Positivity::CertifiedPositive => "certified-positive",
            Positivity::ComputedZero => "computed-zero",
            Positivity::Unknown => "unknown",
        })
    }
}

impl fmt::Display for LawSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LawSource::Table2ClosedForm => "table2-closed-form",
            LawSource::GenericClt => "generic-clt",
        })
    }
}

/// The counted quantity: a builtin parameter or vertices of one degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistic {
    Param(Param),
    Degree(u32),
}

impl From<Param> for Statistic {
    fn from(p: Param) -> Self {
        Statistic::Param(p)
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Param(p) => write!(f, "{p}"),
            Statistic::Degree(k) => write!(f, "degree-{k}"),
        }
    }
}

/// Asymptotic mean `μ n` and variance `σ² n` of a parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitLaw {
    pub parameter: Statistic,
    pub mu: BigFloat,
    pub sigma2: BigFloat,
    pub positivity: Positivity,
    pub source: LawSource,
    pub bits: usize,
    /// Truncation order behind frozen tails, when any.
    pub order: Option<usize>,
}

/// Variances below this are reported as zero.
pub const ZERO_VARIANCE: f64 = 1e-12;

fn classify(sigma2: &BigFloat, certified: Option<bool>) -> Positivity {
    if certified == Some(true) {
        Positivity::CertifiedPositive
    } else if sigma2.to_f64().abs() < ZERO_VARIANCE {
        Positivity::ComputedZero
    } else {
        Positivity::Unknown
    }
}

fn certify(system: &FunctionalSystem, principal: &str) -> Option<bool> {
    support_triples(system, principal, MARKER).ok().map(|s| positivity_check(&s).is_certified())
}

fn point_of(p: &SingularPoint) -> (std::collections::HashMap<String, BigFloat>, usize) {
    (p.var_map(), p.bits)
}

/// `(μ, σ²)` from the jet of `F` at the singular point.
pub fn clt_moments(f: &Jet2, z0: &BigFloat) -> Result<(BigFloat, BigFloat), LawError> {
    let (fz, fv) = (&f.grad[Z], &f.grad[V]);
    let h = &f.hess;
    let (fyy, fyv, fyz, fvv, fzv, fzz) = (&h[Y][Y], &h[Y][V], &h[Y][Z], &h[V][V], &h[Z][V], &h[Z][Z]);
    if fyy.is_zero() {
        return Err(LawError::Affine);
    }
    let mu = fv.div(&z0.mul(fz));
    let t1 = fz.mul(fz).mul(&fyy.mul(fvv).sub(&fyv.mul(fyv)));
    let t2 = fz.mul(fv).mul(&fyy.mul(fzv).sub(&fyz.mul(fyv))).mul_i64(2);
    let t3 = fv.mul(fv).mul(&fyy.mul(fzz).sub(&fyz.mul(fyz)));
    let den = z0.mul(&fz.powi(3)).mul(fyy);
    let sigma2 = mu.add(&mu.mul(&mu)).add(&t1.sub(&t2).add(&t3).div(&den));
    Ok((mu, sigma2))
}

/// CLT parameters of the principal equation of `system`, marker `v` at 1,
/// at the singular point of the same system.
pub fn clt_single(
    system: &FunctionalSystem,
    principal: &str,
    point: &SingularPoint,
    parameter: impl Into<Statistic>,
) -> Result<LimitLaw, LawError> {
    let parameter = parameter.into();
    let i = system.index_of(principal).ok_or_else(|| LawError::UnknownVar(principal.into()))?;
    let (vars, bits) = point_of(point);
    let jets = reduced_jets(system, principal, MARKER, &[system.rhs[i].clone()], &Point { z: &point.rho, vars: &vars, bits })?;
    let (mu, sigma2) = clt_moments(&jets[0], &point.rho)?;
    let positivity = classify(&sigma2, certify(system, principal));
    Ok(LimitLaw { parameter, mu, sigma2, positivity, source: LawSource::GenericClt, bits, order: None })
}

/// `B'` in a principal equation `C = z * Exp(B')`.
fn block_argument(rhs: &Expr) -> Option<Expr> {
    match &**rhs {
        Node::Prod(fs) if fs.len() == 2 => match (&*fs[0], &*fs[1]) {
            (Node::Atom, Node::Exp(x)) | (Node::Exp(x), Node::Atom) => Some(x.clone()),
            _ => None,
        },
        _ => None,
    }
}

/// `b`'s system with `param` marked by `v`, evaluated at `v = 1`.
pub fn marked_system(b: &BuiltinClass, param: Param) -> Result<FunctionalSystem, LawError> {
    Ok(FunctionalSystem::new(b.parameter_spec(param)?).with_marker(MARKER, Rational::ONE))
}

/// Labelled closed forms with `K = 1 + τ² B'''(τ)`:
/// edges `(B'_v, B'_v + B'_vv - (τ B''_v)² / K)`, blocks
/// `(log(τ/ρ), log(τ/ρ) - 1/K)`, cut-vertices
/// `(1 - ρ/τ, (ρ/τ)² (τ/ρ - 1 - 1/K))`.
pub fn table2(b: &BuiltinClass, parameter: Param, bits: usize) -> Result<LimitLaw, LawError> {
    if b.flavor != Flavor::Labelled {
        return Err(LawError::NotLabelled(*b));
    }
    let d = Domain::float(bits);
    // the edge-marked system carries B'(y, v); the others need B'(y) only
    let system = match parameter {
        Param::Edges => marked_system(b, Param::Edges)?,
        _ => b.system(),
    };
    let point = singular::char_solve(&system, None, bits)?;
    let i = system.index_of(ROOT).ok_or_else(|| LawError::UnknownVar(ROOT.into()))?;
    let block = block_argument(&system.rhs[i]).ok_or(LawError::NotBlockForm)?;
    let (vars, _) = point_of(&point);
    let jet = reduced_jets(&system, ROOT, MARKER, &[block], &Point { z: &point.rho, vars: &vars, bits })?.remove(0);
    let tau = point.get(ROOT).expect("root variable").clone();
    let rho = point.rho.clone();
    let one = BigFloat::one(&d);
    let k = one.add(&tau.mul(&tau).mul(&jet.hess[Y][Y]));
    let (mu, sigma2) = match parameter {
        Param::Edges => {
            let (a, bb, c) = (&jet.grad[V], &jet.hess[Y][V], &jet.hess[V][V]);
            let tb = tau.mul(bb);
            (a.clone(), a.add(c).sub(&tb.mul(&tb).div(&k)))
        }
        Param::Blocks => {
            let mu = tau.div(&rho).ln();
            let s = mu.sub(&one.div(&k));
            (mu, s)
        }
        Param::Cutvertices => {
            let r = rho.div(&tau);
            let s = r.mul(&r).mul(&one.div(&r).sub(&one).sub(&one.div(&k)));
            (one.sub(&r), s)
        }
    };
    let certified = certify(&marked_system(b, parameter)?, ROOT);
    let positivity = classify(&sigma2, certified);
    Ok(LimitLaw { parameter: parameter.into(), mu, sigma2, positivity, source: LawSource::Table2ClosedForm, bits, order: None })
}

/// Labelled CLT through the generic formulas on the marked system.
pub fn labelled_clt(b: &BuiltinClass, parameter: Param, bits: usize) -> Result<LimitLaw, LawError> {
    if b.flavor != Flavor::Labelled {
        return Err(LawError::NotLabelled(*b));
    }
    let system = marked_system(b, parameter)?;
    let point = singular::char_solve(&system, None, bits)?;
    clt_single(&system, ROOT, &point, parameter)
}

/// Marker step of the perturbation route.
pub fn perturbation_step() -> Rational {
    Rational::from_parts(1.into(), (1u64 << 40).into())
}

fn rho_at(spec: &crate::spec::ClassSpec, v: Rational, order: usize, seed: Option<&SingularPoint>, bits: usize) -> Result<SingularPoint, LawError> {
    let system = FunctionalSystem::new(spec.clone()).with_marker(MARKER, v);
    let sol = fixed_point(&system, order)?;
    let frozen = freeze_tails(&system, &sol)?;
    let init = seed.map(|p| (p.tau.as_slice(), &p.rho));
    Ok(singular::char_solve(&frozen, init, bits)?)
}

/// `(μ, σ²)` from the marker dependence of the singularity:
/// `μ = -ρ'(1)/ρ(1)`, `σ² = -ρ''(1)/ρ(1) + μ + μ²`, with central
/// differences at `v = 1 ± h`, the tails frozen at every `v` separately.
pub fn perturbation_law(
    spec: &crate::spec::ClassSpec,
    parameter: Param,
    order: usize,
    bits: usize,
) -> Result<LimitLaw, LawError> {
    let d = Domain::float(bits);
    let h = perturbation_step();
    let mid = rho_at(spec, Rational::ONE, order, None, bits)?;
    let lo = rho_at(spec, Rational::ONE - &h, order, Some(&mid), bits)?;
    let hi = rho_at(spec, Rational::ONE + &h, order, Some(&mid), bits)?;
    let hf = BigFloat::from_rational(&h, &d);
    let r0 = &mid.rho;
    let d1 = hi.rho.sub(&lo.rho).div(&hf.mul_i64(2));
    let d2 = hi.rho.sub(&r0.mul_i64(2)).add(&lo.rho).div(&hf.mul(&hf));
    let mu = d1.div(r0).neg();
    let sigma2 = d2.div(r0).neg().add(&mu).add(&mu.mul(&mu));
    let system = FunctionalSystem::new(spec.clone()).with_marker(MARKER, Rational::ONE);
    let positivity = classify(&sigma2, certify(&system, ROOT));
    Ok(LimitLaw { parameter: parameter.into(), mu, sigma2, positivity, source: LawSource::GenericClt, bits, order: Some(order) })
}

/// Default truncation order for unlabelled laws.
pub const UNLABELLED_ORDER: usize = 30;

/// Limit law of a builtin parameter: closed forms when labelled, the perturbation
/// route unlabelled.
pub fn builtin_law(b: &BuiltinClass, parameter: Param, order: usize, bits: usize) -> Result<LimitLaw, LawError> {
    match b.flavor {
        Flavor::Labelled => table2(b, parameter, bits),
        Flavor::Unlabelled => perturbation_law(&b.parameter_spec(parameter)?, parameter, order, bits),
    }
}

/// Left Perron vector `b` of `Jac_F` and `μ_m = (b'F_{v_m}) / (z0 b'F_z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanVector {
    pub b: Vec<f64>,
    pub mu: Vec<BigFloat>,
    /// `b` is proportional to `(1, ..., 1)` within `1e-8`.
    pub uniform: bool,
}

pub fn mean_vector(system: &FunctionalSystem, point: &SingularPoint, markers: &[&str]) -> Result<MeanVector, LawError> {
    let bits = point.bits;
    let d = Domain::float(bits);
    let model = Model::new(system)?;
    let mut ev = ScalarEvaluator::<BigFloat>::new(d);
    let jac = model.jacobian(&mut ev, &point.rho, &point.tau)?;
    let jf: Vec<Vec<f64>> = jac.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
    if jf.iter().flatten().any(|&v| v < -1e-12) {
        return Err(LawError::NegativeJacobian);
    }
    let (_, b) = linalg::perron(&jf, true, 1e-10, 100_000).ok_or(LawError::Perron)?;
    let max = b.iter().cloned().fold(f64::MIN, f64::max);
    let min = b.iter().cloned().fold(f64::MAX, f64::min);
    let uniform = max - min <= 1e-8 * max;
    let bb: Vec<BigFloat> = b.iter().map(|&x| BigFloat::from_f64(x, &d)).collect();
    let mut partials = |wrt: Wrt| -> Result<BigFloat, LawError> {
        let mut df = Differentiator::new(wrt);
        let mut acc = BigFloat::zero(&d);
        for (f, bi) in system.rhs.iter().zip(&bb) {
            let e = df.diff(f)?;
            if !expr::is_zero(&e) {
                acc = acc.add(&bi.mul(&ev.eval(&e)?));
            }
        }
        Ok(acc)
    };
    let bfz = partials(Wrt::Z)?;
    let mut mu = Vec::with_capacity(markers.len());
    for m in markers {
        mu.push(partials(Wrt::Marker(m.to_string()))?.div(&point.rho.mul(&bfz)));
    }
    Ok(MeanVector { b, mu, uniform })
}

/// `exp(-(m - μn)² / (2σ²n)) / (2π σ² n)`.
pub fn local_limit_density(mu: &BigFloat, sigma2: &BigFloat, n: u64, m: i64) -> Result<BigFloat, LawError> {
    if sigma2.is_negative() || sigma2.is_zero() {
        return Err(LawError::NonPositiveVariance(sigma2.to_f64()));
    }
    let d = sigma2.domain();
    let nf = BigFloat::from_i64(n as i64, &d);
    let dev = BigFloat::from_i64(m, &d).sub(&mu.mul(&nf));
    let var = sigma2.mul(&nf);
    let expo = dev.mul(&dev).div(&var.mul_i64(2)).neg().exp();
    Ok(expo.div(&BigFloat::pi(&d).mul_i64(2).mul(&var)))
}

/// Sum of [`local_limit_density`] over integers `m` within `12σ√n` of
/// `μn`, next to the lattice normalisation `1/(σ√(2πn))` it equals for
/// large `n`.
pub fn density_mass(mu: &BigFloat, sigma2: &BigFloat, n: u64) -> Result<(f64, f64), LawError> {
    let s = sigma2.to_f64();
    if s <= 0.0 {
        return Err(LawError::NonPositiveVariance(s));
    }
    let centre = mu.to_f64() * n as f64;
    let width = 12.0 * (s * n as f64).sqrt();
    let (lo, hi) = ((centre - width).floor() as i64, (centre + width).ceil() as i64);
    let mut total = 0.0;
    for m in lo..=hi {
        total += local_limit_density(mu, sigma2, n, m)?.to_f64();
    }
    Ok((total, 1.0 / (s * 2.0 * std::f64::consts::PI * n as f64).sqrt()))
}

#[cfg(test)]
mod tests;
