//! Square-root singular points of positive systems: Newton iteration on the
//! characteristic system `y = F(y; z)`, `det(I - Jac_F) = 0`, with the
//! schedule driver, subcriticality diagnostics and coefficient fits.

pub mod diagnostics;
pub mod linalg;
pub mod schedule;

use std::collections::HashMap;

use serde::Serialize;

use crate::num::{BigFloat, Domain, Field, Rational, Real};
use crate::solver::FunctionalSystem;
use crate::spec::expr::{self, Expr, Wrt};
use crate::spec::{DiffError, Differentiator, ScalarError, ScalarEvaluator};
use linalg::Matrix;

pub use diagnostics::{asymptotic_fit, subcriticality_check, Fit, FitError, Subcriticality};
pub use schedule::{growth_system, refine_schedule, GrowthReport, GrowthRow, ScheduleError, Target};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SingularError {
    #[error("system still contains Polya operators; freeze its tails first")]
    NotFrozen,
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] ScalarError),
    #[error("no seed: value iteration {0}")]
    NoSeed(String),
    #[error("Newton iteration diverged after {iterations} steps (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },
    #[error("singular Newton matrix after {0} steps")]
    SingularMatrix(usize),
    #[error("component {var} = {value} is not positive at convergence")]
    NotPositive { var: String, value: f64 },
    #[error("Perron root of |Jac| is {0}, expected 1")]
    Spectral(f64),
    #[error("residual {0:e} at doubled precision exceeds the tolerance")]
    Verification(f64),
}

/// Symbolic data for Newton: `F`, `F_z`, the Jacobian and its first
/// partials, all over a frozen system.
pub struct Model {
    pub vars: Vec<String>,
    markers: HashMap<String, Rational>,
    f: Vec<Expr>,
    fz: Vec<Expr>,
    jac: Vec<Vec<Expr>>,
    djac_dy: Vec<Vec<Vec<Expr>>>,
    djac_dz: Vec<Vec<Expr>>,
}

impl Model {
    pub fn new(system: &FunctionalSystem) -> Result<Self, SingularError> {
        if !system.is_frozen() {
            return Err(SingularError::NotFrozen);
        }
        let r = system.len();
        let mut dy: Vec<Differentiator> = system.vars.iter().map(|v| Differentiator::new(Wrt::Var(v.clone()))).collect();
        let mut dz = Differentiator::new(Wrt::Z);
        let mut jac = vec![Vec::with_capacity(r); r];
        for (i, f) in system.rhs.iter().enumerate() {
            for d in dy.iter_mut() {
                jac[i].push(d.diff(f)?);
            }
        }
        let fz = system.rhs.iter().map(|f| dz.diff(f)).collect::<Result<Vec<_>, _>>()?;
        let mut djac_dy = Vec::with_capacity(r);
        for d in dy.iter_mut() {
            djac_dy.push(jac.iter().map(|row| row.iter().map(|e| d.diff(e)).collect()).collect::<Result<Vec<Vec<_>>, _>>()?);
        }
        let djac_dz = jac.iter().map(|row| row.iter().map(|e| dz.diff(e)).collect()).collect::<Result<Vec<Vec<_>>, _>>()?;
        Ok(Model { vars: system.vars.clone(), markers: system.markers.clone(), f: system.rhs.clone(), fz, jac, djac_dy, djac_dz })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn evaluator<R: Real>(&self, d: Domain) -> ScalarEvaluator<R> {
        ScalarEvaluator::new(d)
    }

    fn set<R: Real>(&self, ev: &mut ScalarEvaluator<R>, z: &R, y: &[R]) {
        let d = ev.domain();
        let vars = self.vars.iter().cloned().zip(y.iter().cloned()).collect();
        let markers = self.markers.iter().map(|(m, v)| (m.clone(), R::from_rational(v, &d))).collect();
        ev.set_point(z.clone(), vars, markers);
    }

    fn eval_all<R: Real>(ev: &mut ScalarEvaluator<R>, es: &[Expr]) -> Result<Vec<R>, ScalarError> {
        let d = ev.domain();
        es.iter().map(|e| if expr::is_zero(e) { Ok(R::zero(&d)) } else { ev.eval(e) }).collect()
    }

    fn eval_matrix<R: Real>(ev: &mut ScalarEvaluator<R>, m: &[Vec<Expr>]) -> Result<Matrix<R>, ScalarError> {
        m.iter().map(|row| Self::eval_all(ev, row)).collect()
    }

    /// `F(y; z)`.
    pub fn rhs<R: Real>(&self, ev: &mut ScalarEvaluator<R>, z: &R, y: &[R]) -> Result<Vec<R>, ScalarError> {
        self.set(ev, z, y);
        Self::eval_all(ev, &self.f)
    }

    /// `Jac_F(y; z)` with entry `(i, j) = ∂F_i/∂y_j`.
    pub fn jacobian<R: Real>(&self, ev: &mut ScalarEvaluator<R>, z: &R, y: &[R]) -> Result<Matrix<R>, ScalarError> {
        self.set(ev, z, y);
        Self::eval_matrix(ev, &self.jac)
    }

    /// Residual `(y - F, det(I - Jac))`.
    pub fn residual<R: Real>(&self, ev: &mut ScalarEvaluator<R>, z: &R, y: &[R]) -> Result<Vec<R>, ScalarError> {
        let d = ev.domain();
        let f = self.rhs(ev, z, y)?;
        let m = self.char_matrix(ev, &d)?;
        let mut out: Vec<R> = y.iter().zip(&f).map(|(a, b)| a.sub(b)).collect();
        out.push(linalg::det(&m, &d));
        Ok(out)
    }

    fn char_matrix<R: Real>(&self, ev: &mut ScalarEvaluator<R>, d: &Domain) -> Result<Matrix<R>, ScalarError> {
        let j = Self::eval_matrix(ev, &self.jac)?;
        let mut m = linalg::identity::<R>(self.len(), d);
        for (mi, ji) in m.iter_mut().zip(&j) {
            for (a, b) in mi.iter_mut().zip(ji) {
                *a = a.sub(b);
            }
        }
        Ok(m)
    }

    /// Residual and its Jacobian in the unknowns `(y_1..y_r, z)`.
    fn linearize<R: Real>(&self, ev: &mut ScalarEvaluator<R>, z: &R, y: &[R]) -> Result<(Vec<R>, Matrix<R>), ScalarError> {
        let d = ev.domain();
        let r = self.len();
        let res = self.residual(ev, z, y)?;
        let m = self.char_matrix(ev, &d)?;
        let fz = Self::eval_all(ev, &self.fz)?;
        let adj = linalg::adjugate(&m, &d);
        // d det(M) = tr(adj(M) dM) with dM = -dJ
        let trace = |ev: &mut ScalarEvaluator<R>, dj: &[Vec<Expr>]| -> Result<R, ScalarError> {
            let dj = Self::eval_matrix(ev, dj)?;
            let mut acc = R::zero(&d);
            for i in 0..r {
                for j in 0..r {
                    acc = acc.sub(&adj[i][j].mul(&dj[j][i]));
                }
            }
            Ok(acc)
        };
        let mut a: Matrix<R> = Vec::with_capacity(r + 1);
        for i in 0..r {
            let mut row = m[i].clone();
            row.push(fz[i].neg());
            a.push(row);
        }
        let mut last = Vec::with_capacity(r + 1);
        for k in 0..r {
            last.push(trace(ev, &self.djac_dy[k])?);
        }
        last.push(trace(ev, &self.djac_dz)?);
        a.push(last);
        Ok((res, a))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Seed {
    pub z: f64,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint {
    pub vars: Vec<String>,
    pub tau: Vec<BigFloat>,
    pub rho: BigFloat,
    pub bits: usize,
    pub iterations: usize,
    /// Max-norm residual re-evaluated at twice the working precision.
    pub residual: BigFloat,
    pub newton_tol: BigFloat,
    pub perron: f64,
    pub jac_spectral_ok: bool,
    pub seed: Seed,
}

impl SingularPoint {
    pub fn get(&self, var: &str) -> Option<&BigFloat> {
        self.vars.iter().position(|v| v == var).map(|i| &self.tau[i])
    }

    pub fn gamma(&self) -> BigFloat {
        BigFloat::one(&self.rho.domain()).div(&self.rho)
    }

    pub fn var_map(&self) -> HashMap<String, BigFloat> {
        self.vars.iter().cloned().zip(self.tau.iter().cloned()).collect()
    }
}

fn max_norm<R: Real>(v: &[R], d: &Domain) -> R {
    v.iter().fold(R::zero(d), |m, x| R::max_of(&m, &x.abs()))
}

fn pow2(e: i64, bits: usize) -> BigFloat {
    let d = Domain::float(bits);
    let two = BigFloat::from_i64(2, &d);
    let p = two.powi(e.unsigned_abs() as u32);
    if e < 0 {
        BigFloat::one(&d).div(&p)
    } else {
        p
    }
}

/// Value iteration `y <- F(y; z)` in machine precision from `y0`; `None`
/// when it fails to settle.
fn value_iteration(model: &Model, ev: &mut ScalarEvaluator<f64>, z: f64, y0: &[f64], cap: usize) -> Option<Vec<f64>> {
    let mut y = y0.to_vec();
    for _ in 0..cap {
        let next = model.rhs(ev, &z, &y).ok()?;
        if next.iter().any(|v| !v.is_finite() || v.abs() > 1e12) {
            return None;
        }
        let delta = next.iter().zip(&y).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())).fold(0.0, f64::max);
        y = next;
        if delta <= 1e-14 {
            return Some(y);
        }
    }
    None
}

/// Marches `z` up from 0 in steps of 0.01 until value iteration stops
/// converging, then bisects the last step.
pub fn scan_seed(model: &Model) -> Result<Seed, SingularError> {
    const STEP: f64 = 0.01;
    const CAP: usize = 20_000;
    let mut ev = ScalarEvaluator::<f64>::new(Domain::Machine);
    let mut lo = (0.0, vec![0.0; model.len()]);
    let mut hi = None;
    for k in 1..=1000 {
        let z = k as f64 * STEP;
        match value_iteration(model, &mut ev, z, &lo.1, CAP) {
            Some(y) => lo = (z, y),
            None => {
                hi = Some(z);
                break;
            }
        }
    }
    let Some(mut hi) = hi else {
        return Err(SingularError::NoSeed(format!("converges for every z up to {}", 1000.0 * STEP)));
    };
    if lo.0 == 0.0 && value_iteration(model, &mut ev, 0.0, &lo.1, CAP).is_none() {
        return Err(SingularError::NoSeed("fails already at z = 0".into()));
    }
    for _ in 0..24 {
        let mid = 0.5 * (lo.0 + hi);
        match value_iteration(model, &mut ev, mid, &lo.1, CAP) {
            Some(y) => lo = (mid, y),
            None => hi = mid,
        }
    }
    Ok(Seed { z: lo.0, y: lo.1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NewtonOptions {
    pub bits: usize,
    pub max_iter: usize,
    pub max_halvings: u32,
}

impl NewtonOptions {
    pub fn new(bits: usize) -> Self {
        NewtonOptions { bits, max_iter: 200, max_halvings: 40 }
    }

    /// `2^(-bits/2)`.
    pub fn tol(&self) -> BigFloat {
        pow2(-(self.bits as i64 / 2), self.bits)
    }
}

/// Solves the characteristic system of a frozen system, seeded by `init`
/// `(y, z)` or by a machine-precision scan.
pub fn char_solve(
    system: &FunctionalSystem,
    init: Option<(&[BigFloat], &BigFloat)>,
    bits: usize,
) -> Result<SingularPoint, SingularError> {
    char_solve_with(&Model::new(system)?, init, NewtonOptions::new(bits))
}

pub fn char_solve_with(
    model: &Model,
    init: Option<(&[BigFloat], &BigFloat)>,
    opts: NewtonOptions,
) -> Result<SingularPoint, SingularError> {
    let d = Domain::float(opts.bits);
    let r = model.len();
    let (seed, mut y, mut z) = match init {
        Some((y, z)) => {
            let seed = Seed { z: z.to_f64(), y: y.iter().map(|v| v.to_f64()).collect() };
            (seed, y.iter().map(|v| v.with_bits(opts.bits)).collect::<Vec<_>>(), z.with_bits(opts.bits))
        }
        None => {
            let s = scan_seed(model)?;
            let y = s.y.iter().map(|&v| BigFloat::from_f64(v, &d)).collect();
            let z = BigFloat::from_f64(s.z, &d);
            (s, y, z)
        }
    };
    let tol = opts.tol();
    let mut ev = ScalarEvaluator::<BigFloat>::new(d);
    let (mut res, mut a) = model.linearize(&mut ev, &z, &y)?;
    let mut norm = max_norm(&res, &d);
    let mut iterations = 0;
    let mut polish = 0;
    while polish < 2 {
        if iterations >= opts.max_iter {
            return Err(SingularError::Divergence { iterations, residual: norm.to_f64() });
        }
        if norm <= tol {
            polish += 1;
        }
        let rhs: Vec<BigFloat> = res.iter().map(|v| v.neg()).collect();
        let Some(step) = linalg::solve(&a, &rhs) else {
            if norm <= tol {
                break;
            }
            return Err(SingularError::SingularMatrix(iterations));
        };
        iterations += 1;
        let mut lambda = BigFloat::one(&d);
        let half = BigFloat::one(&d).div_i64(2);
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let yn: Vec<BigFloat> = y.iter().zip(&step).map(|(a, b)| a.add(&lambda.mul(b))).collect();
            let zn = z.add(&lambda.mul(&step[r]));
            if let Ok((rn, an)) = model.linearize(&mut ev, &zn, &yn) {
                let nn = max_norm(&rn, &d);
                if nn < norm || nn.is_zero() {
                    (y, z, res, a, norm) = (yn, zn, rn, an, nn);
                    accepted = true;
                    break;
                }
            }
            lambda = lambda.mul(&half);
        }
        if !accepted {
            if norm <= tol {
                break;
            }
            return Err(SingularError::Divergence { iterations, residual: norm.to_f64() });
        }
    }
    if !z.is_negative() && !z.is_zero() {
        for (v, value) in model.vars.iter().zip(&y) {
            if value.is_negative() || value.is_zero() {
                return Err(SingularError::NotPositive { var: v.clone(), value: value.to_f64() });
            }
        }
    } else {
        return Err(SingularError::NotPositive { var: "z".into(), value: z.to_f64() });
    }
    let d2 = Domain::float(2 * opts.bits);
    let mut ev2 = ScalarEvaluator::<BigFloat>::new(d2);
    let y2: Vec<BigFloat> = y.iter().map(|v| v.with_bits(2 * opts.bits)).collect();
    let residual = max_norm(&model.residual(&mut ev2, &z.with_bits(2 * opts.bits), &y2)?, &d2);
    if residual > tol.with_bits(2 * opts.bits) {
        return Err(SingularError::Verification(residual.to_f64()));
    }
    let jac: Vec<Vec<f64>> = model.jacobian(&mut ev, &z, &y)?.iter().map(|row| row.iter().map(|v| v.to_f64()).collect()).collect();
    let nonnegative = jac.iter().flatten().all(|&v| v >= -1e-12);
    let abs: Vec<Vec<f64>> = jac.iter().map(|row| row.iter().map(|v| v.abs()).collect()).collect();
    let perron = linalg::perron(&abs, false, 1e-12, 1_000_000).map(|p| p.0).unwrap_or(f64::NAN);
    let jac_spectral_ok = (perron - 1.0).abs() <= 1e-6;
    if nonnegative && !jac_spectral_ok {
        return Err(SingularError::Spectral(perron));
    }
    Ok(SingularPoint {
        vars: model.vars.clone(),
        tau: y,
        rho: z,
        bits: opts.bits,
        iterations,
        residual,
        newton_tol: tol,
        perron,
        jac_spectral_ok,
        seed,
    })
}

#[cfg(test)]
mod tests;
