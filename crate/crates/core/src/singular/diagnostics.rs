//! Advisory subcriticality diagnostics and empirical coefficient fits.

use serde::Serialize;

use super::{scan_seed, Model, SingularPoint};
use crate::classes::{BuiltinClass, ClassName, ROOT};
use crate::num::{BigFloat, Field, Rational};
use crate::series::TruncatedSeries;
use crate::solver::{freeze_tails, FunctionalSystem, SeriesSolution, SolveError};
use crate::spec::expr::{self, Node};
use crate::spec::Flavor;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subcriticality {
    pub class: ClassName,
    pub flavor: Flavor,
    /// `f(ρ)`, the rooted series at the singularity.
    pub tau: f64,
    /// Estimated radius in `y` of the block series `B'(y)`, or of `g(y, ρ)`.
    pub eta: f64,
    /// `η - f(ρ)`.
    pub margin: f64,
    pub rho_in_unit_interval: Option<bool>,
    /// Root-test radius estimate of `A(z) = Σ_{i≥2} Z(f(z^i), ...)/i`.
    pub tail_radius: Option<f64>,
    pub tail_margin: Option<f64>,
    pub subcritical: bool,
}

/// Smallest singularity in `y` of the derived block subsystem at `z = ρ`:
/// the block equations with `C -> y` and frozen tails evaluated at `ρ`,
/// located by the value-iteration scan.  Infinite when none is found.
fn block_radius(frozen: &FunctionalSystem, rho: f64) -> Result<f64, SolveError> {
    let at_rho = |p: &[Rational]| {
        let v = p.iter().rev().fold(0.0, |acc, c| acc * rho + c.to_f64().value());
        expr::konst(BigFloat::from_f64_bits(v, 53).to_rational())
    };
    let keep: Vec<&str> = frozen.vars.iter().map(|v| v.as_str()).filter(|v| *v != ROOT).collect();
    if keep.is_empty() {
        return Ok(f64::INFINITY);
    }
    let mut sub = frozen.clone();
    for e in sub.rhs.iter_mut() {
        *e = expr::replace_leaves(e, &|n| match n {
            Node::Frozen(p) => Some(at_rho(p)),
            Node::Var(x) if x == ROOT => Some(expr::atom()),
            _ => None,
        });
    }
    let sub = sub.restrict(&keep)?;
    let model = Model::new(&sub).map_err(|_| SolveError::MissingVar(ROOT.into()))?;
    Ok(scan_seed(&model).map(|s| s.z).unwrap_or(f64::INFINITY))
}

/// Advisory subcriticality record; never fails a pipeline on its own.
pub fn subcriticality_check(
    b: &BuiltinClass,
    solution: &SeriesSolution,
    point: &SingularPoint,
) -> Result<Subcriticality, SolveError> {
    let system = b.system();
    let frozen = freeze_tails(&system, solution)?;
    let rho = point.rho.to_f64();
    let tau = point.get(ROOT).ok_or_else(|| SolveError::MissingVar(ROOT.into()))?.to_f64();
    let eta = block_radius(&frozen, rho)?;
    let margin = eta - tau;
    let mut out = Subcriticality {
        class: b.name,
        flavor: b.flavor,
        tau,
        eta,
        margin,
        rho_in_unit_interval: None,
        tail_radius: None,
        tail_margin: None,
        subcritical: margin > 0.0,
    };
    if b.flavor == Flavor::Unlabelled {
        let block = solution.get(b.block_var()).ok_or_else(|| SolveError::MissingVar(b.block_var().into()))?;
        let n = block.order();
        let mut a = vec![0.0; n + 1];
        for i in 2..=n {
            for (k, c) in block.coeffs().iter().enumerate().take(n / i + 1) {
                a[k * i] += c.to_f64().value() / i as f64;
            }
        }
        let last = (0..=n).rev().find(|&k| a[k] > 0.0);
        let radius = last.map(|k| a[k].powf(-1.0 / k as f64)).unwrap_or(f64::INFINITY);
        let unit = rho > 0.0 && rho < 1.0;
        out.rho_in_unit_interval = Some(unit);
        out.tail_radius = Some(radius);
        out.tail_margin = Some(radius - rho);
        out.subcritical &= unit && radius > rho;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least 20 coefficients, got {0}")]
    TooFew(usize),
    #[error("gamma must be positive")]
    BadGamma,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    /// `a_N N^(-exponent) γ^(-N)` at the last positive coefficient.
    pub c_estimate: f64,
    /// Max relative deviation of `c_n` from `c_estimate` over the last quarter.
    pub fluctuation: f64,
    /// Free-exponent estimate from `ln a_n - n ln γ ~ c0 + e ln n + d/n`
    /// over the upper half of the indices.
    pub exponent: f64,
    pub assumed_exponent: f64,
}

/// Empirical amplitude and subexponential exponent of `a_n ~ c n^e γ^n`.
pub fn asymptotic_fit<C: Field>(coeffs: &TruncatedSeries<C>, gamma: f64, exponent: f64) -> Result<Fit, FitError> {
    let n = coeffs.order();
    if n < 20 {
        return Err(FitError::TooFew(n));
    }
    if !(gamma > 0.0) {
        return Err(FitError::BadGamma);
    }
    let lg = gamma.ln();
    let log_a = |k: usize| -> Option<f64> {
        let v = coeffs.coeff(k).to_f64();
        (v > 0.0 && v.is_finite()).then(|| v.ln())
    };
    let c = |k: usize| log_a(k).map(|l| (l - exponent * (k as f64).ln() - k as f64 * lg).exp());
    let last = (1..=n).rev().find(|&k| log_a(k).is_some()).ok_or(FitError::TooFew(0))?;
    let c_estimate = c(last).unwrap_or(f64::NAN);
    let fluctuation =
        (3 * n / 4..=n).filter_map(c).map(|v| (v / c_estimate - 1.0).abs()).fold(0.0, f64::max);
    let mut normal = vec![vec![0.0; 3]; 3];
    let mut rhs = vec![0.0; 3];
    for k in n / 2..=n {
        let Some(l) = log_a(k) else { continue };
        let x = [1.0, (k as f64).ln(), 1.0 / k as f64];
        let y = l - k as f64 * lg;
        for i in 0..3 {
            rhs[i] += x[i] * y;
            for j in 0..3 {
                normal[i][j] += x[i] * x[j];
            }
        }
    }
    let beta = super::linalg::solve(&normal, &rhs).ok_or(FitError::TooFew(n))?;
    Ok(Fit { c_estimate, fluctuation, exponent: beta[1], assumed_exponent: exponent })
}
