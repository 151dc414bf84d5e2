//! Randomized property checks.  Each check takes explicit inputs and
//! reports the first violation; the `gen_*` functions draw inputs from a
//! seeded generator so the same instances can be replayed from a seed.

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::num::{BigFloat, Domain, Field, Rational, Real};
use crate::series::{ExactSeries, SeriesResult, TruncatedSeries};
use crate::singular::{char_solve, linalg, Model};
use crate::solver::FunctionalSystem;
use crate::spec::expr::{self, Expr, Wrt};
use crate::spec::{parse, parse_expr, print_expr, ClassSpec, Differentiator, Flavor, ScalarEvaluator};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn q(p: i64, r: u64) -> Rational {
    Rational::from_parts(p.into(), r.into())
}

/// `values` with the constant term cleared.
fn lift0(values: &[i64]) -> ExactSeries {
    let mut v = values.to_vec();
    v[0] = 0;
    ExactSeries::from_ints(&v)
}

type Op<C> = (&'static str, fn(&TruncatedSeries<C>, &TruncatedSeries<C>) -> SeriesResult<TruncatedSeries<C>>);

/// Binary operations on `(a, b)`; unary ones act on `a` (constant term
/// cleared where the operation needs it) and ignore `b`.
fn ops<C: Field>() -> Vec<Op<C>> {
    vec![
        ("add", |a, b| a.add(b)),
        ("mul", |a, b| a.mul(b)),
        ("exp", |a, _| a.exp()),
        ("log", |a, _| {
            let one = TruncatedSeries::one(a.order(), a.domain());
            one.add(a)?.log()
        }),
        ("geom", |a, _| a.geom()),
        ("compose", |a, b| TruncatedSeries::compose(b, a)),
        ("polya_exp", |a, _| a.polya_exp()),
        ("polya_exp_tail", |a, _| a.polya_exp_tail()),
        ("plethysm_scale", |a, _| a.plethysm_scale(2)),
    ]
}

pub fn gen_coeffs(rng: &mut StdRng, len: usize) -> Vec<i64> {
    (0..len).map(|_| rng.gen_range(-4..=4)).collect()
}

/// Computing at the full order and truncating to `m` equals computing on
/// the truncated inputs.
pub fn truncation_coherence(a: &[i64], b: &[i64], m: usize) -> Check {
    let (a, b) = (lift0(a), lift0(b));
    if m >= a.order() || a.order() != b.order() {
        return Err(format!("bad instance: m = {m}, orders {} and {}", a.order(), b.order()));
    }
    for (name, op) in ops::<Rational>() {
        let full = op(&a, &b).map_err(|e| format!("{name}: {e}"))?.truncate(m);
        let short = op(&a.truncate(m), &b.truncate(m)).map_err(|e| format!("{name}: {e}"))?;
        if full != short {
            return Err(format!("{name}: {full:?} vs {short:?}"));
        }
    }
    Ok(())
}

/// Float results agree with exact ones to relative error `2^-64`, measured
/// against the largest exact coefficient of each result.
pub fn exact_float_agreement(a: &[i64], b: &[i64], bits: usize) -> Check {
    let d = Domain::float(bits);
    let (a, b) = (lift0(a), lift0(b));
    let (fa, fb): (TruncatedSeries<BigFloat>, _) = (a.to_domain(d), b.to_domain(d));
    let tol = 2f64.powi(-64);
    for ((name, exact_op), (_, float_op)) in ops::<Rational>().into_iter().zip(ops::<BigFloat>()) {
        let e = exact_op(&a, &b).map_err(|e| format!("{name}: {e}"))?;
        let f = float_op(&fa, &fb).map_err(|e| format!("{name}: {e}"))?;
        let e: Vec<BigFloat> = e.coeffs().iter().map(|c| BigFloat::from_rational(c, &d)).collect();
        let scale = e.iter().map(|c| c.to_f64().abs()).fold(1.0, f64::max);
        for (n, (x, y)) in e.iter().zip(f.coeffs()).enumerate() {
            let err = x.sub(y).to_f64().abs();
            if !(err <= tol * scale) {
                return Err(format!("{name}: coefficient {n} off by {err:e} (scale {scale:e})"));
            }
        }
    }
    Ok(())
}

/// `polya_exp(a + b) = polya_exp(a) polya_exp(b)` and
/// `polya_exp(a) = exp(a) polya_exp_tail(a)`.
pub fn polya_factorization(a: &[i64], b: &[i64]) -> Check {
    let (a, b) = (lift0(a), lift0(b));
    let err = |e: crate::series::SeriesError| e.to_string();
    let lhs = a.add(&b).map_err(err)?.polya_exp().map_err(err)?;
    let rhs = a.polya_exp().map_err(err)?.mul(&b.polya_exp().map_err(err)?).map_err(err)?;
    if lhs != rhs {
        return Err(format!("product rule: {lhs:?} vs {rhs:?}"));
    }
    let split = a.exp().map_err(err)?.mul(&a.polya_exp_tail().map_err(err)?).map_err(err)?;
    if a.polya_exp().map_err(err)? != split {
        return Err(format!("tail split: {split:?}"));
    }
    Ok(())
}

/// An expression with a point where it and all its partials are finite.
#[derive(Clone, Debug)]
pub struct FdInstance {
    pub expr: Expr,
    pub z: f64,
    pub y: [f64; 2],
    pub v: f64,
}

const FD_VARS: [&str; 2] = ["y1", "y2"];
const FD_MARKER: &str = "v";

fn small_const(rng: &mut StdRng) -> Expr {
    expr::konst(q(rng.gen_range(1..=4), rng.gen_range(1..=4)))
}

fn smooth_expr(rng: &mut StdRng, depth: u32, with_vars: bool) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..if with_vars { 5 } else { 3 }) {
            0 => small_const(rng),
            1 => expr::atom(),
            2 => expr::marker(FD_MARKER),
            k => expr::var(FD_VARS[k - 3]),
        };
    }
    let kid = |rng: &mut StdRng| smooth_expr(rng, depth - 1, with_vars);
    match rng.gen_range(0..8) {
        0 => expr::sum((0..rng.gen_range(2..=3)).map(|_| kid(rng)).collect::<Vec<_>>()),
        1 => expr::prod((0..rng.gen_range(2..=3)).map(|_| kid(rng)).collect::<Vec<_>>()),
        2 => expr::neg(kid(rng)),
        3 => expr::exp(expr::scale(q(1, 2), kid(rng))),
        4 => expr::set_ge(rng.gen_range(1..=3), kid(rng)),
        5 => expr::geom(expr::scale(q(1, 8), kid(rng))),
        6 => expr::subst(smooth_expr(rng, depth - 1, false), rng.gen_range(2..=3)),
        _ => expr::frozen((0..rng.gen_range(2..=4)).map(|_| q(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect()),
    }
}

fn fd_evaluator(inst: &FdInstance, d: Domain, shift: Option<(usize, &BigFloat)>) -> ScalarEvaluator<BigFloat> {
    let mut coords = [
        BigFloat::from_f64(inst.z, &d),
        BigFloat::from_f64(inst.y[0], &d),
        BigFloat::from_f64(inst.y[1], &d),
        BigFloat::from_f64(inst.v, &d),
    ];
    if let Some((i, h)) = shift {
        coords[i] = coords[i].add(h);
    }
    let [z, y1, y2, v] = coords;
    let vars = HashMap::from([(FD_VARS[0].to_string(), y1), (FD_VARS[1].to_string(), y2)]);
    let mut ev = ScalarEvaluator::new(d);
    ev.set_point(z, vars, HashMap::from([(FD_MARKER.to_string(), v)]));
    ev
}

fn wrt(i: usize) -> Wrt {
    match i {
        0 => Wrt::Z,
        1 | 2 => Wrt::Var(FD_VARS[i - 1].to_string()),
        _ => Wrt::Marker(FD_MARKER.to_string()),
    }
}

/// Draws expressions until one evaluates, with every first partial, at a
/// random point.
pub fn gen_fd_instance(rng: &mut StdRng) -> FdInstance {
    let d = Domain::float(64);
    loop {
        let inst = FdInstance {
            expr: smooth_expr(rng, 3, true),
            z: rng.gen_range(0.05..0.3),
            y: [rng.gen_range(0.05..0.4), rng.gen_range(0.05..0.4)],
            v: rng.gen_range(0.5..1.5),
        };
        let mut ok = fd_evaluator(&inst, d, None).eval(&inst.expr).is_ok_and(|x| x.is_finite());
        for i in 0..4 {
            ok = ok
                && differentiate_all(&inst.expr, i)
                    .is_some_and(|e| expr::is_zero(&e) || fd_evaluator(&inst, d, None).eval(&e).is_ok());
        }
        if ok {
            return inst;
        }
    }
}

fn differentiate_all(e: &Expr, i: usize) -> Option<Expr> {
    Differentiator::new(wrt(i)).diff(e).ok()
}

/// Symbolic partials against central differences at 256 bits, relative
/// error at most `1e-6`.
pub fn jacobian_vs_fd(inst: &FdInstance) -> Check {
    let d = Domain::float(256);
    let h = BigFloat::one(&d).div(&BigFloat::from_i64(2, &d).powi(64));
    for i in 0..4 {
        let de = Differentiator::new(wrt(i)).diff(&inst.expr).map_err(|e| format!("{:?}: {e}", wrt(i)))?;
        let sym = if expr::is_zero(&de) {
            0.0
        } else {
            fd_evaluator(inst, d, None).eval(&de).map_err(|e| e.to_string())?.to_f64()
        };
        let up = fd_evaluator(inst, d, Some((i, &h))).eval(&inst.expr).map_err(|e| e.to_string())?;
        let down = fd_evaluator(inst, d, Some((i, &h.neg()))).eval(&inst.expr).map_err(|e| e.to_string())?;
        let fd = up.sub(&down).div(&h.mul_i64(2)).to_f64();
        if !((sym - fd).abs() <= 1e-6 * sym.abs().max(fd.abs()) + 1e-30) {
            return Err(format!("{:?} of {}: symbolic {sym:e}, difference {fd:e}", wrt(i), print_expr(&inst.expr)));
        }
    }
    Ok(())
}

/// A positive polynomial system `y_i = z P_i(y)` with one or two equations.
#[derive(Clone, Debug)]
pub struct NewtonInstance {
    /// `(numerator, denominator)` pairs: `(c, a, b)` for
    /// `y = z (c + a y + b y^2)`, or `(c1, a1, b1, c2, a2, b2)` for
    /// `y1 = z (c1 + a1 y2 + b1 y1 y2)`, `y2 = z (c2 + a2 y1 + b2 y1^2)`.
    pub coeffs: Vec<(i64, u64)>,
}

pub fn gen_newton_instance(rng: &mut StdRng) -> NewtonInstance {
    let len = if rng.gen_bool(0.5) { 3 } else { 6 };
    NewtonInstance { coeffs: (0..len).map(|_| (rng.gen_range(1..=5), rng.gen_range(1..=5))).collect() }
}

impl NewtonInstance {
    pub fn system(&self) -> FunctionalSystem {
        let c: Vec<Expr> = self.coeffs.iter().map(|&(p, r)| expr::konst(q(p, r))).collect();
        let (y1, y2, z) = (expr::var("y1"), expr::var("y2"), expr::atom());
        let spec = if c.len() == 3 {
            let p = expr::sum([c[0].clone(), expr::mul(c[1].clone(), y1.clone()), expr::prod([c[2].clone(), y1.clone(), y1])]);
            ClassSpec::new("poly", Flavor::Labelled).eq("y1", expr::mul(z, p))
        } else {
            let p1 = expr::sum([c[0].clone(), expr::mul(c[1].clone(), y2.clone()), expr::prod([c[2].clone(), y1.clone(), y2])]);
            let p2 = expr::sum([c[3].clone(), expr::mul(c[4].clone(), y1.clone()), expr::prod([c[5].clone(), y1.clone(), y1])]);
            ClassSpec::new("poly", Flavor::Labelled).eq("y1", expr::mul(z.clone(), p1)).eq("y2", expr::mul(z, p2))
        };
        FunctionalSystem::new(spec)
    }
}

/// The returned point meets its own residual certificate, re-checked here
/// at doubled precision; one-equation instances also match the closed form
/// `rho = 1/(a + 2 sqrt(b c))`, `tau = sqrt(c/b)`.
pub fn newton_certificate(inst: &NewtonInstance, bits: usize) -> Check {
    let sys = inst.system();
    let p = char_solve(&sys, None, bits).map_err(|e| e.to_string())?;
    if p.residual > p.newton_tol {
        return Err(format!("reported residual {:e} above tolerance", p.residual.to_f64()));
    }
    let d2 = Domain::float(2 * bits);
    let model = Model::new(&sys).map_err(|e| e.to_string())?;
    let mut ev = model.evaluator::<BigFloat>(d2);
    let y: Vec<BigFloat> = p.tau.iter().map(|t| t.with_bits(2 * bits)).collect();
    let res = model.residual(&mut ev, &p.rho.with_bits(2 * bits), &y).map_err(|e| e.to_string())?;
    let worst = linalg::max_abs(&res);
    if !(worst <= p.newton_tol.to_f64()) {
        return Err(format!("recomputed residual {worst:e}"));
    }
    if p.tau.iter().any(|t| !(t.to_f64() > 0.0)) || !(p.rho.to_f64() > 0.0) {
        return Err(format!("non-positive point: rho {:e}", p.rho.to_f64()));
    }
    if inst.coeffs.len() == 3 {
        let d = Domain::float(bits);
        let [c, a, b] = [0, 1, 2].map(|i| BigFloat::from_rational(&q(inst.coeffs[i].0, inst.coeffs[i].1), &d));
        let rho = BigFloat::one(&d).div(&a.add(&b.mul(&c).sqrt().mul_i64(2)));
        let tau = c.div(&b).sqrt();
        let tol = p.newton_tol.to_f64() * 1e3;
        let (er, et) = (p.rho.sub(&rho).to_f64().abs(), p.tau[0].sub(&tau).to_f64().abs());
        if !(er <= tol * rho.to_f64() && et <= tol * tau.to_f64()) {
            return Err(format!("closed form: rho off by {er:e}, tau off by {et:e}"));
        }
    }
    Ok(())
}

const RT_VARS: [&str; 3] = ["A", "Bx", "c_1"];
const RT_MARKERS: [&str; 2] = ["v", "u"];

fn any_const(rng: &mut StdRng) -> Rational {
    q(rng.gen_range(-6..=6), rng.gen_range(1..=5))
}

/// Any expression the grammar can express, over `vars` and the markers.
pub fn gen_expr(rng: &mut StdRng, depth: u32, vars: &[&str]) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => expr::konst(any_const(rng)),
            1 => expr::atom(),
            2 => expr::marker(RT_MARKERS[rng.gen_range(0..RT_MARKERS.len())]),
            _ if vars.is_empty() => expr::atom(),
            _ => expr::var(vars[rng.gen_range(0..vars.len())]),
        };
    }
    let kid = |rng: &mut StdRng| gen_expr(rng, depth - 1, vars);
    match rng.gen_range(0..13) {
        0 => expr::sum((0..rng.gen_range(2..=4)).map(|_| kid(rng)).collect::<Vec<_>>()),
        1 => expr::prod((0..rng.gen_range(2..=4)).map(|_| kid(rng)).collect::<Vec<_>>()),
        2 => expr::neg(kid(rng)),
        3 => expr::exp(kid(rng)),
        4 => expr::pset(kid(rng)),
        5 => expr::pset_tail(kid(rng)),
        6 => expr::set_ge(rng.gen_range(1..=4), kid(rng)),
        7 => expr::pset_ge(rng.gen_range(1..=4), kid(rng)),
        8 => expr::subst(kid(rng), rng.gen_range(1..=4)),
        9 => expr::geom(kid(rng)),
        10 => expr::unroot(kid(rng)),
        11 => expr::frozen((0..rng.gen_range(1..=4)).map(|_| any_const(rng)).collect()),
        _ => expr::sub(kid(rng), kid(rng)),
    }
}

pub fn gen_round_trip_expr(rng: &mut StdRng) -> Expr {
    gen_expr(rng, 4, &RT_VARS)
}

/// A well-formed unlabelled class over one to three variables.
pub fn gen_spec(rng: &mut StdRng) -> ClassSpec {
    let n = rng.gen_range(1..=RT_VARS.len());
    let vars = &RT_VARS[..n];
    let mut spec = ClassSpec::new("random", Flavor::Unlabelled);
    for m in RT_MARKERS {
        spec = spec.marker(m);
    }
    for v in vars {
        spec = spec.eq(v, gen_expr(rng, 3, vars));
    }
    if rng.gen_bool(0.5) {
        spec = spec.expose(vars[rng.gen_range(0..n)]);
    }
    spec
}

/// Printing then parsing gives back the same expression.
pub fn expr_round_trip(e: &Expr) -> Check {
    let src = print_expr(e);
    let back = parse_expr(&src, Flavor::Unlabelled, &RT_MARKERS).map_err(|err| format!("{src}: {err}"))?;
    if back != *e {
        return Err(format!("{src} reparses as {}", print_expr(&back)));
    }
    Ok(())
}

pub fn spec_round_trip(spec: &ClassSpec) -> Check {
    let src = spec.to_source();
    let back = parse(&src).map_err(|err| format!("{src}: {err}"))?;
    if back != *spec {
        return Err(format!("{src} reparses as {}", back.to_source()));
    }
    Ok(())
}

/// The six suites, each over `cases` instances drawn from `seed`.
pub fn run_suites(seed: u64, cases: usize) -> Vec<(&'static str, Result<usize, String>)> {
    type Suite = fn(&mut StdRng) -> Check;
    let suites: [(&str, Suite); 6] = [
        ("truncation coherence", |r| {
            let len = r.gen_range(3..=12);
            let m = r.gen_range(0..len - 1);
            truncation_coherence(&gen_coeffs(r, len), &gen_coeffs(r, len), m)
        }),
        ("exact/float agreement", |r| {
            let len = r.gen_range(2..=12);
            let bits = [128, 256][r.gen_range(0..2)];
            exact_float_agreement(&gen_coeffs(r, len), &gen_coeffs(r, len), bits)
        }),
        ("symbolic vs finite-difference partials", |r| jacobian_vs_fd(&gen_fd_instance(r))),
        ("polya_exp factorization", |r| {
            let len = r.gen_range(2..=12);
            polya_factorization(&gen_coeffs(r, len), &gen_coeffs(r, len))
        }),
        ("Newton residual certificates", |r| newton_certificate(&gen_newton_instance(r), 256)),
        ("parse/print round trip", |r| {
            expr_round_trip(&gen_round_trip_expr(r))?;
            spec_round_trip(&gen_spec(r))
        }),
    ];
    suites
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut r = rng(seed.wrapping_add(i as u64));
            let outcome = (0..cases).try_for_each(|case| check(&mut r).map_err(|e| format!("case {case}: {e}")));
            (*name, outcome.map(|_| cases))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a_few_seeds() {
        for (name, outcome) in run_suites(7, 10) {
            assert_eq!(outcome, Ok(10), "{name}");
        }
    }

    #[test]
    fn checks_detect_breakage() {
        let e = expr::add(expr::atom(), expr::var("A"));
        assert!(expr_round_trip(&e).is_ok());
        assert!(truncation_coherence(&[0, 1, 2], &[0, 1, 2], 5).is_err());
        let inst = NewtonInstance { coeffs: vec![(1, 1), (0, 1), (1, 1)] };
        // y = z (1 + y^2): rho = 1/2
        newton_certificate(&inst, 128).unwrap();
    }
}
