//! From vertex-rooted to unrooted connected series, and on to all graphs.
//!
//! Labelled: `C = ∫ C•(t)/t dt` and `G = exp(C)`.  Unlabelled, through the
//! dissymmetry identity for block trees,
//! `C~ = f + Z_B(f(z), f(z^2), ...) - f·Z_B'(f(z), f(z^2), ...)`, and
//! `G~ = PSet(C~)`.

use super::{BuiltinClass, ClassError, ClassName, ROOT};
use crate::num::{Domain, Rational};
use crate::series::ExactSeries;
use crate::solver::SeriesSolution;
use crate::spec::Flavor;

#[derive(Clone, Debug, PartialEq)]
pub struct Unrooted {
    pub connected: ExactSeries,
    pub all: ExactSeries,
}

fn totient(mut n: usize) -> usize {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

fn q(p: i64, r: u64) -> Rational {
    Rational::from_parts(p.into(), r.into())
}

/// `Z_B` of cacti blocks (the link and all polygons) at `s_r = f(z^r)`:
/// `-s1/2 + 1/2 Σ_r φ(r)/r log(1/(1-s_r)) + (s1^2 + 2 s1 s2 + s2)/(4(1-s2))`.
fn cacti_block_index(f: &ExactSeries) -> Result<ExactSeries, ClassError> {
    let n = f.order();
    let one = ExactSeries::one(n, Domain::Exact);
    let mut logs = ExactSeries::zero(n, Domain::Exact);
    for r in 1..=n.max(1) {
        let sr = f.plethysm_scale(r)?;
        let l = one.sub(&sr)?.log()?.neg();
        logs = logs.add(&l.scale(&q(totient(r) as i64, r as u64)))?;
    }
    let s2 = f.plethysm_scale(2)?;
    let num = f.mul(f)?.add(&f.mul(&s2)?.scale(&q(2, 1)))?.add(&s2)?;
    let refl = num.mul(&s2.geom()?)?.scale(&q(1, 4));
    Ok(f.scale(&q(-1, 2)).add(&logs.scale(&q(1, 2)))?.add(&refl)?)
}

/// Unrooted connected and all-graphs series from a solved rooted system.
pub fn unroot(class: &BuiltinClass, rooted: &SeriesSolution) -> Result<Unrooted, ClassError> {
    let f = rooted.get(ROOT).ok_or_else(|| crate::solver::SolveError::MissingVar(ROOT.into()))?;
    let connected = match (class.flavor, class.name) {
        (Flavor::Labelled, _) => f.unroot()?,
        (Flavor::Unlabelled, ClassName::Trees) => {
            let f2 = f.plethysm_scale(2)?;
            f.sub(&f.mul(f)?.scale(&q(1, 2)))?.add(&f2.scale(&q(1, 2)))?
        }
        (Flavor::Unlabelled, ClassName::Cacti) => {
            let h = rooted.get(class.block_var()).ok_or_else(|| crate::solver::SolveError::MissingVar("B".into()))?;
            f.add(&cacti_block_index(f)?)?.sub(&f.mul(h)?)?
        }
        (Flavor::Unlabelled, name) => {
            return Err(ClassError::Unsupported {
                what: "unrooted unlabelled series",
                class: name,
                flavor: class.flavor,
                why: "the full block cycle index is not available; only rooted counts are computed",
            })
        }
    };
    let all = match class.flavor {
        Flavor::Labelled => connected.exp()?,
        Flavor::Unlabelled => connected.polya_exp()?,
    };
    Ok(Unrooted { connected, all })
}

/// `n! [z^n] s` for labelled series, `[z^n] s` otherwise, as integers.
pub fn counts(s: &ExactSeries, flavor: Flavor) -> Vec<Rational> {
    let mut fact = Rational::ONE;
    s.coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n > 0 {
                fact *= Rational::from(n as i64);
            }
            match flavor {
                Flavor::Labelled => c * &fact,
                Flavor::Unlabelled => c.clone(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totients() {
        let v: Vec<usize> = (1..=10).map(totient).collect();
        assert_eq!(v, [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
    }
}
