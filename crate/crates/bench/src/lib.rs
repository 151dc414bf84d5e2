//! Fixtures shared by the engine benchmarks.

use subcrit::classes::{BuiltinClass, ClassName};
use subcrit::num::{BigFloat, Domain};
use subcrit::series::ExactSeries;
use subcrit::{Flavor, TruncatedSeries};

/// A dense series with small, sign-varying coefficients and no constant term.
pub fn sample(len: usize) -> ExactSeries {
    let v: Vec<i64> = (0..len as i64).map(|i| if i == 0 { 0 } else { (i * 7 + 3) % 9 - 4 }).collect();
    ExactSeries::from_ints(&v)
}

pub fn sample_float(len: usize, bits: usize) -> TruncatedSeries<BigFloat> {
    sample(len).to_domain(Domain::float(bits))
}

pub fn labelled(name: ClassName) -> BuiltinClass {
    BuiltinClass::new(name, Flavor::Labelled)
}

pub fn unlabelled(name: ClassName) -> BuiltinClass {
    BuiltinClass::new(name, Flavor::Unlabelled)
}
