use std::collections::HashMap;

use proptest::prelude::*;
use subcrit::acceptance::properties::*;
use subcrit::classes::{BuiltinClass, ClassName};
use subcrit::num::{BigFloat, Domain};
use subcrit::series::ExactSeries;
use subcrit::solver::fixed_point;
use subcrit::spec::evaluate;
use subcrit::{Field, Flavor, TruncatedSeries};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 128, ..ProptestConfig::default() }
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, len)
}

fn pair() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (2usize..=12).prop_flat_map(|n| (coeffs(n), coeffs(n)))
}

fn class() -> impl Strategy<Value = BuiltinClass> {
    let names = prop::sample::select(ClassName::ALL.to_vec());
    let flavors = prop::sample::select(vec![Flavor::Labelled, Flavor::Unlabelled]);
    (names, flavors).prop_map(|(n, f)| BuiltinClass::new(n, f))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn truncation_is_coherent((a, b, m) in (3usize..=12).prop_flat_map(|n| (coeffs(n), coeffs(n), 0..n - 1))) {
        prop_assert_eq!(truncation_coherence(&a, &b, m), Ok(()));
    }

    #[test]
    fn float_tracks_exact((a, b) in pair(), bits in prop_oneof![Just(128usize), Just(256)]) {
        prop_assert_eq!(exact_float_agreement(&a, &b, bits), Ok(()));
    }

    #[test]
    fn symbolic_partials_match_differences(seed in any::<u64>()) {
        let inst = gen_fd_instance(&mut rng(seed));
        prop_assert_eq!(jacobian_vs_fd(&inst), Ok(()));
    }

    #[test]
    fn polya_exp_factorizes((a, b) in pair()) {
        prop_assert_eq!(polya_factorization(&a, &b), Ok(()));
    }

    #[test]
    fn newton_points_carry_certificates(coeffs in prop_oneof![
        prop::collection::vec((1i64..=5, 1u64..=5), 3),
        prop::collection::vec((1i64..=5, 1u64..=5), 6),
    ]) {
        prop_assert_eq!(newton_certificate(&NewtonInstance { coeffs }, 256), Ok(()));
    }

    #[test]
    fn expressions_round_trip(seed in any::<u64>()) {
        prop_assert_eq!(expr_round_trip(&gen_round_trip_expr(&mut rng(seed))), Ok(()));
    }

    #[test]
    fn specs_round_trip(seed in any::<u64>()) {
        prop_assert_eq!(spec_round_trip(&gen_spec(&mut rng(seed))), Ok(()));
    }

    #[test]
    fn mul_commutes_and_associates((a, b) in pair(), c in coeffs(12)) {
        let (a, b) = (ExactSeries::from_ints(&a), ExactSeries::from_ints(&b));
        let c = ExactSeries::from_ints(&c).truncate(a.order());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn exp_turns_sums_into_products((mut a, mut b) in pair()) {
        a[0] = 0;
        b[0] = 0;
        let (a, b) = (ExactSeries::from_ints(&a), ExactSeries::from_ints(&b));
        prop_assert_eq!(a.add(&b).unwrap().exp().unwrap(), a.exp().unwrap().mul(&b.exp().unwrap()).unwrap());
    }

    #[test]
    fn fixed_point_truncates_coherently(b in class(), (n, m) in (2usize..=9).prop_flat_map(|n| (Just(n), 1..n))) {
        let sys = b.system();
        let full = fixed_point(&sys, n).unwrap();
        let short = fixed_point(&sys, m).unwrap();
        for v in &sys.vars {
            prop_assert_eq!(full.get(v).unwrap().truncate(m), short.get(v).unwrap().clone(), "{} {}", b, v);
        }
    }
}

/// Each builtin right-hand side, evaluated in floats on the exact solution,
/// reproduces the solution to relative error `2^-64`.
#[test]
fn builtin_systems_agree_in_float() {
    const N: usize = 30;
    let d = Domain::float(128);
    for b in BuiltinClass::all() {
        let sys = b.system();
        let sol = fixed_point(&sys, N).unwrap();
        let env: HashMap<String, TruncatedSeries<BigFloat>> =
            sol.as_map().into_iter().map(|(k, s)| (k, s.to_domain(d))).collect();
        let markers: HashMap<String, BigFloat> =
            sys.markers.iter().map(|(k, v)| (k.clone(), BigFloat::from_rational(v, &d))).collect();
        for (v, rhs) in sys.vars.iter().zip(&sys.rhs) {
            let got = evaluate(rhs, &env, &markers, N, d).unwrap();
            let want = sol.get(v).unwrap();
            for (n, (x, y)) in want.coeffs().iter().zip(got.coeffs()).enumerate() {
                let x = BigFloat::from_rational(x, &d);
                let err = x.sub(y).to_f64().abs();
                assert!(err <= 2f64.powi(-64) * x.to_f64().abs(), "{b} {v} [z^{n}]: {err:e}");
            }
        }
    }
}
