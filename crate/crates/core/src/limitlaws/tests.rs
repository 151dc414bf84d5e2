use super::*;
use crate::classes::ClassName;

const BITS: usize = 256;

fn close(a: &BigFloat, b: f64, tol: f64) -> bool {
    (a.to_f64() - b).abs() <= tol
}

fn labelled(name: ClassName) -> BuiltinClass {
    BuiltinClass::new(name, Flavor::Labelled)
}

#[test]
fn tree_parameters() {
    let t = labelled(ClassName::Trees);
    for p in [Param::Edges, Param::Blocks] {
        let law = table2(&t, p, BITS).unwrap();
        assert!(close(&law.mu, 1.0, 1e-10) && close(&law.sigma2, 0.0, 1e-10), "{p}: {law:?}");
        assert_eq!(law.positivity, Positivity::ComputedZero);
    }
    let e = std::f64::consts::E;
    let law = table2(&t, Param::Cutvertices, BITS).unwrap();
    assert!(close(&law.mu, 1.0 - 1.0 / e, 1e-12));
    // leaves of a random labelled tree: variance n (e - 2)/e^2
    assert!(close(&law.sigma2, (e - 2.0) / (e * e), 1e-12));
}

#[test]
fn generic_clt_matches_closed_forms() {
    for name in ClassName::ALL {
        let b = labelled(name);
        for p in Param::ALL {
            let closed = table2(&b, p, BITS).unwrap();
            let generic = labelled_clt(&b, p, BITS).unwrap();
            let dmu = closed.mu.sub(&generic.mu).to_f64().abs();
            let ds = closed.sigma2.sub(&generic.sigma2).to_f64().abs();
            assert!(dmu < 1e-30 && ds < 1e-30, "{name} {p}: {closed:?} vs {generic:?}");
            assert!(closed.sigma2.to_f64() > -1e-12 && closed.mu.to_f64() >= 0.0);
        }
    }
}

#[test]
fn perturbation_agrees_with_the_formulas() {
    for (name, p) in [(ClassName::Cacti, Param::Edges), (ClassName::Outerplanar, Param::Blocks), (ClassName::Trees, Param::Cutvertices)] {
        let b = labelled(name);
        let generic = labelled_clt(&b, p, BITS).unwrap();
        let fd = perturbation_law(&b.parameter_spec(p).unwrap(), p, 20, BITS).unwrap();
        assert!(fd.mu.sub(&generic.mu).to_f64().abs() < 1e-9, "{name} {p}");
        assert!(fd.sigma2.sub(&generic.sigma2).to_f64().abs() < 1e-8, "{name} {p}");
    }
}

#[test]
fn unlabelled_tree_blocks_are_deterministic() {
    let b = BuiltinClass::new(ClassName::Trees, Flavor::Unlabelled);
    for p in [Param::Edges, Param::Blocks] {
        let law = builtin_law(&b, p, 20, BITS).unwrap();
        assert!(close(&law.mu, 1.0, 1e-9) && close(&law.sigma2, 0.0, 1e-8), "{p}: {law:?}");
    }
    let law = builtin_law(&b, Param::Cutvertices, 20, BITS).unwrap();
    assert!(law.sigma2.to_f64() > 1e-3);
}

#[test]
fn positivity_on_edge_supports() {
    let cacti = marked_system(&labelled(ClassName::Cacti), Param::Edges).unwrap();
    assert!(positivity_check(&support_triples(&cacti, ROOT, MARKER).unwrap()).is_certified());
    let trees = marked_system(&labelled(ClassName::Trees), Param::Edges).unwrap();
    assert_eq!(positivity_check(&support_triples(&trees, ROOT, MARKER).unwrap()), PositivityOutcome::Inconclusive);
    let law = table2(&labelled(ClassName::Cacti), Param::Edges, BITS).unwrap();
    assert_eq!(law.positivity, Positivity::CertifiedPositive);
    assert!(law.sigma2.to_f64() > 1e-8);
}

#[test]
fn mean_vector_reduces_to_the_scalar_formula() {
    for name in [ClassName::Trees, ClassName::Sp] {
        let b = labelled(name);
        let sys = marked_system(&b, Param::Edges).unwrap();
        let point = singular::char_solve(&sys, None, BITS).unwrap();
        let mv = mean_vector(&sys, &point, &[MARKER]).unwrap();
        let clt = clt_single(&sys, ROOT, &point, Param::Edges).unwrap();
        assert!(mv.mu[0].sub(&clt.mu).to_f64().abs() < 1e-8, "{name}: {:?} vs {:?}", mv.mu[0], clt.mu);
        assert_eq!(mv.b.len(), sys.len());
        if name == ClassName::Trees {
            assert!(mv.uniform);
        }
    }
}

#[test]
fn local_density_shape() {
    let d = Domain::float(BITS);
    let mu = BigFloat::from_f64(0.5, &d);
    let s2 = BigFloat::from_f64(0.25, &d);
    let peak = local_limit_density(&mu, &s2, 100, 50).unwrap();
    assert!((peak.to_f64() - 1.0 / (2.0 * std::f64::consts::PI * 25.0)).abs() < 1e-15);
    let a = local_limit_density(&mu, &s2, 100, 47).unwrap();
    let b = local_limit_density(&mu, &s2, 100, 53).unwrap();
    assert_eq!(a.to_decimal_string(40), b.to_decimal_string(40));
    assert!(local_limit_density(&mu, &BigFloat::zero(&d), 10, 1).is_err());
    let (mass, lattice) = density_mass(&mu, &s2, 100).unwrap();
    assert!((mass / lattice - 1.0).abs() < 1e-6);
}
