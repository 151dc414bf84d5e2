use super::*;
use crate::classes::{sp_network_system, BuiltinClass, ClassName};
use crate::series::ExactSeries;
use crate::solver::{fixed_point, freeze_tails};
use crate::spec::{parse, Flavor};

fn sys(src: &str) -> FunctionalSystem {
    FunctionalSystem::new(parse(src).unwrap())
}

fn frozen(system: &FunctionalSystem, n: usize) -> FunctionalSystem {
    freeze_tails(system, &fixed_point(system, n).unwrap()).unwrap()
}

fn digits(x: &BigFloat, n: usize) -> String {
    x.to_decimal_string(n)
}

#[test]
fn labelled_rooted_trees_hit_one_over_e() {
    let p = char_solve(&sys("class T labelled { C = z*Exp(C); }"), None, 256).unwrap();
    let d = Domain::float(256);
    let e_inv = BigFloat::one(&d).neg().exp();
    assert!(p.rho.sub(&e_inv).abs().to_f64() < 1e-70, "{}", p.rho);
    assert!(p.tau[0].sub(&BigFloat::one(&d)).abs().to_f64() < 1e-70);
    assert!(p.residual <= p.newton_tol);
    assert!(p.jac_spectral_ok);
    assert!(p.seed.z < 0.3679 && p.seed.z > 0.36);
}

#[test]
fn table_four_small_rows() {
    let system = FunctionalSystem::new(sp_network_system(Flavor::Unlabelled));
    let report = refine_schedule(&system, &[5, 10], 256).unwrap();
    assert_eq!(digits(report.rows[0].rho(), 20), "0.12421863192426192376");
    assert_eq!(digits(report.rows[1].rho(), 20), "0.12419919715484630978");
}

#[test]
fn pole_exchanging_networks_are_singular_later() {
    let f = frozen(&FunctionalSystem::new(sp_network_system(Flavor::Unlabelled)), 20);
    let pf = char_solve(&f.restrict(&["D", "S", "P"]).unwrap(), None, 128).unwrap();
    let pe = char_solve(&f.restrict(&["Db", "Sb", "Pb"]).unwrap(), None, 128).unwrap();
    assert!(pe.rho > pf.rho, "{} vs {}", pe.rho, pf.rho);
    assert!(f.restrict(&["S"]).is_err());
}

#[test]
fn cacti_single_equation_reduction() {
    // C = z exp(B'(C)) is singular where C B''(C) = 1
    let b = BuiltinClass::new(ClassName::Cacti, Flavor::Labelled);
    let p = char_solve(&b.system(), None, 192).unwrap();
    let t = p.get("C").unwrap().to_f64();
    let b2 = 1.0 + (2.0 * t - t * t) / (2.0 * (1.0 - t) * (1.0 - t));
    assert!((t * b2 - 1.0).abs() < 1e-14);
    assert!((p.gamma().to_f64() - 4.18865).abs() < 1e-5);
}

#[test]
fn unfrozen_systems_are_rejected() {
    let s = sys("class T unlabelled { C = z*PSet(C); }");
    assert_eq!(char_solve(&s, None, 128).unwrap_err(), SingularError::NotFrozen);
}

#[test]
fn schedules_seed_from_previous_rows() {
    let s = sys("class T labelled { C = z*Exp(C); }");
    let r = refine_schedule(&s, &[1, 3, 8], 128).unwrap();
    for row in &r.rows {
        assert!((row.rho().to_f64() - (-1f64).exp()).abs() < 1e-15);
    }
    assert!((r.rows[1].point.seed.z - (-1f64).exp()).abs() < 1e-15);
    assert!(matches!(refine_schedule(&s, &[3, 3], 128), Err(ScheduleError::BadSchedule)));
    assert!(matches!(refine_schedule(&s, &[], 128), Err(ScheduleError::BadSchedule)));
}

#[test]
fn geometric_fit_has_zero_exponent() {
    let mut c = vec![1i64];
    for _ in 0..40 {
        c.push(c.last().unwrap() * 2);
    }
    let fit = asymptotic_fit(&ExactSeries::from_ints(&c), 2.0, 0.0).unwrap();
    assert!(fit.exponent.abs() < 0.05);
    assert!((fit.c_estimate - 1.0).abs() < 1e-12 && fit.fluctuation < 1e-12);
    assert!(matches!(asymptotic_fit(&ExactSeries::from_ints(&c[..10]), 2.0, 0.0), Err(FitError::TooFew(9))));
}

#[test]
fn rooted_tree_fit_has_square_root_exponent() {
    let b = BuiltinClass::new(ClassName::Trees, Flavor::Unlabelled);
    let report = refine_schedule(&b.system(), &[61], 128).unwrap();
    let sol = fixed_point(&b.system(), 60).unwrap();
    let fit = asymptotic_fit(sol.get("C").unwrap(), report.final_gamma().to_f64(), -1.5).unwrap();
    assert!((fit.exponent + 1.5).abs() < 0.2, "{}", fit.exponent);
    assert!((report.final_gamma().to_f64() - 2.95576).abs() < 1e-4);
}

#[test]
fn subcriticality_diagnostics() {
    let cases = [
        (ClassName::Trees, Flavor::Labelled),
        (ClassName::Cacti, Flavor::Labelled),
        (ClassName::Sp, Flavor::Unlabelled),
    ];
    for (name, flavor) in cases {
        let b = BuiltinClass::new(name, flavor);
        let sol = fixed_point(&b.system(), 30).unwrap();
        let point = char_solve(&freeze_tails(&b.system(), &sol).unwrap(), None, 128).unwrap();
        let s = subcriticality_check(&b, &sol, &point).unwrap();
        assert!(s.subcritical, "{s:?}");
        match name {
            ClassName::Trees => assert!(s.eta.is_infinite()),
            ClassName::Cacti => assert!((s.eta - 1.0).abs() < 1e-6),
            _ => assert!(s.margin > 0.0 && s.tail_margin.unwrap() > 0.0),
        }
    }
}
