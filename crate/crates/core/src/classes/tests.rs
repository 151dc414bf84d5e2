use super::*;
use crate::num::Rational;
use crate::oracle::{enumerate, Connectivity};
use crate::solver::fixed_point;

const N: usize = 6;

fn int(v: u64) -> Rational {
    Rational::from(v)
}

fn solve_counts(spec: ClassSpec, var: &str, v: Option<i64>, n: usize) -> Vec<Rational> {
    let flavor = spec.flavor;
    let mut sys = FunctionalSystem::new(spec);
    if let Some(v) = v {
        sys = sys.with_marker("v", Rational::from(v));
    }
    let sol = fixed_point(&sys, n).unwrap();
    counts(sol.get(var).unwrap(), flavor)
}

#[test]
fn rooted_counts_match_oracle() {
    for b in BuiltinClass::all() {
        let got = solve_counts(b.spec(), ROOT, None, N);
        for n in 1..=N {
            let row = enumerate(b.name, n, Connectivity::Rooted).unwrap();
            let want = match b.flavor {
                Flavor::Labelled => row.labelled,
                Flavor::Unlabelled => row.unlabelled,
            };
            assert_eq!(got[n], int(want), "{b} rooted n = {n}");
        }
    }
}

#[test]
fn unrooted_counts_match_oracle() {
    for b in BuiltinClass::all() {
        let sol = fixed_point(&b.system(), N).unwrap();
        let u = match unroot(&b, &sol) {
            Ok(u) => u,
            Err(ClassError::Unsupported { .. }) => {
                assert!(!b.supports_unrooting());
                continue;
            }
            Err(e) => panic!("{b}: {e}"),
        };
        let conn = counts(&u.connected, b.flavor);
        let all = counts(&u.all, b.flavor);
        for n in 1..=N {
            for (k, got) in [(Connectivity::Connected, &conn), (Connectivity::All, &all)] {
                let row = enumerate(b.name, n, k).unwrap();
                let want = match b.flavor {
                    Flavor::Labelled => row.labelled,
                    Flavor::Unlabelled => row.unlabelled,
                };
                assert_eq!(got[n], int(want), "{b} {k} n = {n}");
            }
        }
    }
}

#[test]
fn labelled_block_series_count_biconnected_members() {
    for name in ClassName::ALL {
        let b = BuiltinClass::new(name, Flavor::Labelled);
        let spec = b.block_spec().unwrap();
        let var = spec.exposed[0].clone();
        let got = solve_counts(spec, &var, None, N - 1);
        for n in 2..=N {
            let row = enumerate(name, n, Connectivity::Biconnected).unwrap();
            assert_eq!(got[n - 1], int(row.labelled), "{name} n = {n}");
        }
    }
}

/// `Σ_m count(n, m) v^m` from a histogram of the rooted census.
fn weighted(h: &crate::oracle::Histogram, v: i64) -> Rational {
    h.iter().fold(Rational::ZERO, |acc, (&m, &c)| acc + Rational::from(c) * Rational::from(v.pow(m)))
}

#[test]
fn marked_systems_match_oracle_histograms() {
    for b in BuiltinClass::all() {
        for (param, hist) in [(Param::Edges, "edges"), (Param::Blocks, "blocks")] {
            let Ok(spec) = b.parameter_spec(param) else {
                assert!(b.flavor == Flavor::Unlabelled && param == Param::Edges);
                continue;
            };
            for v in [2, 3] {
                let got = solve_counts(spec.clone(), ROOT, Some(v), N);
                for n in 1..=N {
                    let row = enumerate(b.name, n, Connectivity::Rooted).unwrap();
                    let h = match b.flavor {
                        Flavor::Labelled => &row.histograms[hist],
                        Flavor::Unlabelled => &row.unlabelled_histograms[hist],
                    };
                    assert_eq!(got[n], weighted(h, v), "{b} {param} v = {v} n = {n}");
                }
            }
        }
    }
}

#[test]
fn marked_systems_reduce_at_v_one() {
    for b in BuiltinClass::all() {
        let plain = solve_counts(b.spec(), ROOT, None, N);
        for p in Param::ALL {
            if let Ok(spec) = b.parameter_spec(p) {
                assert_eq!(solve_counts(spec, ROOT, Some(1), N), plain, "{b} {p}");
            }
        }
    }
}

#[test]
fn network_series_match_network_census() {
    use crate::oracle::network_census;
    for flavor in [Flavor::Labelled, Flavor::Unlabelled] {
        let sol = fixed_point(&FunctionalSystem::new(sp_network_system(flavor)), 5).unwrap();
        let d = counts(sol.get("D").unwrap(), flavor);
        let s = counts(sol.get("S").unwrap(), flavor);
        let p = counts(sol.get("P").unwrap(), flavor);
        for n in 0..=5 {
            let c = network_census(n).unwrap();
            let (all, ser, par) = match flavor {
                Flavor::Labelled => (c.labelled, c.series_labelled, c.parallel_labelled),
                Flavor::Unlabelled => (c.unlabelled, c.series_unlabelled, c.parallel_unlabelled),
            };
            assert_eq!((&d[n], &s[n], &p[n]), (&int(all), &int(ser), &int(par)), "{flavor} n = {n}");
        }
    }
}

#[test]
fn unlabelled_rooted_sp_sequence() {
    let got = solve_counts(sp_connected_system(), ROOT, None, 7);
    let want: Vec<Rational> = [0u64, 1, 1, 3, 10, 44, 217, 1249].into_iter().map(int).collect();
    assert_eq!(got, want);
}

#[test]
fn sources_round_trip_and_docs_match() {
    for (file, src) in builtin_sources() {
        let parsed = parse(&src).unwrap();
        assert_eq!(parsed.to_source(), src, "{file}");
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/classes").join(&file);
        let on_disk = std::fs::read_to_string(&path).unwrap_or_default();
        assert_eq!(on_disk, src, "{} is stale; regenerate with `subcrit spec --emit docs/classes`", path.display());
    }
}

#[test]
fn degree_blocks_sum_to_block_series() {
    use crate::spec::expr;
    use crate::spec::evaluate;
    use std::collections::HashMap;
    for name in [ClassName::Trees, ClassName::Cacti] {
        let b = BuiltinClass::new(name, Flavor::Labelled);
        let terms = b.degree_blocks().unwrap();
        let total = expr::sum(terms);
        let y = crate::series::ExactSeries::atom(12, crate::num::Domain::Exact);
        let env: HashMap<String, _> = [("y".to_string(), y)].into();
        let got = evaluate(&total, &env, &HashMap::new(), 12, crate::num::Domain::Exact).unwrap();
        let spec = b.block_spec().unwrap();
        let var = spec.exposed[0].clone();
        let sol = fixed_point(&FunctionalSystem::new(spec), 12).unwrap();
        assert_eq!(&got, sol.get(&var).unwrap(), "{name}");
    }
}
