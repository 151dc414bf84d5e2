use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use subcrit::acceptance::{run_criterion, CriterionResult};
use subcrit::classes::{builtin_sources, counts, unroot, BuiltinClass, ClassError, ROOT};
use subcrit::degrees::{degree_clt, degree_gf, DegreeError};
use subcrit::limitlaws::{builtin_law, LawError, UNLABELLED_ORDER};
use subcrit::oracle::{enumerate, CensusCache, CensusRow};
use subcrit::singular::{char_solve, growth_system, refine_schedule, Target};
use subcrit::solver::{fixed_point, FunctionalSystem};
use subcrit::spec::parse;
use subcrit::{ClassSpec, Field, Flavor};

use crate::output::{float, Output};
use crate::{ClassArgs, Cli, Command, Failure, Kind};

type Outcome<T> = Result<T, Failure>;

fn compute(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

fn class_error(e: ClassError) -> Failure {
    match e {
        ClassError::Unsupported { .. } => Failure::Usage(e.to_string()),
        other => compute(other),
    }
}

fn law_error(e: LawError) -> Failure {
    match e {
        LawError::NotLabelled(_) => Failure::Usage(e.to_string()),
        LawError::Class(c) => class_error(c),
        other => compute(other),
    }
}

fn degree_error(e: DegreeError) -> Failure {
    match e {
        DegreeError::NoDegreeSeries(_) | DegreeError::BadCap { .. } => Failure::Usage(e.to_string()),
        DegreeError::Law(l) => law_error(l),
        DegreeError::Class(c) => class_error(c),
        other => compute(other),
    }
}

fn read_spec(path: &Path) -> Outcome<ClassSpec> {
    let src = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let spec = parse(&src).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    spec.validate().map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(spec)
}

/// The class a command runs on: a builtin, or a user spec with the
/// variable to report.
enum Source {
    Builtin(BuiltinClass),
    User { spec: ClassSpec, var: String },
}

fn source(args: &ClassArgs) -> Outcome<Source> {
    match (&args.spec, args.class) {
        (Some(path), _) => {
            let spec = read_spec(path)?;
            let var = match &args.var {
                Some(v) => v.clone(),
                None => spec.exposed.first().cloned().or_else(|| spec.vars().first().cloned()).unwrap_or_default(),
            };
            if spec.index_of(&var).is_none() {
                return Err(Failure::Usage(format!("{var} is not defined in {}", path.display())));
            }
            Ok(Source::User { spec, var })
        }
        (None, Some(name)) => Ok(Source::Builtin(BuiltinClass::new(name, args.flavor))),
        (None, None) => Err(Failure::Usage("give --class or --spec".into())),
    }
}

fn describe(out: &mut Output, src: &Source) {
    match src {
        Source::Builtin(b) => {
            out.meta("class", b.name.as_str()).meta("flavor", b.flavor.to_string());
        }
        Source::User { spec, var } => {
            out.meta("class", spec.name.clone()).meta("flavor", spec.flavor.to_string()).meta("variable", var.clone());
        }
    }
}

pub fn run(cli: &Cli) -> Outcome<()> {
    let bits = cli.prec as usize;
    let mut failure = None;
    let text = match &cli.command {
        Command::Coeffs { class, kind, n } => coeffs(class, *kind, *n as usize)?.render(cli.format),
        Command::Growth { class, target, n, schedule } => {
            let schedule = match (schedule, n) {
                (Some(s), _) => s.clone(),
                (None, Some(n)) => vec![*n as usize],
                (None, None) => vec![50],
            };
            growth(class, *target, &schedule, bits)?.render(cli.format)
        }
        Command::Limitlaw { class, flavor, param, n } => {
            let b = BuiltinClass::new(*class, *flavor);
            let order = n.map_or(UNLABELLED_ORDER, |n| n as usize);
            let law = builtin_law(&b, *param, order, bits).map_err(law_error)?;
            let mut out = Output::new("limitlaw", vec!["mu", "sigma2", "positivity", "source"]);
            out.meta("class", b.name.as_str()).meta("flavor", b.flavor.to_string()).meta("param", param.as_str());
            out.meta("N", law.order.map_or(Value::Null, Value::from)).meta("precision_bits", bits);
            out.rows.push(vec![
                float(&law.mu, bits),
                float(&law.sigma2, bits),
                law.positivity.to_string().into(),
                law.source.to_string().into(),
            ]);
            out.render(cli.format)
        }
        Command::Degree { class, flavor, cap, k } => degree(BuiltinClass::new(*class, *flavor), *cap, *k, bits)?.render(cli.format),
        Command::Oracle { class, n, kind, cache_dir, no_cache } => {
            let row = if *no_cache {
                enumerate(*class, *n, *kind).map_err(|e| Failure::Usage(e.to_string()))?
            } else {
                let cache = CensusCache::from_env(cache_dir.clone());
                cache.census(*class, *n, *kind).map_err(|e| Failure::Usage(e.to_string()))?
            };
            oracle(&row).render(cli.format)
        }
        Command::Check { ids, allow_known } => {
            let (text, f) = check(ids, *allow_known, cli.format)?;
            failure = f;
            text
        }
        Command::Spec { class, flavor, spec, emit } => spec_cmd(*class, *flavor, spec.as_deref(), emit.as_deref())?,
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| compute(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    failure.map_or(Ok(()), Err)
}

fn coeffs(args: &ClassArgs, kind: Kind, n: usize) -> Outcome<Output> {
    let src = source(args)?;
    let (series, flavor) = match &src {
        Source::Builtin(b) => {
            let sol = fixed_point(&b.system(), n).map_err(compute)?;
            let s = match kind {
                Kind::Rooted => sol.get(ROOT).expect("root variable").clone(),
                Kind::Connected | Kind::All => {
                    let u = unroot(b, &sol).map_err(class_error)?;
                    if kind == Kind::Connected {
                        u.connected
                    } else {
                        u.all
                    }
                }
            };
            (s, b.flavor)
        }
        Source::User { spec, var } => {
            if kind != Kind::Rooted {
                return Err(Failure::Usage("--kind connected/all needs a builtin class".into()));
            }
            let sol = fixed_point(&FunctionalSystem::new(spec.clone()), n).map_err(compute)?;
            (sol.get(var).expect("checked variable").clone(), spec.flavor)
        }
    };
    let mut out = Output::new("coeffs", vec!["n", "coefficient", "count"]);
    describe(&mut out, &src);
    out.meta("kind", format!("{kind:?}").to_lowercase()).meta("N", n);
    let c = counts(&series, flavor);
    for i in 0..=n {
        out.rows.push(vec![i.into(), series.coeff(i).to_string().into(), c[i].to_string().into()]);
    }
    Ok(out)
}

fn growth(args: &ClassArgs, target: Target, schedule: &[usize], bits: usize) -> Outcome<Output> {
    let src = source(args)?;
    let sys = match &src {
        Source::Builtin(b) => growth_system(b.name, b.flavor, target).map_err(class_error)?,
        Source::User { spec, .. } => FunctionalSystem::new(spec.clone()),
    };
    let report = refine_schedule(&sys, schedule, bits).map_err(compute)?;
    let mut out = Output::new(
        "growth",
        vec!["N", "rho", "gamma", "residual", "newton_tol", "iterations", "perron", "spectral_ok", "seed_z"],
    );
    describe(&mut out, &src);
    out.meta("target", target.to_string()).meta("precision_bits", bits);
    for row in &report.rows {
        let p = &row.point;
        out.rows.push(vec![
            row.n.into(),
            float(&p.rho, bits),
            float(&p.gamma(), bits),
            Value::String(format!("{:e}", p.residual.to_f64())),
            Value::String(format!("{:e}", p.newton_tol.to_f64())),
            p.iterations.into(),
            Value::String(format!("{:.9}", p.perron)),
            p.jac_spectral_ok.into(),
            Value::String(format!("{:.9}", p.seed.z)),
        ]);
    }
    Ok(out)
}

fn degree(b: BuiltinClass, cap: u32, k: Option<u32>, bits: usize) -> Outcome<Output> {
    if b.flavor != Flavor::Labelled {
        return Err(Failure::Usage(format!("degree distributions are available for labelled classes only, not {b}")));
    }
    let point = char_solve(&b.system(), None, bits).map_err(compute)?;
    let dist = degree_gf(&b, &point, cap).map_err(degree_error)?;
    let mut out = Output::new("degree", vec!["k", "d_k"]);
    out.meta("class", b.name.as_str()).meta("flavor", b.flavor.to_string());
    out.meta("K", cap).meta("precision_bits", bits).meta("mass", float(&dist.mass, bits));
    if let Some(k) = k {
        let law = degree_clt(&b, k, cap.max(k), bits).map_err(degree_error)?;
        out.meta("clt_k", k).meta("mu_k", float(&law.law.mu, bits)).meta("sigma2_k", float(&law.law.sigma2, bits));
        out.meta("positivity_k", law.law.positivity.to_string());
    }
    for (i, d) in dist.d.iter().enumerate() {
        out.rows.push(vec![(i + 1).into(), float(d, bits)]);
    }
    Ok(out)
}

fn oracle(row: &CensusRow) -> Output {
    let mut out = Output::new("oracle", vec!["flavor", "parameter", "value", "count"]);
    out.meta("class", row.class.as_str()).meta("connectivity", row.connectivity.as_str()).meta("n", row.n);
    out.meta("labelled", row.labelled).meta("unlabelled", row.unlabelled);
    for (flavor, hists) in [("labelled", &row.histograms), ("unlabelled", &row.unlabelled_histograms)] {
        for (name, h) in hists {
            for (v, c) in h {
                out.rows.push(vec![flavor.into(), name.clone().into(), (*v).into(), (*c).into()]);
            }
        }
    }
    out
}

fn check(ids: &[u8], allow_known: bool, format: crate::Format) -> Outcome<(String, Option<Failure>)> {
    let ids: Vec<u8> = if ids.is_empty() { (1..=10).collect() } else { ids.to_vec() };
    let mut results: Vec<CriterionResult> = Vec::new();
    for &id in &ids {
        let r = run_criterion(id).ok_or_else(|| Failure::Usage(format!("no criterion {id} (expected 1 to 10)")))?;
        if format == crate::Format::Text {
            eprintln!("{r}");
        }
        results.push(r);
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    let unexpected = results.iter().filter(|r| !r.unexpected_failures().is_empty()).count();
    let text = match format {
        crate::Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({"schema_version": crate::output::SCHEMA_VERSION, "command": "check", "criteria": results}))
                .expect("results serialize");
            s.push('\n');
            s
        }
        _ => {
            let mut out = Output::new("check", vec!["id", "status", "name", "seconds", "failures"]);
            for r in &results {
                let fails: Vec<String> = r
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{}{}", c.what, if c.known_failure.is_some() { " (known)" } else { "" }))
                    .collect();
                let status = if r.passed() { "PASS" } else { "FAIL" };
                out.rows.push(vec![r.id.into(), status.into(), r.name.into(), format!("{:.1}", r.seconds).into(), fails.join("; ").into()]);
            }
            out.render(format)
        }
    };
    let failure = if unexpected > 0 || (failed > 0 && !allow_known) {
        Some(Failure::Acceptance(format!("{failed} of {} criteria failed ({unexpected} unexpectedly)", results.len())))
    } else {
        None
    };
    Ok((text, failure))
}

fn spec_cmd(class: Option<subcrit::classes::ClassName>, flavor: Flavor, spec: Option<&Path>, emit: Option<&Path>) -> Outcome<String> {
    if let Some(dir) = emit {
        fs::create_dir_all(dir).map_err(|e| compute(format!("{}: {e}", dir.display())))?;
        let mut listing = String::new();
        for (name, src) in builtin_sources() {
            let path = dir.join(&name);
            fs::write(&path, src).map_err(|e| compute(format!("{}: {e}", path.display())))?;
            listing.push_str(&format!("{}\n", path.display()));
        }
        return Ok(listing);
    }
    if let Some(path) = spec {
        return Ok(read_spec(path)?.to_source());
    }
    match class {
        Some(name) => Ok(BuiltinClass::new(name, flavor).spec().to_source()),
        None => Err(Failure::Usage("give --class, --spec or --emit".into())),
    }
}
