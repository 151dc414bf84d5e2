//! Spec-language source of the builtin systems.

use super::{ClassName, Param};
use crate::spec::{parse_expr, Expr, Flavor};

pub(super) fn block_var(name: ClassName) -> &'static str {
    match name {
        ClassName::Trees => "C",
        ClassName::Cacti | ClassName::Outerplanar => "B",
        ClassName::Sp => "J",
    }
}

fn set(flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::Labelled => "Exp",
        Flavor::Unlabelled => "PSet",
    }
}

/// Equations for the derived block series in the vertex variable `y`.
fn block_equations(name: ClassName, flavor: Flavor, y: &str) -> String {
    use ClassName::*;
    use Flavor::*;
    let u = format!("U = (1 + {y}*U)*(1 + {y}*U)*Geom({y} + {y}*{y}*U);");
    match (name, flavor) {
        (Trees, _) => format!("B = {y};"),
        (Cacti, Labelled) => format!("B = {y} + 1/2*{y}*{y}*Geom({y});"),
        (Cacti, Unlabelled) => format!(
            "B = {y} + 1/2*{y}*{y}*Geom({y}) + 1/2*(1 + {y})*Subst({y}, 2)*Geom(Subst({y}, 2));"
        ),
        (Outerplanar, Labelled) => format!("B = {y} + 1/2*{y}*{y}*U;\n  {u}"),
        (Outerplanar, Unlabelled) => {
            format!("B = 1/2*{y} + 1/2*{y}*{y}*U + 1/2*({y} + Subst({y}, 2))*Subst(U, 2);\n  {u}")
        }
        (Sp, Labelled) => format!(
            "J = {y} + 1/2*{y}*{y}*(1 + P)*(1 + P)*D + {y}*(2*Exp(S) - 2 - 2*S - 1/2*S*S) - {y}*S*P;\n  \
             D = 1 + S + P;\n  S = {y}*D*(1 + P);\n  P = 2*Exp(S) - S - 2;"
        ),
        (Sp, Unlabelled) => format!(
            "J = {y} + 1/2*{y}*{y}*(1 + P)*(1 + P)*D + 1/2*Subst({y}, 2)*(1 + Subst(P, 2))*Db \
             + {y}*(2*PSet(S) - 2 - 2*S - 1/2*S*S - 1/2*Subst(S, 2)) - {y}*S*P;\n  \
             D = 1 + S + P;\n  S = {y}*D*(1 + P);\n  P = 2*PSet(S) - S - 2;\n  \
             Db = 1 + Sb + Pb;\n  Sb = Subst(D, 2)*({y} + Subst({y}, 2)*(1 + Pb));\n  \
             Pb = 2*PSet(Sb)*Subst(PSet(1/2*(S - Sb)), 2) - Sb - 2;"
        ),
    }
}

fn class_source(name: &str, flavor: Flavor, markers: &[&str], body: &str) -> String {
    let mut out = format!("class {name} {flavor} {{\n");
    for m in markers {
        out.push_str(&format!("  marker {m};\n"));
    }
    out.push_str(&format!("  {body}\n  expose C;\n}}\n"));
    out
}

pub(super) fn rooted(name: ClassName, flavor: Flavor) -> String {
    let body = match name {
        ClassName::Trees => format!("C = z*{}(C);", set(flavor)),
        _ => format!("C = z*{}({});\n  {}", set(flavor), block_var(name), block_equations(name, flavor, "C")),
    };
    class_source(name.as_str(), flavor, &[], &body)
}

pub(super) fn blocks_in_z(name: ClassName) -> String {
    let eqs = block_equations(name, Flavor::Labelled, "z");
    let var = if name == ClassName::Trees { "B" } else { block_var(name) };
    format!("class {}_blocks labelled {{\n  {eqs}\n  expose {var};\n}}\n", name.as_str())
}

/// Edge-marked derived block equations; `None` where no closed form is
/// available.
fn edge_blocks(name: ClassName, flavor: Flavor) -> Option<String> {
    use ClassName::*;
    use Flavor::*;
    Some(match (name, flavor) {
        (Trees, _) => String::new(),
        (Cacti, Labelled) => "B = v*C + 1/2*v*v*v*C*C*Geom(v*C);".into(),
        (Cacti, Unlabelled) => "B = v*C + 1/2*v*v*v*C*C*Geom(v*C) \
                                + 1/2*(v + v*v*C)*Subst(v*C, 2)*Geom(Subst(v*C, 2));"
            .into(),
        (Outerplanar, Labelled) => "B = v*C + 1/2*v*C*C*U;\n  \
                                    U = v*v*(1 + C*U)*(1 + C*U)*Geom(v*C*(1 + C*U));"
            .into(),
        (Sp, Labelled) => "J = v*C + 1/2*C*C*(v + P)*(v + P)*D \
                           + C*((1 + v)*Exp(S) - 1 - v - (1 + v)*S - 1/2*S*S) - C*S*P;\n  \
                           D = v + S + P;\n  S = C*D*(v + P);\n  P = (1 + v)*Exp(S) - S - 1 - v;"
            .into(),
        (Outerplanar | Sp, Unlabelled) => return None,
    })
}

pub(super) fn parameter(name: ClassName, flavor: Flavor, param: Param) -> Option<String> {
    let s = set(flavor);
    let bv = block_var(name);
    let blocks = if name == ClassName::Trees { String::new() } else { block_equations(name, flavor, "C") };
    let body = match param {
        Param::Edges => {
            let eqs = edge_blocks(name, flavor)?;
            if name == ClassName::Trees {
                format!("C = z*{s}(v*C);")
            } else {
                format!("C = z*{s}({bv});\n  {eqs}")
            }
        }
        Param::Blocks => format!("C = z*{s}(v*{bv});\n  {blocks}"),
        Param::Cutvertices => format!("C = z*v*({s}({bv}) - 1) + z;\n  {blocks}"),
    };
    let title = format!("{}_{}", name.as_str(), param.as_str());
    Some(class_source(&title, flavor, &["v"], body.trim_end()))
}

pub(super) fn networks(flavor: Flavor) -> String {
    let s = set(flavor);
    let mut body = format!("D = 1 + S + P;\n  S = z*D*(1 + P);\n  P = 2*{s}(S) - S - 2;");
    if flavor == Flavor::Unlabelled {
        body.push_str(
            "\n  Db = 1 + Sb + Pb;\n  Sb = Subst(D, 2)*(z + z*z*(1 + Pb));\n  \
             Pb = 2*PSet(Sb)*Subst(PSet(1/2*(S - Sb)), 2) - Sb - 2;",
        );
    }
    format!("class sp_networks {flavor} {{\n  {body}\n  expose D;\n}}\n")
}

pub(super) fn expr_in_y(src: &str) -> Expr {
    parse_expr(src, Flavor::Labelled, &[]).unwrap_or_else(|e| panic!("{src}: {e}"))
}
