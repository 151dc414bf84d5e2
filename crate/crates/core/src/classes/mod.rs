//! Builtin classes: forests, cacti, outerplanar and series-parallel graphs.
//!
//! Every class is given by its rooted-connected system with the rooted
//! variable `C` (`C = z Exp(B'(C))`, or `z PSet(...)` unlabelled) and the
//! derived block series in a separate variable where it is not `C` itself.

mod source;
mod unroot;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::oracle::census::ClassName;
use crate::series::SeriesError;
use crate::solver::{FunctionalSystem, SolveError};
use crate::spec::{parse, ClassSpec, Expr, Flavor, SpecError};
pub use unroot::{counts, unroot, Unrooted};

/// Name of the rooted-connected variable in every builtin system.
pub const ROOT: &str = "C";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Edges,
    Blocks,
    Cutvertices,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::Edges, Param::Blocks, Param::Cutvertices];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::Edges => "edges",
            Param::Blocks => "blocks",
            Param::Cutvertices => "cutvertices",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edges" => Ok(Param::Edges),
            "blocks" => Ok(Param::Blocks),
            "cutvertices" | "cut-vertices" => Ok(Param::Cutvertices),
            _ => Err(format!("unknown parameter `{s}` (expected edges, blocks or cutvertices)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassError {
    #[error("{what} is not available for {class} ({flavor}): {why}")]
    Unsupported { what: &'static str, class: ClassName, flavor: Flavor, why: &'static str },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("builtin source failed to parse: {0}")]
    Spec(#[from] SpecError),
}

/// A builtin class in one flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BuiltinClass {
    pub name: ClassName,
    pub flavor: Flavor,
}

impl BuiltinClass {
    pub fn new(name: ClassName, flavor: Flavor) -> Self {
        BuiltinClass { name, flavor }
    }

    pub fn all() -> impl Iterator<Item = BuiltinClass> {
        [Flavor::Labelled, Flavor::Unlabelled]
            .into_iter()
            .flat_map(|f| ClassName::ALL.into_iter().map(move |c| BuiltinClass::new(c, f)))
    }

    /// Rooted-connected system; its `C` solves to the vertex-rooted series.
    pub fn spec(&self) -> ClassSpec {
        parse_builtin(&source::rooted(self.name, self.flavor))
    }

    pub fn system(&self) -> FunctionalSystem {
        FunctionalSystem::new(self.spec())
    }

    /// Variable holding the derived block series `B'(C)`.
    pub fn block_var(&self) -> &'static str {
        source::block_var(self.name)
    }

    /// Rooted system with marker `v` counting `param`.
    pub fn parameter_spec(&self, param: Param) -> Result<ClassSpec, ClassError> {
        match source::parameter(self.name, self.flavor, param) {
            Some(src) => Ok(parse_builtin(&src)),
            None => Err(ClassError::Unsupported {
                what: "edge-marked system",
                class: self.name,
                flavor: self.flavor,
                why: "the unlabelled edge-marked block cycle index is not known in closed form",
            }),
        }
    }

    /// Labelled derived block series with the vertex variable replaced by
    /// the atom, so that `(n-1)! [z^(n-1)]` counts 2-connected members on
    /// `n` vertices.
    pub fn block_spec(&self) -> Result<ClassSpec, ClassError> {
        match self.flavor {
            Flavor::Labelled => Ok(parse_builtin(&source::blocks_in_z(self.name))),
            Flavor::Unlabelled => Err(ClassError::Unsupported {
                what: "block series",
                class: self.name,
                flavor: self.flavor,
                why: "only the cycle-index specialisation is used unlabelled",
            }),
        }
    }

    pub fn supports_unrooting(&self) -> bool {
        self.flavor == Flavor::Labelled || matches!(self.name, ClassName::Trees | ClassName::Cacti)
    }

    /// Coefficients of `w^j` in the root-degree-marked derived block series,
    /// as expressions in the variable `y`; index 0 holds `w^1`.
    pub fn degree_blocks(&self) -> Option<Vec<Expr>> {
        if self.flavor != Flavor::Labelled {
            return None;
        }
        let terms: &[&str] = match self.name {
            ClassName::Trees => &["y"],
            ClassName::Cacti => &["y", "1/2*y*y*Geom(y)"],
            _ => return None,
        };
        Some(terms.iter().map(|t| source::expr_in_y(t)).collect())
    }
}

impl fmt::Display for BuiltinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name, self.flavor)
    }
}

fn parse_builtin(src: &str) -> ClassSpec {
    parse(src).unwrap_or_else(|e| panic!("builtin source is malformed: {e}\n{src}"))
}

/// Free-standing series-parallel networks, with the atom marking internal
/// vertices: `{D, S, P}` pole-fixing, plus `{Db, Sb, Pb}` pole-exchanging
/// in the unlabelled flavor.
pub fn sp_network_system(flavor: Flavor) -> ClassSpec {
    parse_builtin(&source::networks(flavor))
}

/// Connected unlabelled series-parallel graphs rooted at a vertex.
pub fn sp_connected_system() -> ClassSpec {
    BuiltinClass::new(ClassName::Sp, Flavor::Unlabelled).spec()
}

pub fn builtin(name: ClassName, flavor: Flavor) -> ClassSpec {
    BuiltinClass::new(name, flavor).spec()
}

/// Source text of every builtin, one file per class and flavor.
pub fn builtin_sources() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> =
        BuiltinClass::all().map(|b| (format!("{}-{}.spec", b.name, b.flavor), b.spec().to_source())).collect();
    for f in [Flavor::Labelled, Flavor::Unlabelled] {
        out.push((format!("sp-networks-{f}.spec"), sp_network_system(f).to_source()));
    }
    out
}

#[cfg(test)]
mod tests;
