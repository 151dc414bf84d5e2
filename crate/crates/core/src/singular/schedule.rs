//! Growth constants along a schedule of truncation orders.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{char_solve_with, Model, NewtonOptions, Seed, SingularError, SingularPoint};
use crate::classes::{sp_network_system, BuiltinClass, ClassError, ClassName};
use crate::num::BigFloat;
use crate::solver::{fixed_point, freeze_tails, FunctionalSystem, SolveError};
use crate::spec::Flavor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Graphs,
    Networks,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Graphs => "graphs",
            Target::Networks => "networks",
        })
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "graphs" => Ok(Target::Graphs),
            "networks" => Ok(Target::Networks),
            _ => Err(format!("unknown target `{s}` (expected graphs or networks)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("schedule must be nonempty, strictly increasing and start at 1 or more")]
    BadSchedule,
    #[error("N = {n}: {source}")]
    Solve { n: usize, source: SolveError },
    #[error("N = {n}: {source}")]
    Singular { n: usize, source: SingularError },
}

/// System whose singularity gives the growth constant of `target`.
pub fn growth_system(name: ClassName, flavor: Flavor, target: Target) -> Result<FunctionalSystem, ClassError> {
    match (target, name) {
        (Target::Graphs, _) => Ok(BuiltinClass::new(name, flavor).system()),
        (Target::Networks, ClassName::Sp) => Ok(FunctionalSystem::new(sp_network_system(flavor))),
        (Target::Networks, _) => Err(ClassError::Unsupported {
            what: "network target",
            class: name,
            flavor,
            why: "networks are defined for series-parallel graphs only",
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub point: SingularPoint,
    pub seconds: f64,
}

impl GrowthRow {
    pub fn rho(&self) -> &BigFloat {
        &self.point.rho
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub bits: usize,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn last(&self) -> &GrowthRow {
        self.rows.last().expect("reports have at least one row")
    }

    pub fn final_gamma(&self) -> BigFloat {
        self.last().point.gamma()
    }

    pub fn seeds(&self) -> Vec<&Seed> {
        self.rows.iter().map(|r| &r.point.seed).collect()
    }
}

/// Row `N` solves the system to Taylor degree `N - 1`, freezes the Pólya
/// tails at that degree and solves the characteristic system, seeded by
/// the previous row.
pub fn refine_schedule(system: &FunctionalSystem, schedule: &[usize], bits: usize) -> Result<GrowthReport, ScheduleError> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ScheduleError::BadSchedule);
    }
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let start = Instant::now();
        let sol = fixed_point(system, n - 1).map_err(|source| ScheduleError::Solve { n, source })?;
        let frozen = freeze_tails(system, &sol).map_err(|source| ScheduleError::Solve { n, source })?;
        let singular = |source| ScheduleError::Singular { n, source };
        let model = Model::new(&frozen).map_err(singular)?;
        let init = rows.last().map(|r| (&r.point.tau[..], &r.point.rho));
        let point = char_solve_with(&model, init, NewtonOptions::new(bits)).map_err(singular)?;
        rows.push(GrowthRow { n, point, seconds: start.elapsed().as_secs_f64() });
    }
    Ok(GrowthReport { bits, rows })
}
