//! Ground truth for finite instances by plain enumeration, plus the seeded
//! instance generator and the fuzzer built on top of it.

mod fuzz;
mod generate;

pub use fuzz::{fuzz, Disagreement, FuzzConfig, FuzzSummary};
pub use generate::{
    generate_instance, AnchorMode, Instance, InstanceChecks, InstanceRecipe, MappingMode, MetricMode,
    GENERATOR_SLACK,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::{
    check_condition, CheckOptions, Coefficients, ConditionMaps, ContractionError, PairSource, ViolationReport,
};
use crate::mapping::{Arity, Mapping, MappingError, MappingSet, Role};
use crate::metric::{MetricError, MetricSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("the oracle only enumerates finite spaces")]
    NotFinite,
    #[error("at least one mapping is needed")]
    NoMappings,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Reduction(#[from] crate::reduction::ReductionError),
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("metric repair left d({0}, {1}) = {2}, not strictly positive")]
    RepairFailure(usize, usize, f64),
}

fn table_of(space: &MetricSpace, map: &Mapping, role: Role) -> Result<Vec<usize>, OracleError> {
    if space.as_finite().is_none() {
        return Err(OracleError::NotFinite);
    }
    map.check_total(space, role)?;
    Ok(map.table().expect("finite spaces carry table maps").to_vec())
}

/// `{x : map(x) = x}`, ascending.
pub fn enumerate_fixed_points(space: &MetricSpace, map: &Mapping) -> Result<Vec<usize>, OracleError> {
    let t = table_of(space, map, Role::S)?;
    Ok((0..t.len()).filter(|&x| t[x] == x).collect())
}

/// Points fixed by every map in `maps`.
pub fn enumerate_common_fixed_points(space: &MetricSpace, maps: &[&Mapping]) -> Result<Vec<usize>, OracleError> {
    let (first, rest) = maps.split_first().ok_or(OracleError::NoMappings)?;
    let tables = rest
        .iter()
        .map(|m| table_of(space, m, Role::T))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(enumerate_fixed_points(space, first)?
        .into_iter()
        .filter(|&x| tables.iter().all(|t| t[x] == x))
        .collect())
}

/// Solutions of one coincidence relation, e.g. `Sx = Tx = fx`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCoincidence {
    pub relation: String,
    pub points: Vec<usize>,
    /// Distinct common values, ascending.
    pub values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceOracle {
    pub relations: Vec<PairCoincidence>,
    /// Values shared by every relation: `fz` with `Sz = Tz = fz` for three
    /// maps, `w = Sz = fz = Tv = gv` for four maps.
    pub points_of_coincidence: Vec<usize>,
}

fn relation(name: &str, tables: &[&[usize]]) -> PairCoincidence {
    let value = tables[tables.len() - 1];
    let points: Vec<usize> = (0..value.len())
        .filter(|&x| tables.iter().all(|t| t[x] == value[x]))
        .collect();
    let mut values: Vec<usize> = points.iter().map(|&x| value[x]).collect();
    values.sort_unstable();
    values.dedup();
    PairCoincidence {
        relation: name.into(),
        points,
        values,
    }
}

/// All coincidence points and points of coincidence for the arity of
/// `maps`. With two maps this is `Sx = Tx` and the value `Sx`.
pub fn enumerate_coincidence(space: &MetricSpace, maps: &MappingSet) -> Result<CoincidenceOracle, OracleError> {
    let s = table_of(space, &maps.s, Role::S)?;
    let t = table_of(space, &maps.t, Role::T)?;
    let relations = match maps.arity {
        Arity::Two => vec![relation("Sx = Tx", &[&s, &t])],
        Arity::Three => {
            let f = table_of(space, maps.f()?, Role::F)?;
            vec![relation("Sx = Tx = fx", &[&s, &t, &f])]
        }
        Arity::Four => {
            let f = table_of(space, maps.f()?, Role::F)?;
            let g = table_of(space, maps.g()?, Role::G)?;
            vec![relation("Sx = fx", &[&s, &f]), relation("Tx = gx", &[&t, &g])]
        }
    };
    let points_of_coincidence = relations[0]
        .values
        .iter()
        .copied()
        .filter(|v| relations[1..].iter().all(|r| r.values.binary_search(v).is_ok()))
        .collect();
    Ok(CoincidenceOracle {
        relations,
        points_of_coincidence,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleFixedPoints {
    pub role: Role,
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub fixed_points: Vec<RoleFixedPoints>,
    /// Points fixed by all maps of the instance.
    pub common_fixed_points: Vec<usize>,
    pub coincidence: CoincidenceOracle,
    /// Exhaustive condition check, when coefficients were supplied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ViolationReport>,
}

/// Everything the oracle knows about a finite instance.
pub fn run_oracle(
    space: &MetricSpace,
    maps: &MappingSet,
    coefficients: Option<&Coefficients>,
    opts: CheckOptions,
) -> Result<OracleResult, OracleError> {
    let roles: &[Role] = match maps.arity {
        Arity::Two => &[Role::S, Role::T],
        Arity::Three => &[Role::S, Role::T, Role::F],
        Arity::Four => &[Role::S, Role::T, Role::F, Role::G],
    };
    let mut all = Vec::new();
    let mut fixed_points = Vec::new();
    for &role in roles {
        let m = maps.get(role).ok_or(MappingError::Missing {
            arity: maps.arity,
            role,
        })?;
        all.push(m);
        fixed_points.push(RoleFixedPoints {
            role,
            points: enumerate_fixed_points(space, m)?,
        });
    }
    let condition = match coefficients {
        Some(c) => Some(check_condition(
            space,
            &ConditionMaps::from_set(maps)?,
            c,
            &PairSource::Exhaustive,
            opts,
        )?),
        None => None,
    };
    Ok(OracleResult {
        fixed_points,
        common_fixed_points: enumerate_common_fixed_points(space, &all)?,
        coincidence: enumerate_coincidence(space, maps)?,
        condition,
    })
}
