//! JSON problem files.
//!
//! ```json
//! {
//!   "space": { "flavor": "finite_explicit", "points": ["0", "1", "2", "4"],
//!              "metric": [[0, 1, 2, 4], [1, 0, 1, 3], [2, 1, 0, 2], [4, 3, 2, 0]] },
//!   "arity": 2,
//!   "mappings": { "S": [0, 0, 1, 2], "T": [0, 0, 1, 2] },
//!   "coefficients": { "alpha": 0, "beta": 0, "gamma": 0.5, "delta": 0, "L": 0 },
//!   "pair_source": "exhaustive",
//!   "solver": { "x0": 3, "max_iters": 10000, "tol": 1e-12 }
//! }
//! ```
//!
//! `points` is either a count or a list of labels, and `metric` a nested or
//! flat row-major table. Euclidean problems use
//! `{"flavor": "euclidean_affine", "dimension": m, "metric": "euclidean",
//! "complete": true}` and affine maps `{"matrix": [[..]], "offset": [..]}`.
//! Without `coefficients` the tool synthesizes them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::{Coefficients, PairSource};
use crate::mapping::{Arity, Mapping, MappingError, MappingSet, Role};
use crate::metric::{EuclideanSpace, FiniteSpace, MetricError, MetricSpace, Point};
use crate::solver::{SolveOptions, DEFAULT_MAX_ITERS};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("malformed problem file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid problem: {0}")]
    Schema(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlavorSpec {
    FiniteExplicit,
    EuclideanAffine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsSpec {
    Count(usize),
    Labels(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub flavor: FlavorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PointsSpec>,
    pub metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingsSpec {
    #[serde(rename = "S")]
    pub s: Mapping,
    #[serde(rename = "T")]
    pub t: Mapping,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Mapping>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Mapping>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// Assumptions the tool cannot check and takes on trust.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assumptions {
    /// The range subspace (`SX`, `TX`, `fX`) is complete. Finite ranges
    /// always are; `false` makes the solve commands refuse to run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete_subspace: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub space: SpaceSpec,
    pub arity: Arity,
    pub mappings: MappingsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_source: Option<PairSource>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub assumptions: Assumptions,
}

/// A problem file turned into domain values.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub space: MetricSpace,
    pub maps: MappingSet,
    pub coefficients: Option<Coefficients>,
    pub pair_source: PairSource,
    pub x0: Point,
    pub solve: SolveOptions,
    pub assumptions: Assumptions,
}

impl Problem {
    /// Whether every declared completeness assumption holds.
    pub fn assumptions_hold(&self) -> bool {
        self.space.is_complete() && self.assumptions.complete_subspace != Some(false)
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// Describes an existing space, maps and coefficients as a file.
    pub fn from_parts(space: &MetricSpace, maps: &MappingSet, coefficients: Option<Coefficients>) -> Self {
        let space = match space {
            MetricSpace::Finite(s) => SpaceSpec {
                flavor: FlavorSpec::FiniteExplicit,
                points: Some(match s.labels() {
                    Some(l) => PointsSpec::Labels(l.to_vec()),
                    None => PointsSpec::Count(s.len()),
                }),
                metric: MetricSpec::Rows(s.rows()),
                dimension: None,
                complete: None,
            },
            MetricSpace::Euclidean(e) => SpaceSpec {
                flavor: FlavorSpec::EuclideanAffine,
                points: None,
                metric: MetricSpec::Named("euclidean".into()),
                dimension: Some(e.dimension()),
                complete: Some(e.is_complete()),
            },
        };
        ProblemFile {
            space,
            arity: maps.arity,
            mappings: MappingsSpec {
                s: maps.s.clone(),
                t: maps.t.clone(),
                f: maps.f.clone(),
                g: maps.g.clone(),
            },
            coefficients,
            pair_source: None,
            solver: SolverSpec::default(),
            assumptions: Assumptions::default(),
        }
    }

    pub fn build(&self) -> Result<Problem, ProblemError> {
        let space = self.build_space()?;
        let m = &self.mappings;
        let maps = match self.arity {
            Arity::Two => {
                reject_extra(m.f.as_ref(), Role::F, self.arity)?;
                reject_extra(m.g.as_ref(), Role::G, self.arity)?;
                MappingSet::two(m.s.clone(), m.t.clone())
            }
            Arity::Three => {
                reject_extra(m.g.as_ref(), Role::G, self.arity)?;
                MappingSet::three(m.s.clone(), m.t.clone(), required(m.f.as_ref(), Role::F, self.arity)?)
            }
            Arity::Four => MappingSet::four(
                m.s.clone(),
                m.t.clone(),
                required(m.f.as_ref(), Role::F, self.arity)?,
                required(m.g.as_ref(), Role::G, self.arity)?,
            ),
        };
        maps.validate(&space)?;
        let x0 = match &self.solver.x0 {
            Some(p) => p.clone(),
            None => match &space {
                MetricSpace::Finite(_) => Point::Index(0),
                MetricSpace::Euclidean(e) => Point::Vector(vec![0.0; e.dimension()]),
            },
        };
        space.contains(&x0)?;
        if let Some(tol) = self.solver.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(ProblemError::Schema(format!("solver.tol must be positive, got {tol}")));
            }
        }
        if let (MetricSpace::Euclidean(_), Some(PairSource::Exhaustive)) = (&space, &self.pair_source) {
            return Err(ProblemError::Schema(
                "pair_source \"exhaustive\" needs a finite space".into(),
            ));
        }
        let pair_source = self.pair_source.clone().unwrap_or_else(|| PairSource::default_for(&space));
        Ok(Problem {
            space,
            maps,
            coefficients: self.coefficients,
            pair_source,
            x0,
            solve: SolveOptions {
                max_iters: self.solver.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
                tol: self.solver.tol,
            },
            assumptions: self.assumptions.clone(),
        })
    }

    fn build_space(&self) -> Result<MetricSpace, ProblemError> {
        let s = &self.space;
        match s.flavor {
            FlavorSpec::FiniteExplicit => {
                if s.complete == Some(false) {
                    return Err(ProblemError::Schema("finite spaces are always complete".into()));
                }
                let space = match &s.metric {
                    MetricSpec::Rows(rows) => FiniteSpace::new(rows.clone())?,
                    MetricSpec::Flat(flat) => {
                        let n = match &s.points {
                            Some(PointsSpec::Count(n)) => *n,
                            Some(PointsSpec::Labels(l)) => l.len(),
                            None => (flat.len() as f64).sqrt().round() as usize,
                        };
                        FiniteSpace::from_flat(n, flat.clone())?
                    }
                    MetricSpec::Named(name) => {
                        return Err(ProblemError::Schema(format!(
                            "finite spaces need an explicit distance table, got \"{name}\""
                        )))
                    }
                };
                let space = match &s.points {
                    Some(PointsSpec::Labels(l)) => space.with_labels(l.clone())?,
                    Some(PointsSpec::Count(n)) if *n != space.len() => {
                        return Err(ProblemError::Schema(format!(
                            "space.points says {n} points but the table has {}",
                            space.len()
                        )))
                    }
                    _ => space,
                };
                Ok(space.into())
            }
            FlavorSpec::EuclideanAffine => {
                match &s.metric {
                    MetricSpec::Named(name) if name == "euclidean" => {}
                    _ => return Err(ProblemError::Schema("euclidean_affine spaces take metric \"euclidean\"".into())),
                }
                let dim = s
                    .dimension
                    .ok_or_else(|| ProblemError::Schema("euclidean_affine spaces need space.dimension".into()))?;
                Ok(EuclideanSpace::new(dim)?.with_completeness(s.complete.unwrap_or(true)).into())
            }
        }
    }
}

fn required(m: Option<&Mapping>, role: Role, arity: Arity) -> Result<Mapping, ProblemError> {
    m.cloned().ok_or(ProblemError::Mapping(MappingError::Missing { arity, role }))
}

fn reject_extra(m: Option<&Mapping>, role: Role, arity: Arity) -> Result<(), ProblemError> {
    match m {
        Some(_) => Err(ProblemError::Schema(format!("mapping {role} given for a problem with {arity} mappings"))),
        None => Ok(()),
    }
}
