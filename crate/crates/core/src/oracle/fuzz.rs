//! Seeded fuzzing of the solvers against the enumeration oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generate::{generate_instance, AnchorMode, Instance, InstanceRecipe, MappingMode, MetricMode};
use super::{enumerate_common_fixed_points, OracleError};
use crate::mapping::{Arity, Mapping, Role};
use crate::metric::{MetricSpace, Point};
use crate::par::{map_indices, Execution};
use crate::reduction::{solve_four, solve_three, Outcome, ReductionOptions};
use crate::solver::{picard_solve, SolveOptions, SolveReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub instances: usize,
    /// Inclusive range of universe sizes.
    pub n_range: [usize; 2],
    /// `None` cycles through two, three and four maps.
    pub arity: Option<Arity>,
    pub mapping: MappingMode,
    pub anchors: AnchorMode,
    /// `None` alternates between random tables and embeddings.
    pub metric: Option<MetricMode>,
    pub factor_range: [f64; 2],
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 100,
            n_range: [2, 64],
            arity: None,
            mapping: MappingMode::ContractionTowardAnchor,
            anchors: AnchorMode::Independent,
            metric: None,
            factor_range: [0.25, 0.9],
            execution: Execution::default(),
        }
    }
}

impl FuzzConfig {
    /// The recipe of instance `i`; depends only on the config seed and `i`.
    pub fn recipe(&self, i: usize) -> InstanceRecipe {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        let [lo, hi] = self.n_range;
        let n = rng.random_range(lo..=hi.max(lo));
        let [flo, fhi] = self.factor_range;
        let factor = if fhi > flo { rng.random_range(flo..fhi) } else { flo };
        let arity = self.arity.unwrap_or(match i % 3 {
            0 => Arity::Two,
            1 => Arity::Three,
            _ => Arity::Four,
        });
        let metric = self.metric.unwrap_or(if i.is_multiple_of(2) {
            MetricMode::RandomTable
        } else {
            MetricMode::Embedding {
                dimension: rng.random_range(1..=4),
            }
        });
        InstanceRecipe {
            seed: rng.random(),
            n,
            arity,
            metric,
            mapping: self.mapping,
            anchors: self.anchors,
            factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    /// Start point of the failing run; `None` when the oracle itself found
    /// no unique common fixed point.
    pub start: Option<usize>,
    pub expected: Vec<usize>,
    pub got: String,
    pub instance: Box<Instance>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub generated: usize,
    pub verified: usize,
    pub unverified: usize,
    pub solver_runs: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    /// Largest `d_{n+1} - k d_n` over all recorded traces.
    pub worst_step_excess: f64,
    /// Largest `d(x_n, z) - k^n d_0 / (1 - k)` over all recorded traces.
    pub worst_bound_excess: f64,
}

impl FuzzSummary {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty() && self.agreements == self.solver_runs
    }
}

#[derive(Default)]
struct InstanceOutcome {
    verified: bool,
    runs: usize,
    agreements: usize,
    disagreements: Vec<Disagreement>,
    step_excess: f64,
    bound_excess: f64,
}

/// Generates `config.instances` instances and, on every verified one,
/// solves from every start point and compares with the oracle.
pub fn fuzz(config: &FuzzConfig) -> Result<FuzzSummary, OracleError> {
    let outcomes = map_indices(config.execution, config.instances, |i| fuzz_one(&config.recipe(i)));
    let mut summary = FuzzSummary {
        worst_step_excess: f64::NEG_INFINITY,
        worst_bound_excess: f64::NEG_INFINITY,
        ..FuzzSummary::default()
    };
    for outcome in outcomes {
        let o = outcome?;
        summary.generated += 1;
        if o.verified {
            summary.verified += 1;
        } else {
            summary.unverified += 1;
        }
        summary.solver_runs += o.runs;
        summary.agreements += o.agreements;
        summary.disagreements.extend(o.disagreements);
        summary.worst_step_excess = summary.worst_step_excess.max(o.step_excess);
        summary.worst_bound_excess = summary.worst_bound_excess.max(o.bound_excess);
    }
    Ok(summary)
}

/// `(max d_{n+1} - k d_n, max d(x_n, z) - bound_n)` of one trace.
pub(crate) fn trace_excess(space: &MetricSpace, r: &SolveReport) -> (f64, f64) {
    let steps = &r.trace.steps;
    let step = steps
        .windows(2)
        .map(|w| w[1] - r.rate_k * w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = r
        .trace
        .iterates
        .iter()
        .zip(&r.apriori_bounds)
        .map(|(x, b)| space.distance_unchecked(x, &r.limit) - b)
        .fold(f64::NEG_INFINITY, f64::max);
    (step, bound)
}

fn fuzz_one(recipe: &InstanceRecipe) -> Result<InstanceOutcome, OracleError> {
    let instance = generate_instance(recipe)?;
    let mut out = InstanceOutcome {
        verified: instance.verified,
        step_excess: f64::NEG_INFINITY,
        bound_excess: f64::NEG_INFINITY,
        ..InstanceOutcome::default()
    };
    if !instance.verified {
        return Ok(out);
    }
    let maps = &instance.maps;
    let all: Vec<&Mapping> = [Role::S, Role::T, Role::F, Role::G]
        .into_iter()
        .filter_map(|r| maps.get(r))
        .collect();
    let expected = enumerate_common_fixed_points(&instance.space, &all)?;
    if expected.len() != 1 {
        out.disagreements.push(Disagreement {
            start: None,
            expected,
            got: "oracle found no unique common fixed point".into(),
            instance: Box::new(instance),
        });
        return Ok(out);
    }
    let want = Point::Index(expected[0]);
    let sequential = Execution::Sequential;
    let ropts = ReductionOptions {
        solve: SolveOptions::default(),
        check: crate::contraction::CheckOptions {
            execution: sequential,
            ..Default::default()
        },
        source: None,
        prechecked: Some(instance.checks.condition.clone()),
    };
    let n = instance.space.as_finite().map_or(0, |s| s.len());
    for x0 in 0..n {
        let start = Point::Index(x0);
        out.runs += 1;
        let (got, trace) = match instance.recipe.arity {
            Arity::Two => match picard_solve(&instance.space, &maps.s, &maps.t, &start, &instance.coefficients, &ropts.solve) {
                Ok(r) if r.converged() => (Ok(r.limit.clone()), Some((instance.space.clone(), r))),
                Ok(r) => (Err(format!("{:?}", r.status)), None),
                Err(e) => (Err(e.to_string()), None),
            },
            arity => {
                let run = if arity == Arity::Three { solve_three } else { solve_four };
                match run(&instance.space, maps, &instance.coefficients, &start, &ropts) {
                    Ok(r) if r.outcome == Outcome::CommonFixedPoint => (
                        Ok(r.common_fixed_point.clone().expect("outcome carries the point")),
                        Some((r.witness.induced_space.clone(), r.induced_solve)),
                    ),
                    Ok(r) => (Err(format!("{:?}", r.outcome)), None),
                    Err(e) => (Err(e.to_string()), None),
                }
            }
        };
        if let Some((space, report)) = trace {
            let (s, b) = trace_excess(&space, &report);
            out.step_excess = out.step_excess.max(s);
            out.bound_excess = out.bound_excess.max(b);
        }
        match got {
            Ok(p) if p == want => out.agreements += 1,
            other => out.disagreements.push(Disagreement {
                start: Some(x0),
                expected: expected.clone(),
                got: match other {
                    Ok(p) => format!("converged to {p}"),
                    Err(e) => e,
                },
                instance: Box::new(instance.clone()),
            }),
        }
    }
    Ok(out)
}
