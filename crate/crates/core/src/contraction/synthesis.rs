//! Coefficient synthesis as a linear feasibility problem.
//!
//! Every pair contributes `a α + b β + c γ + d δ + m L >= lhs` with
//! nonnegative data, plus the budget row `α + β + γ + 2δ <= 1 - margin`.
//! The LP picks the cheapest tuple; that tuple is then scaled up halfway
//! towards the budget so it keeps slack on pairs the source did not see,
//! and finally re-verified with the ordinary checker.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    check_condition, collect_terms, CheckOptions, Coefficients, ConditionMaps, ContractionError,
    PairSource, Terms, ViolationReport,
};
use crate::mapping::MappingSet;
use crate::metric::{MetricSpace, Point};

/// Small weight on `L` in the objective so the LP does not wander off in
/// the `L` direction.
const L_WEIGHT: f64 = 1e-6;
const L_CAP: f64 = 1e9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("margin must lie in (0, 1), got {0}")]
    InvalidMargin(f64),
    #[error(
        "no coefficients satisfy the condition; most binding pair ({}, {}) exceeds the best bound by {excess}",
        pair.0, pair.1
    )]
    Infeasible { pair: (Point, Point), excess: f64 },
    #[error("linear solver failed: {0}")]
    Solver(String),
    #[error("synthesized coefficients did not re-verify (worst margin {})", .0.worst_margin)]
    Unverified(Box<ViolationReport>),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Synthesis {
    pub coefficients: Coefficients,
    /// `α + β + γ + 2δ` of the cheapest LP solution before scaling.
    pub minimal_budget: f64,
    /// Re-verification of `coefficients` over the same pair source.
    pub verification: ViolationReport,
}

struct Vars {
    alpha: Variable,
    beta: Variable,
    gamma: Variable,
    delta: Variable,
    l: Variable,
}

fn add_coefficient_vars(problem: &mut Problem, cost: [f64; 5], l_cap: f64) -> Vars {
    Vars {
        alpha: problem.add_var(cost[0], (0.0, 1.0)),
        beta: problem.add_var(cost[1], (0.0, 1.0)),
        gamma: problem.add_var(cost[2], (0.0, 1.0)),
        delta: problem.add_var(cost[3], (0.0, 1.0)),
        l: problem.add_var(cost[4], (0.0, l_cap)),
    }
}

fn row(vars: &Vars, t: &Terms) -> [(Variable, f64); 5] {
    [
        (vars.alpha, t.own_x),
        (vars.beta, t.own_y),
        (vars.gamma, t.cross),
        (vars.delta, t.mixed),
        (vars.l, t.min),
    ]
}

fn budget_row(problem: &mut Problem, vars: &Vars, bound: f64) {
    problem.add_constraint(
        [
            (vars.alpha, 1.0),
            (vars.beta, 1.0),
            (vars.gamma, 1.0),
            (vars.delta, 2.0),
        ],
        ComparisonOp::Le,
        bound,
    );
}

/// Finds coefficients under which the condition for `maps.arity` holds on
/// every pair of `source`, with `α + β + γ + 2δ <= 1 - margin`.
pub fn synthesize_coefficients(
    space: &MetricSpace,
    maps: &MappingSet,
    source: &PairSource,
    margin: f64,
    opts: CheckOptions,
) -> Result<Synthesis, SynthesisError> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(SynthesisError::InvalidMargin(margin));
    }
    let cmaps = ConditionMaps::from_set(maps).map_err(ContractionError::from)?;
    let budget = 1.0 - margin;
    // The `L` term vanishes on pairs like `(x, Sx)`, which is where the
    // iteration lives, but a random sample essentially never draws such a
    // pair. A sampled certificate that leans on `L` would say nothing about
    // the orbit, so sampled sources get `L = 0`.
    let l_cap = match source {
        PairSource::Exhaustive => L_CAP,
        PairSource::Sampled(_) => 0.0,
    };
    let all = collect_terms(space, &cmaps, source, opts.execution)?;
    // Pairs with a zero left-hand side hold for any nonnegative tuple.
    let binding: Vec<&(Point, Point, Terms)> = all.iter().filter(|(_, _, t)| t.lhs > 0.0).collect();

    let cheapest = if binding.is_empty() {
        Coefficients::default()
    } else {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars = add_coefficient_vars(&mut problem, [1.0, 1.0, 1.0, 2.0, L_WEIGHT], l_cap);
        for (_, _, t) in &binding {
            let scale = [t.own_x, t.own_y, t.cross, t.mixed, t.min, t.lhs]
                .into_iter()
                .fold(0.0_f64, f64::max);
            let scaled: Vec<(Variable, f64)> =
                row(&vars, t).into_iter().map(|(v, a)| (v, a / scale)).collect();
            problem.add_constraint(scaled.as_slice(), ComparisonOp::Ge, t.lhs / scale);
        }
        budget_row(&mut problem, &vars, budget);
        match problem.solve() {
            Ok(outcome) => {
                let sol = outcome
                    .into_solution()
                    .map_err(|e| SynthesisError::Solver(format!("{:?}", e.termination_reason())))?;
                Coefficients::new(
                    sol.var_value(vars.alpha).max(0.0),
                    sol.var_value(vars.beta).max(0.0),
                    sol.var_value(vars.gamma).max(0.0),
                    sol.var_value(vars.delta).max(0.0),
                    sol.var_value(vars.l).max(0.0),
                )
            }
            Err(microlp::Error::Infeasible) => {
                return Err(most_binding(&binding, budget, l_cap));
            }
            Err(e) => return Err(SynthesisError::Solver(e.to_string())),
        }
    };

    let minimal_budget = cheapest.budget();
    let coefficients = spend_half_the_slack(cheapest, budget);
    coefficients
        .validate()
        .map_err(|e| SynthesisError::Contraction(e.into()))?;
    let verification = check_condition(space, &cmaps, &coefficients, source, opts)?;
    if !verification.satisfied {
        return Err(SynthesisError::Unverified(Box::new(verification)));
    }
    Ok(Synthesis {
        coefficients,
        minimal_budget,
        verification,
    })
}

/// Scales the cheapest tuple so its budget sits halfway between the LP
/// optimum and the allowed maximum. The right-hand side is monotone in
/// every coefficient, so scaling up never breaks a satisfied pair.
fn spend_half_the_slack(c: Coefficients, budget: f64) -> Coefficients {
    let used = c.budget();
    let factor = if used > 0.0 {
        ((used + budget) / 2.0 / used).max(1.0)
    } else {
        2.0
    };
    let scaled = |v: f64| if used > 0.0 { v * factor } else { v };
    Coefficients::new(
        scaled(c.alpha),
        scaled(c.beta),
        scaled(c.gamma),
        scaled(c.delta),
        (c.l * factor).min(L_CAP),
    )
}

/// Minimises the largest violation under the budget and reports the pair
/// attaining it.
fn most_binding(binding: &[&(Point, Point, Terms)], budget: f64, l_cap: f64) -> SynthesisError {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars = add_coefficient_vars(&mut problem, [0.0; 5], l_cap);
    let slack = problem.add_var(1.0, (0.0, f64::INFINITY));
    for (_, _, t) in binding {
        let mut r: Vec<(Variable, f64)> = row(&vars, t).to_vec();
        r.push((slack, 1.0));
        problem.add_constraint(r.as_slice(), ComparisonOp::Ge, t.lhs);
    }
    budget_row(&mut problem, &vars, budget);
    let c = match problem.solve().ok().and_then(|o| o.into_solution().ok()) {
        Some(sol) => Coefficients::new(
            sol.var_value(vars.alpha),
            sol.var_value(vars.beta),
            sol.var_value(vars.gamma),
            sol.var_value(vars.delta),
            sol.var_value(vars.l),
        ),
        None => Coefficients::default(),
    };
    let (x, y, t) = binding
        .iter()
        .max_by(|a, b| a.2.margin(&c).total_cmp(&b.2.margin(&c)))
        .expect("infeasibility needs at least one binding pair");
    SynthesisError::Infeasible {
        pair: (x.clone(), y.clone()),
        excess: t.margin(&c),
    }
}
