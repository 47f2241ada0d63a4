//! Alternating iteration for a common fixed point of `S` and `T`.
//!
//! From `x0` the solver builds `x1 = S x0, x2 = T x1, x3 = S x2, ...`.
//! Under the contractive condition consecutive steps shrink by the rate
//! `k = max{(α+γ+δ)/(1-β-δ), (β+γ+δ)/(1-α-δ)}`, which gives both the
//! a-priori bound `k^n d(x0, x1) / (1 - k)` on `d(x_n, z)` and the
//! a-posteriori stopping rule used here. The step ratio is monitored at
//! runtime so a hypothesis failure shows up as [`SolveStatus::RateViolated`]
//! rather than as a wrong answer.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::{
    check_condition_two, BoundViolation, CheckOptions, Coefficients, ContractionError, PairSource,
    ViolationReport,
};
use crate::mapping::{Mapping, MappingError, Role};
use crate::metric::{CheckMode, MetricError, MetricSpace, Point};

pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Coefficients(#[from] BoundViolation),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error("rate constant k = {0} must lie in [0, 1)")]
    RateOutOfRange(f64),
    #[error("d0 = {0} must be a finite nonnegative distance")]
    BadInitialStep(f64),
    #[error("{point} is not a fixed point of {role}: residual {residual} > {tol}")]
    ResidualPrecondition {
        role: Role,
        point: Point,
        residual: f64,
        tol: f64,
    },
}

/// `max{(α+γ+δ)/(1-β-δ), (β+γ+δ)/(1-α-δ)}`; below 1 for valid tuples.
pub fn rate_constant(c: &Coefficients) -> f64 {
    let first = (c.alpha + c.gamma + c.delta) / (1.0 - c.beta - c.delta);
    let second = (c.beta + c.gamma + c.delta) / (1.0 - c.alpha - c.delta);
    first.max(second)
}

/// `k^n d0 / (1 - k)`, an upper bound on `d(x_n, z)`.
pub fn apriori_error_bound(k: f64, d0: f64, n: usize) -> Result<f64, SolveError> {
    if !(0.0..1.0).contains(&k) {
        return Err(SolveError::RateOutOfRange(k));
    }
    if !(d0.is_finite() && d0 >= 0.0) {
        return Err(SolveError::BadInitialStep(d0));
    }
    let power = i32::try_from(n).map_or(0.0, |n| k.powi(n));
    Ok(power * d0 / (1.0 - k))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Stopping and residual tolerance; `None` takes the space default.
    pub tol: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            tol: None,
        }
    }
}

/// Iterates `x_0, ..., x_N` and step distances `d_n = d(x_n, x_{n+1})`.
/// Odd iterates come from `S`, even ones (after `x_0`) from `T`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iterates: Vec<Point>,
    pub steps: Vec<f64>,
}

impl IterationTrace {
    /// Which map produced iterate `n` (`None` for the start point).
    pub fn producer(n: usize) -> Option<Role> {
        match n {
            0 => None,
            n if n % 2 == 1 => Some(Role::S),
            _ => Some(Role::T),
        }
    }

    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateViolation {
    /// `d_{n+1} > k d_n + tol`
    StepRatio { observed: f64, allowed: f64 },
    /// The orbit of a finite space closed a cycle without reaching a
    /// common fixed point.
    Cycle { period: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    RateViolated { step: usize, violation: RateViolation },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub rate_k: f64,
    /// Last iterate.
    pub limit: Point,
    /// `d(z, Sz)`
    pub residual_s: f64,
    /// `d(z, Tz)`
    pub residual_t: f64,
    pub tolerance: f64,
    /// Number of map applications performed.
    pub iterations: usize,
    /// `k^n d_0 / (1 - k)` for every recorded iterate.
    pub apriori_bounds: Vec<f64>,
    /// `k / (1 - k) * d_last`, the certified distance from the limit.
    pub aposteriori_bound: f64,
    pub trace: IterationTrace,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Drops the per-step trace and bounds, keeping the summary fields.
    pub fn without_trace(mut self) -> Self {
        self.trace = IterationTrace::default();
        self.apriori_bounds.clear();
        self
    }
}

/// Runs the alternating iteration from `x0`.
///
/// Stops once the last step is below `tol (1 - k) / max(k, tol)` (for
/// `k = 0`: once the point no longer moves) and both residuals are within
/// `tol`. On finite spaces a revisited `(point, parity)` state means the
/// orbit cycles forever, which is reported as a rate violation.
pub fn picard_solve(
    space: &MetricSpace,
    s: &Mapping,
    t: &Mapping,
    x0: &Point,
    c: &Coefficients,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    let c = c.validate()?;
    s.check_total(space, Role::S)?;
    t.check_total(space, Role::T)?;
    space.contains(x0)?;

    let k = rate_constant(&c);
    let tol = opts.tol.unwrap_or_else(|| space.default_tolerance());
    let step_threshold = tol * (1.0 - k) / k.max(tol);
    let d = |a: &Point, b: &Point| space.distance_unchecked(a, b);

    let mut trace = IterationTrace {
        iterates: vec![x0.clone()],
        steps: Vec::new(),
    };
    let mut seen: HashSet<(usize, bool)> = HashSet::new();
    if let Point::Index(i) = x0 {
        seen.insert((*i, true));
    }

    let status = loop {
        let n = trace.steps.len();
        if n >= opts.max_iters {
            break SolveStatus::MaxIterations;
        }
        let current = &trace.iterates[n];
        let next = if n.is_multiple_of(2) {
            s.apply_unchecked(current)
        } else {
            t.apply_unchecked(current)
        };
        let step = d(current, &next);
        trace.steps.push(step);
        trace.iterates.push(next);
        let next = &trace.iterates[n + 1];

        if n >= 1 {
            let allowed = k * trace.steps[n - 1] + tol;
            if step > allowed {
                break SolveStatus::RateViolated {
                    step: n,
                    violation: RateViolation::StepRatio {
                        observed: step,
                        allowed,
                    },
                };
            }
        }

        let settled = if k == 0.0 {
            space.points_equal(&trace.iterates[n], next)
        } else {
            step <= step_threshold
        };
        if settled
            && d(next, &s.apply_unchecked(next)) <= tol
            && d(next, &t.apply_unchecked(next)) <= tol
        {
            break SolveStatus::Converged;
        }

        if let Point::Index(i) = next {
            // Parity of the map that acts next: S after even-indexed iterates.
            let state = (*i, (n + 1).is_multiple_of(2));
            if !seen.insert(state) {
                let first = trace
                    .iterates
                    .iter()
                    .enumerate()
                    .position(|(m, p)| p == next && m % 2 == (n + 1) % 2)
                    .unwrap_or(n + 1);
                break SolveStatus::RateViolated {
                    step: n,
                    violation: RateViolation::Cycle {
                        period: n + 1 - first,
                    },
                };
            }
        }
    };

    let limit = trace.iterates.last().cloned().expect("trace holds x0");
    let residual_s = d(&limit, &s.apply_unchecked(&limit));
    let residual_t = d(&limit, &t.apply_unchecked(&limit));
    let d0 = trace.steps.first().copied().unwrap_or(0.0);
    let apriori_bounds = (0..trace.iterates.len())
        .map(|n| apriori_error_bound(k, d0, n).expect("k < 1 for validated coefficients"))
        .collect();
    let last = trace.steps.last().copied().unwrap_or(0.0);
    Ok(SolveReport {
        status,
        rate_k: k,
        limit,
        residual_s,
        residual_t,
        tolerance: tol,
        iterations: trace.steps.len(),
        apriori_bounds,
        aposteriori_bound: k / (1.0 - k) * last,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub equal: bool,
    pub distance: f64,
    /// `(γ + 2δ) d(z1, z2)`: what the condition allows at `(z1, z2)` once
    /// the fixed-point terms vanish.
    pub contraction_bound: f64,
    /// Two distinct fixed points contradict the contractive condition.
    pub hypothesis_violated: bool,
}

/// Applies the contractive condition at `(z1, z2)`, where `z1 = S z1` and
/// `z2 = T z2`: `d(z1, z2) <= (γ + 2δ) d(z1, z2)` forces `z1 = z2`.
pub fn uniqueness_check(
    space: &MetricSpace,
    s: &Mapping,
    t: &Mapping,
    c: &Coefficients,
    z1: &Point,
    z2: &Point,
    tol: f64,
) -> Result<UniquenessVerdict, SolveError> {
    let c = c.validate()?;
    let sz1 = s.apply(space, z1)?;
    let tz2 = t.apply(space, z2)?;
    for (role, z, image) in [(Role::S, z1, &sz1), (Role::T, z2, &tz2)] {
        let residual = space.distance_unchecked(z, image);
        if residual > tol {
            return Err(SolveError::ResidualPrecondition {
                role,
                point: z.clone(),
                residual,
                tol,
            });
        }
    }
    let distance = space.distance_unchecked(z1, z2);
    let equal = distance <= tol;
    Ok(UniquenessVerdict {
        equal,
        distance,
        contraction_bound: (c.gamma + 2.0 * c.delta) * distance,
        hypothesis_violated: !equal,
    })
}

/// How far a uniqueness claim can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniqueness {
    /// The condition was verified on every pair: the limit is the unique
    /// common fixed point.
    Certified,
    /// The condition held on a sample only.
    SampledOnly,
    /// The condition failed; the limit, if any, carries no uniqueness claim.
    NotCertified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoMapOutcome {
    pub hypotheses: ViolationReport,
    pub uniqueness: Uniqueness,
    pub solve: SolveReport,
}

/// Checks the two-map condition over `source`, then iterates from `x0`.
#[allow(clippy::too_many_arguments)]
pub fn solve_two(
    space: &MetricSpace,
    s: &Mapping,
    t: &Mapping,
    x0: &Point,
    c: &Coefficients,
    source: &PairSource,
    opts: &SolveOptions,
    check: CheckOptions,
) -> Result<TwoMapOutcome, SolveError> {
    let hypotheses = check_condition_two(space, s, t, &c.validate()?, source, check)?;
    let uniqueness = match (hypotheses.satisfied, hypotheses.mode) {
        (true, CheckMode::Exhaustive) => Uniqueness::Certified,
        (true, CheckMode::Sampled) => Uniqueness::SampledOnly,
        (false, _) => Uniqueness::NotCertified,
    };
    let solve = picard_solve(space, s, t, x0, c, opts)?;
    Ok(TwoMapOutcome {
        hypotheses,
        uniqueness,
        solve,
    })
}
