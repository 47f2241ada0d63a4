//! Three- and four-map solve pipelines built on the reduction primitives.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    coincidence_values, expect_arity, induce_four, induce_three, injective_restriction, joint_coincidence,
    lift_to_common_fixed_point, weak_compatibility_on, ReductionError, ReductionWitness, Restriction,
    WeakCompatibility,
};
use crate::contraction::{check_condition, CheckOptions, Coefficients, ConditionMaps, PairSource, ViolationReport};
use crate::mapping::{Arity, Mapping, MappingSet};
use crate::metric::{MetricSpace, Point};
use crate::solver::{picard_solve, SolveOptions, SolveReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Assumptions,
    Hypotheses,
    InjectiveRestriction,
    InduceThree,
    InduceFour,
    PicardSolve,
    PullBack,
    CoincidenceUniqueness,
    WeakCompatibility,
    Lift,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Assumptions => "assumptions",
            Stage::Hypotheses => "hypotheses",
            Stage::InjectiveRestriction => "injective_restriction",
            Stage::InduceThree => "induce_three",
            Stage::InduceFour => "induce_four",
            Stage::PicardSolve => "picard_solve",
            Stage::PullBack => "pull_back",
            Stage::CoincidenceUniqueness => "coincidence_uniqueness",
            Stage::WeakCompatibility => "weak_compatibility",
            Stage::Lift => "lift",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub stage: Stage,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    /// Lift to a common fixed point when weak compatibility holds.
    Lift,
    /// Stop at the point of coincidence.
    CoincidenceOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    CommonFixedPoint,
    PointOfCoincidence,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub arity: Arity,
    pub mode: PipelineMode,
    pub outcome: Outcome,
    pub stages: Vec<StageEntry>,
    pub hypotheses: ViolationReport,
    pub witness: ReductionWitness,
    /// Iteration of the induced pair, in coordinates of the image `fE`.
    pub induced_solve: SolveReport,
    /// `fz`, in coordinates of the original space.
    pub point_of_coincidence: Option<Point>,
    /// `z` with `Sz = fz` (and `Tz = fz` for three maps).
    pub coincidence_point: Option<Point>,
    /// `v` with `Tv = gv = fz`, four maps only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coincidence_point_g: Option<Point>,
    pub weak_compatibility: Vec<WeakCompatibility>,
    pub common_fixed_point: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage}: {error}")]
pub struct PipelineError {
    pub stage: Stage,
    pub error: ReductionError,
    /// Stages completed before the failure, followed by the failing one.
    pub stages: Vec<StageEntry>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReductionOptions {
    pub solve: SolveOptions,
    pub check: CheckOptions,
    /// Pairs for the hypothesis check; `None` picks the default for the
    /// space (exhaustive on finite spaces).
    pub source: Option<PairSource>,
    /// A hypothesis check already run on the same instance; skips the
    /// check when several start points are solved in a row.
    pub prechecked: Option<ViolationReport>,
}

#[derive(Default)]
struct Log {
    entries: Vec<StageEntry>,
}

impl Log {
    fn pass(&mut self, stage: Stage, detail: impl Into<String>) {
        self.entries.push(StageEntry {
            stage,
            passed: true,
            detail: detail.into(),
        });
    }

    fn note(&mut self, stage: Stage, passed: bool, detail: impl Into<String>) {
        self.entries.push(StageEntry {
            stage,
            passed,
            detail: detail.into(),
        });
    }

    fn run<T>(&mut self, stage: Stage, r: Result<T, ReductionError>) -> Result<T, PipelineError> {
        r.map_err(|error| {
            self.note(stage, false, error.to_string());
            PipelineError {
                stage,
                error,
                stages: std::mem::take(&mut self.entries),
            }
        })
    }
}

pub fn solve_three(
    space: &MetricSpace,
    maps: &MappingSet,
    c: &Coefficients,
    x0: &Point,
    opts: &ReductionOptions,
) -> Result<CoincidenceReport, PipelineError> {
    run(space, maps, c, x0, opts, Arity::Three, PipelineMode::Lift)
}

pub fn solve_three_coincidence(
    space: &MetricSpace,
    maps: &MappingSet,
    c: &Coefficients,
    x0: &Point,
    opts: &ReductionOptions,
) -> Result<CoincidenceReport, PipelineError> {
    run(space, maps, c, x0, opts, Arity::Three, PipelineMode::CoincidenceOnly)
}

pub fn solve_four(
    space: &MetricSpace,
    maps: &MappingSet,
    c: &Coefficients,
    x0: &Point,
    opts: &ReductionOptions,
) -> Result<CoincidenceReport, PipelineError> {
    run(space, maps, c, x0, opts, Arity::Four, PipelineMode::Lift)
}

pub fn solve_four_coincidence(
    space: &MetricSpace,
    maps: &MappingSet,
    c: &Coefficients,
    x0: &Point,
    opts: &ReductionOptions,
) -> Result<CoincidenceReport, PipelineError> {
    run(space, maps, c, x0, opts, Arity::Four, PipelineMode::CoincidenceOnly)
}

fn assumptions(
    space: &MetricSpace,
    maps: &MappingSet,
    c: &Coefficients,
    x0: &Point,
    arity: Arity,
) -> Result<Coefficients, ReductionError> {
    expect_arity(maps, arity)?;
    maps.validate(space)?;
    space.contains(x0)?;
    let c = c.validate()?;
    if !space.is_complete() {
        return Err(ReductionError::IncompleteSpace);
    }
    Ok(c)
}

/// A named set of pairs that must coincide jointly, with the map whose
/// values are the points of coincidence.
type CoincidenceGroup<'a> = (String, Vec<(&'a Mapping, &'a Mapping)>, &'a Mapping);

fn run(
    space: &MetricSpace,
    maps: &MappingSet,
    c: &Coefficients,
    x0: &Point,
    opts: &ReductionOptions,
    arity: Arity,
    mode: PipelineMode,
) -> Result<CoincidenceReport, PipelineError> {
    let mut log = Log::default();
    let c = log.run(Stage::Assumptions, assumptions(space, maps, c, x0, arity))?;
    log.pass(Stage::Assumptions, "mappings total, coefficients valid, space complete");

    let f = maps.f().expect("arity checked");
    let g = if arity == Arity::Four { maps.g().expect("arity checked") } else { f };

    let hypotheses = match &opts.prechecked {
        Some(h) => h.clone(),
        None => {
            let source = opts.source.clone().unwrap_or_else(|| PairSource::default_for(space));
            let cmaps = ConditionMaps::from_set(maps).expect("arity checked");
            log.run(
                Stage::Hypotheses,
                check_condition(space, &cmaps, &c, &source, opts.check).map_err(ReductionError::from),
            )?
        }
    };
    log.note(
        Stage::Hypotheses,
        hypotheses.satisfied,
        format!(
            "{} {:?} over {} pairs, worst margin {:.3e}",
            if hypotheses.satisfied { "holds" } else { "violated" },
            hypotheses.mode,
            hypotheses.pairs_checked,
            hypotheses.worst_margin
        ),
    );

    let r1 = log.run(Stage::InjectiveRestriction, injective_restriction(space, f))?;
    let r2 = if arity == Arity::Four {
        Some(log.run(Stage::InjectiveRestriction, injective_restriction(space, g))?)
    } else {
        None
    };
    log.pass(Stage::InjectiveRestriction, restriction_detail(&r1, r2.as_ref()));

    let witness = match &r2 {
        None => log.run(Stage::InduceThree, induce_three(space, maps, &r1))?,
        Some(r2) => log.run(Stage::InduceFour, induce_four(space, maps, &r1, r2))?,
    };
    let induce_stage = if arity == Arity::Four { Stage::InduceFour } else { Stage::InduceThree };
    log.pass(induce_stage, "range inclusions hold; induced pair built on fE");

    let start = r1
        .to_local(&f.apply_unchecked(x0))
        .expect("f(x0) lies in fX = fE");
    let induced_solve = log.run(
        Stage::PicardSolve,
        picard_solve(&witness.induced_space, &witness.induced_s, &witness.induced_t, &start, &c, &opts.solve)
            .map_err(ReductionError::from),
    )?;
    let mut report = CoincidenceReport {
        arity,
        mode,
        outcome: Outcome::NotConverged,
        stages: Vec::new(),
        hypotheses,
        witness,
        induced_solve,
        point_of_coincidence: None,
        coincidence_point: None,
        coincidence_point_g: None,
        weak_compatibility: Vec::new(),
        common_fixed_point: None,
    };
    let solve = &report.induced_solve;
    log.note(
        Stage::PicardSolve,
        solve.converged(),
        format!("{:?} after {} steps, k = {}", solve.status, solve.iterations(), solve.rate_k),
    );
    if !solve.converged() {
        report.stages = log.entries;
        return Ok(report);
    }

    let fz = r1.to_global(&solve.limit);
    let z = r1.preimage(&fz).expect("fz lies in the image");
    let v = r2.as_ref().map(|r| r.preimage(&fz).expect("gX = fX"));
    let close = |a: &Point, b: &Point| space.distance_unchecked(a, b) <= solve.tolerance.max(space.default_tolerance());
    let pulled_back = close(&maps.s.apply_unchecked(&z), &fz)
        && close(&f.apply_unchecked(&z), &fz)
        && match &v {
            None => close(&maps.t.apply_unchecked(&z), &fz),
            Some(v) => close(&maps.t.apply_unchecked(v), &fz) && close(&g.apply_unchecked(v), &fz),
        };
    if !pulled_back {
        return Err(log
            .run::<()>(Stage::PullBack, Err(ReductionError::PullBackFailed { fz: fz.clone() }))
            .unwrap_err());
    }
    log.pass(
        Stage::PullBack,
        match &v {
            None => format!("z = {z}, Sz = Tz = fz = {fz}"),
            Some(v) => format!("z = {z}, Sz = fz = {fz}; v = {v}, Tv = gv = {fz}"),
        },
    );
    report.point_of_coincidence = Some(fz.clone());
    report.coincidence_point = Some(z);
    report.coincidence_point_g = v;

    let exec = opts.check.execution;
    let groups: Vec<CoincidenceGroup<'_>> = match arity {
        Arity::Four => vec![
            ("(S, f)".into(), vec![(&maps.s, f)], f),
            ("(T, g)".into(), vec![(&maps.t, g)], g),
        ],
        _ => vec![("(S, T, f)".into(), vec![(&maps.s, f), (&maps.t, f)], f)],
    };
    for (pair, pairs, value_map) in &groups {
        let set = joint_coincidence(space, pairs, exec);
        let values = coincidence_values(space, &set, value_map);
        let unique = values
            .as_ref()
            .is_some_and(|vals| vals.len() == 1 && space.points_equal(&vals[0], &fz));
        if !unique {
            let error = ReductionError::NonUniqueCoincidence {
                pair: pair.clone(),
                values: values.unwrap_or_default(),
            };
            return Err(log.run::<()>(Stage::CoincidenceUniqueness, Err(error)).unwrap_err());
        }
    }
    log.pass(
        Stage::CoincidenceUniqueness,
        if arity == Arity::Four {
            format!("fz is the only point of coincidence of (S, f) and (T, g); γ + 2δ = {}", c.gamma + 2.0 * c.delta)
        } else {
            "every x with Sx = Tx = fx has fx = fz".into()
        },
    );

    if mode == PipelineMode::CoincidenceOnly {
        report.outcome = Outcome::PointOfCoincidence;
        report.stages = log.entries;
        return Ok(report);
    }

    let lifted_pairs: [(&str, &Mapping, &Mapping); 2] = [("(S, f)", &maps.s, f), (if arity == Arity::Four { "(T, g)" } else { "(T, f)" }, &maps.t, g)];
    report.weak_compatibility = lifted_pairs
        .iter()
        .map(|(name, m, a)| {
            let set = joint_coincidence(space, &[(*m, *a)], exec);
            weak_compatibility_on(space, m, a, &set, name)
        })
        .collect();
    let failing: Vec<&WeakCompatibility> = report.weak_compatibility.iter().filter(|w| !w.compatible).collect();
    if !failing.is_empty() {
        let detail = failing
            .iter()
            .map(|w| match &w.witness {
                Some(x) => format!("{} do not commute at {x}", w.pair),
                None => format!("{} do not commute", w.pair),
            })
            .collect::<Vec<_>>()
            .join("; ");
        log.note(Stage::WeakCompatibility, false, format!("{detail}; reporting the point of coincidence only"));
        report.outcome = Outcome::PointOfCoincidence;
        report.stages = log.entries;
        return Ok(report);
    }
    log.pass(Stage::WeakCompatibility, "both pairs commute at their coincidence points");

    let first = log.run(Stage::Lift, lift_to_common_fixed_point(space, &maps.s, f, &fz))?;
    let second = log.run(Stage::Lift, lift_to_common_fixed_point(space, &maps.t, g, &fz))?;
    if !space.points_equal(&first, &second) {
        let error = ReductionError::LiftDisagreement { first, second };
        return Err(log.run::<()>(Stage::Lift, Err(error)).unwrap_err());
    }
    log.pass(Stage::Lift, format!("common fixed point {first}"));
    report.common_fixed_point = Some(first);
    report.outcome = Outcome::CommonFixedPoint;
    report.stages = log.entries;
    Ok(report)
}

fn restriction_detail(r1: &Restriction, r2: Option<&Restriction>) -> String {
    let one = |r: &Restriction| match r {
        Restriction::Finite { subset, .. } => format!("|E| = {}", subset.len()),
        Restriction::Affine { .. } => "E = X via the inverse map".to_string(),
    };
    match r2 {
        None => one(r1),
        Some(r2) => format!("E1: {}, E2: {}", one(r1), one(r2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::AffineMap;
    use crate::metric::{EuclideanSpace, FiniteSpace};

    fn line(n: usize) -> MetricSpace {
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        FiniteSpace::on_line(&xs).unwrap().into()
    }

    fn t(v: &[usize]) -> Mapping {
        Mapping::Table(v.to_vec())
    }

    fn half() -> Coefficients {
        Coefficients::new(0.0, 0.0, 0.5, 0.0, 0.0)
    }

    fn stage_names(r: &[StageEntry]) -> Vec<Stage> {
        r.iter().map(|e| e.stage).collect()
    }

    #[test]
    fn three_maps_with_collapsing_f() {
        let s = line(3);
        let maps = MappingSet::three(t(&[0, 0, 0]), t(&[0, 0, 0]), t(&[0, 0, 1]));
        for x0 in 0..3 {
            let r = solve_three(&s, &maps, &half(), &x0.into(), &ReductionOptions::default()).unwrap();
            assert_eq!(r.outcome, Outcome::CommonFixedPoint);
            assert_eq!(r.common_fixed_point, Some(Point::Index(0)));
            assert_eq!(r.point_of_coincidence, Some(Point::Index(0)));
            assert!(r.hypotheses.satisfied);
        }
    }

    #[test]
    fn identity_f_matches_the_two_map_solver() {
        let s = line(4);
        let maps = MappingSet::three(t(&[0, 0, 1, 2]), t(&[0, 0, 0, 1]), t(&[0, 1, 2, 3]));
        let c = Coefficients::new(0.0, 0.0, 0.0, 0.0, 0.0);
        let direct = picard_solve(&s, &maps.s, &maps.t, &3.into(), &c, &SolveOptions::default()).unwrap();
        let r = solve_three(&s, &maps, &c, &3.into(), &ReductionOptions::default()).unwrap();
        assert_eq!(r.induced_solve.limit, direct.limit);
    }

    #[test]
    fn range_inclusion_failure_stops_before_iteration() {
        let s = line(2);
        let maps = MappingSet::three(t(&[0, 1]), t(&[0, 0]), t(&[0, 0]));
        let err = solve_three(&s, &maps, &half(), &0.into(), &ReductionOptions::default()).unwrap_err();
        assert_eq!(err.stage, Stage::InduceThree);
        assert!(matches!(err.error, ReductionError::RangeInclusionFailure { .. }));
        assert!(!stage_names(&err.stages).contains(&Stage::PicardSolve));
    }

    #[test]
    fn coincidence_only_variant_skips_lifting() {
        let s = line(3);
        let maps = MappingSet::three(t(&[0, 0, 0]), t(&[0, 0, 0]), t(&[0, 0, 1]));
        let r = solve_three_coincidence(&s, &maps, &half(), &2.into(), &ReductionOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::PointOfCoincidence);
        assert_eq!(r.point_of_coincidence, Some(Point::Index(0)));
        assert_eq!(r.common_fixed_point, None);
        assert!(!stage_names(&r.stages).contains(&Stage::Lift));
    }

    #[test]
    fn failing_weak_compatibility_degrades_to_a_point_of_coincidence() {
        // S = T ≡ 1 and f swaps 0 and 1 while fixing 2: the only coincidence
        // point is x = 0 with value 1, but S f 0 = 1 ≠ f S 0 = 0.
        let s = line(3);
        let maps = MappingSet::three(t(&[1, 1, 1]), t(&[1, 1, 1]), t(&[1, 0, 2]));
        let r = solve_three(&s, &maps, &Coefficients::default(), &2.into(), &ReductionOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::PointOfCoincidence);
        assert_eq!(r.point_of_coincidence, Some(Point::Index(1)));
        assert_eq!(r.coincidence_point, Some(Point::Index(0)));
        assert_eq!(r.common_fixed_point, None);
        assert!(!r.weak_compatibility[0].compatible);
        assert_eq!(r.weak_compatibility[0].witness, Some(Point::Index(0)));
        let r = solve_three_coincidence(&s, &maps, &Coefficients::default(), &2.into(), &ReductionOptions::default()).unwrap();
        assert_eq!(r.point_of_coincidence, Some(Point::Index(1)));
    }

    #[test]
    fn four_maps_identity_anchors_and_equal_anchors() {
        let s = line(3);
        let id = t(&[0, 1, 2]);
        let zero = t(&[0, 0, 0]);
        let maps = MappingSet::four(zero.clone(), zero.clone(), id.clone(), id.clone());
        let r = solve_four(&s, &maps, &half(), &2.into(), &ReductionOptions::default()).unwrap();
        assert_eq!(r.common_fixed_point, Some(Point::Index(0)));

        let f = t(&[0, 0, 1]);
        let maps = MappingSet::four(zero.clone(), zero.clone(), f.clone(), f.clone());
        let r = solve_four(&s, &maps, &half(), &2.into(), &ReductionOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::CommonFixedPoint);
        assert_eq!(r.common_fixed_point, Some(Point::Index(0)));
        assert!(r.coincidence_point_g.is_some());

        let r = solve_four_coincidence(&s, &maps, &half(), &2.into(), &ReductionOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::PointOfCoincidence);
    }

    #[test]
    fn four_maps_with_different_images_fail_at_induction() {
        let s = line(3);
        let zero = t(&[0, 0, 0]);
        let maps = MappingSet::four(zero.clone(), zero, t(&[0, 0, 1]), t(&[0, 2, 2]));
        let err = solve_four(&s, &maps, &half(), &0.into(), &ReductionOptions::default()).unwrap_err();
        assert_eq!(err.stage, Stage::InduceFour);
        assert!(matches!(err.error, ReductionError::ImageMismatch { .. }));
    }

    #[test]
    fn wrong_arity_and_incomplete_spaces_fail_assumptions() {
        let s = line(2);
        let maps = MappingSet::two(t(&[0, 0]), t(&[0, 0]));
        let err = solve_three(&s, &maps, &half(), &0.into(), &ReductionOptions::default()).unwrap_err();
        assert_eq!(err.stage, Stage::Assumptions);

        let e: MetricSpace = EuclideanSpace::new(1).unwrap().with_completeness(false).into();
        let lin = |a: f64| Mapping::Affine(AffineMap::scaling(1, a));
        let maps = MappingSet::three(lin(0.25), lin(0.25), lin(1.0));
        let err = solve_three(&e, &maps, &half(), &Point::Vector(vec![1.0]), &ReductionOptions::default()).unwrap_err();
        assert_eq!((err.stage, err.error), (Stage::Assumptions, ReductionError::IncompleteSpace));
    }

    #[test]
    fn affine_three_maps() {
        let e: MetricSpace = EuclideanSpace::new(1).unwrap().into();
        let lin = |a: f64| Mapping::Affine(AffineMap::scaling(1, a));
        // f x = 2x, S x = T x = x/2: induced maps are x/4.
        let maps = MappingSet::three(lin(0.5), lin(0.5), lin(2.0));
        let opts = ReductionOptions {
            solve: SolveOptions {
                max_iters: 500,
                tol: Some(1e-12),
            },
            ..ReductionOptions::default()
        };
        let c = Coefficients::new(0.0, 0.0, 0.3, 0.0, 0.0);
        let r = solve_three(&e, &maps, &c, &Point::Vector(vec![3.0]), &opts).unwrap();
        assert_eq!(r.outcome, Outcome::CommonFixedPoint, "{:#?}", r.stages);
        assert!(r.common_fixed_point.unwrap().coords().unwrap()[0].abs() < 1e-10);
    }

    #[test]
    fn report_serializes_stage_names() {
        let s = line(3);
        let maps = MappingSet::three(t(&[0, 0, 0]), t(&[0, 0, 0]), t(&[0, 0, 1]));
        let r = solve_three(&s, &maps, &half(), &1.into(), &ReductionOptions::default()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["stages"][0]["stage"], "assumptions");
        assert_eq!(json["outcome"], "common_fixed_point");
        let back: CoincidenceReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }
}
