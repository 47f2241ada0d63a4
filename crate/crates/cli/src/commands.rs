use std::fs;

use serde::Serialize;
use serde_json::{json, Value};

use cofix::contraction::{
    check_condition, check_range_inclusions, synthesize_coefficients, CheckOptions, Coefficients, ConditionMaps,
    InclusionReport, PairSource, SampleBox, Sampler, ViolationReport,
};
use cofix::mapping::{Arity, Mapping, MappingSet};
use cofix::metric::{verify_metric_axioms, AxiomReport, MetricSpace, Point};
use cofix::oracle::{run_oracle, AnchorMode, FuzzConfig, MappingMode};
use cofix::par::Execution;
use cofix::problem::{Problem, ProblemFile};
use cofix::reduction::{
    induce_four, induce_three, injective_restriction, is_weakly_compatible, solve_four, solve_four_coincidence,
    solve_three, solve_three_coincidence, Outcome, ReductionOptions, ReductionWitness, Stage, WeakCompatibility,
};
use cofix::solver::{solve_two, TwoMapOutcome};

use crate::render;
use crate::{AnchorArg, FileArgs, FuzzArgs, ModeArg, PipelineArgs, SolveArgs};

/// Budget headroom left when coefficients are synthesized.
pub const SYNTHESIS_MARGIN: f64 = 0.05;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

pub struct Reported {
    pub code: u8,
    pub seed: Option<u64>,
    pub human: String,
    pub report: Value,
}

pub struct Failure {
    pub code: u8,
    pub stage: String,
    pub message: String,
    pub human: Option<String>,
    pub report: Option<Value>,
}

impl Failure {
    fn input(stage: &str, message: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            stage: stage.into(),
            message: message.to_string(),
            human: None,
            report: None,
        }
    }

    fn failed(stage: impl ToString, message: impl ToString) -> Self {
        Failure {
            code: EXIT_FAIL,
            stage: stage.to_string(),
            message: message.to_string(),
            human: None,
            report: None,
        }
    }

    fn with_report(mut self, report: impl Serialize) -> Self {
        self.report = Some(to_value(report));
        self
    }

    fn with_human(mut self, human: String) -> Self {
        self.human = Some(human);
        self
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn envelope(command: &str, result: &Result<Reported, Failure>) -> Value {
    match result {
        Ok(r) => json!({
            "command": command,
            "exit_code": r.code,
            "seed": r.seed,
            "report": r.report,
        }),
        Err(f) => json!({
            "command": command,
            "exit_code": f.code,
            "error": { "stage": f.stage, "message": f.message },
            "report": f.report,
        }),
    }
}

fn load(args: &FileArgs) -> Result<Problem, Failure> {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| Failure::input("input", format!("{}: {e}", args.file.display())))?;
    let file = ProblemFile::from_json(&text).map_err(|e| Failure::input("schema", e))?;
    let mut problem = file.build().map_err(|e| Failure::input("schema", e))?;
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::input("input", format!("--tol must be positive, got {tol}")));
        }
        problem.solve.tol = Some(tol);
    }
    match (&problem.pair_source, args.samples, args.seed) {
        (PairSource::Sampled(s), samples, seed) => {
            problem.pair_source = PairSource::Sampled(Sampler {
                samples: samples.unwrap_or(s.samples),
                seed: seed.unwrap_or(s.seed),
                bounds: s.bounds.clone(),
            });
        }
        (PairSource::Exhaustive, Some(samples), seed) => {
            problem.pair_source = PairSource::sampled(samples, seed.unwrap_or(0), SampleBox::default());
        }
        (PairSource::Exhaustive, None, _) => {}
    }
    Ok(problem)
}

fn check_options(args: &FileArgs) -> CheckOptions {
    CheckOptions {
        tolerance: args.tol,
        ..CheckOptions::default()
    }
}

fn sampler_seed(source: &PairSource) -> Option<u64> {
    match source {
        PairSource::Sampled(s) => Some(s.seed),
        PairSource::Exhaustive => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientOrigin {
    File,
    Synthesized,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientInfo {
    pub origin: CoefficientOrigin,
    pub coefficients: Option<Coefficients>,
    pub budget: Option<f64>,
    /// Cheapest budget found by the LP before headroom, synthesized only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_budget: Option<f64>,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn resolve_coefficients(p: &Problem, opts: CheckOptions) -> CoefficientInfo {
    match p.coefficients {
        Some(c) => match c.validate() {
            Ok(c) => CoefficientInfo {
                origin: CoefficientOrigin::File,
                coefficients: Some(c),
                budget: Some(c.budget()),
                minimal_budget: None,
                valid: true,
                error: None,
            },
            Err(e) => CoefficientInfo {
                origin: CoefficientOrigin::File,
                coefficients: Some(c),
                budget: Some(c.budget()),
                minimal_budget: None,
                valid: false,
                error: Some(e.to_string()),
            },
        },
        None => match synthesize_coefficients(&p.space, &p.maps, &p.pair_source, SYNTHESIS_MARGIN, opts) {
            Ok(s) => CoefficientInfo {
                origin: CoefficientOrigin::Synthesized,
                coefficients: Some(s.coefficients),
                budget: Some(s.coefficients.budget()),
                minimal_budget: Some(s.minimal_budget),
                valid: true,
                error: None,
            },
            Err(e) => CoefficientInfo {
                origin: CoefficientOrigin::Synthesized,
                coefficients: None,
                budget: None,
                minimal_budget: None,
                valid: false,
                error: Some(e.to_string()),
            },
        },
    }
}

fn usable_coefficients(info: &CoefficientInfo) -> Result<Coefficients, Failure> {
    match (info.valid, info.coefficients) {
        (true, Some(c)) => Ok(c),
        _ => Err(Failure::failed(
            "coefficients",
            info.error.clone().unwrap_or_else(|| "no usable coefficients".into()),
        )
        .with_report(info)),
    }
}

fn require_assumptions(p: &Problem) -> Result<(), Failure> {
    if p.assumptions_hold() {
        Ok(())
    } else {
        Err(Failure::failed(
            Stage::Assumptions,
            "the problem declares an incomplete space or range subspace",
        ))
    }
}

fn weak_pairs(space: &MetricSpace, maps: &MappingSet) -> Vec<WeakCompatibility> {
    let pairs: Vec<(&str, &Mapping, Option<&Mapping>)> = match maps.arity {
        Arity::Two => Vec::new(),
        Arity::Three => vec![("(S, f)", &maps.s, maps.f.as_ref()), ("(T, f)", &maps.t, maps.f.as_ref())],
        Arity::Four => vec![("(S, f)", &maps.s, maps.f.as_ref()), ("(T, g)", &maps.t, maps.g.as_ref())],
    };
    pairs
        .into_iter()
        .filter_map(|(name, a, b)| {
            let mut w = is_weakly_compatible(space, a, b?).ok()?;
            w.pair = name.into();
            Some(w)
        })
        .collect()
}

#[derive(Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub axioms: AxiomReport,
    pub coefficients: CoefficientInfo,
    pub condition: Option<ViolationReport>,
    pub inclusions: Option<InclusionReport>,
    pub assumptions_hold: bool,
    /// Informational: weak compatibility only matters for lifting.
    pub weak_compatibility: Vec<WeakCompatibility>,
}

pub fn check(args: &FileArgs) -> Result<Reported, Failure> {
    let p = load(args)?;
    let opts = check_options(args);
    let axioms = verify_metric_axioms(&p.space, args.tol.unwrap_or_else(|| p.space.default_tolerance()));
    let coefficients = resolve_coefficients(&p, opts);
    let condition = match (coefficients.valid, coefficients.coefficients) {
        (true, Some(c)) => {
            let maps = ConditionMaps::from_set(&p.maps).map_err(|e| Failure::input("schema", e))?;
            Some(check_condition(&p.space, &maps, &c, &p.pair_source, opts).map_err(|e| Failure::input("hypotheses", e))?)
        }
        _ => None,
    };
    let inclusions = match p.maps.arity {
        Arity::Two => None,
        _ => Some(check_range_inclusions(&p.space, &p.maps).map_err(|e| Failure::input("inclusions", e))?),
    };
    let report = CheckReport {
        passed: axioms.passed
            && coefficients.valid
            && condition.as_ref().is_some_and(|c| c.satisfied)
            && inclusions.as_ref().is_none_or(|i| i.holds)
            && p.assumptions_hold(),
        axioms,
        coefficients,
        condition,
        inclusions,
        assumptions_hold: p.assumptions_hold(),
        weak_compatibility: weak_pairs(&p.space, &p.maps),
    };
    Ok(Reported {
        code: if report.passed { EXIT_PASS } else { EXIT_FAIL },
        seed: sampler_seed(&p.pair_source),
        human: render::check(&p.space, &report),
        report: to_value(&report),
    })
}

fn parse_point(space: &MetricSpace, text: &str) -> Result<Point, Failure> {
    let bad = |why: String| Failure::input("input", format!("--x0 {text:?}: {why}"));
    let point = match space {
        MetricSpace::Finite(fs) => {
            let by_label = fs.labels().and_then(|l| l.iter().position(|s| s == text));
            match (by_label, text.strip_prefix('#')) {
                (_, Some(i)) => Point::Index(i.parse().map_err(|e| bad(format!("{e}")))?),
                (Some(i), None) => Point::Index(i),
                (None, None) => Point::Index(text.parse().map_err(|_| bad("not a label or an index".into()))?),
            }
        }
        MetricSpace::Euclidean(_) => Point::Vector(
            text.split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| bad(format!("{e}")))?,
        ),
    };
    space.contains(&point).map_err(|e| bad(e.to_string()))?;
    Ok(point)
}

fn load_for_solve(args: &SolveArgs, arity: Arity) -> Result<Problem, Failure> {
    let mut p = load(&args.file)?;
    if p.maps.arity != arity {
        let hint = match p.maps.arity {
            Arity::Two => "solve",
            Arity::Three => "solve3",
            Arity::Four => "solve4",
        };
        return Err(Failure::input(
            "arity",
            format!("the problem has {} maps; use `cofix {hint}`", p.maps.arity),
        ));
    }
    if let Some(x0) = &args.x0 {
        p.x0 = parse_point(&p.space, x0)?;
    }
    if let Some(n) = args.max_iters {
        p.solve.max_iters = n;
    }
    Ok(p)
}

#[derive(Serialize)]
pub struct SolveOutput {
    pub coefficients: CoefficientInfo,
    #[serde(flatten)]
    pub outcome: TwoMapOutcome,
}

pub fn solve(args: &SolveArgs) -> Result<Reported, Failure> {
    let p = load_for_solve(args, Arity::Two)?;
    require_assumptions(&p)?;
    let opts = check_options(&args.file);
    let coefficients = resolve_coefficients(&p, opts);
    let c = usable_coefficients(&coefficients)?;
    let mut outcome = solve_two(&p.space, &p.maps.s, &p.maps.t, &p.x0, &c, &p.pair_source, &p.solve, opts)
        .map_err(|e| Failure::failed(Stage::PicardSolve, e))?;
    let human = render::solve(&p.space, &coefficients, &outcome, args.trace);
    if !args.trace {
        outcome.solve = outcome.solve.without_trace();
    }
    let ok = outcome.hypotheses.satisfied && outcome.solve.converged();
    Ok(Reported {
        code: if ok { EXIT_PASS } else { EXIT_FAIL },
        seed: sampler_seed(&p.pair_source),
        human,
        report: to_value(SolveOutput { coefficients, outcome }),
    })
}

pub fn solve_pipeline(args: &PipelineArgs, maps: u8) -> Result<Reported, Failure> {
    let arity = if maps == 3 { Arity::Three } else { Arity::Four };
    let p = load_for_solve(&args.solve, arity)?;
    require_assumptions(&p)?;
    let check = check_options(&args.solve.file);
    let coefficients = resolve_coefficients(&p, check);
    let c = usable_coefficients(&coefficients)?;
    let opts = ReductionOptions {
        solve: p.solve.clone(),
        check,
        source: Some(p.pair_source.clone()),
        prechecked: None,
    };
    let run = match (arity, args.coincidence_only) {
        (Arity::Three, false) => solve_three,
        (Arity::Three, true) => solve_three_coincidence,
        (_, false) => solve_four,
        (_, true) => solve_four_coincidence,
    };
    let mut report = run(&p.space, &p.maps, &c, &p.x0, &opts).map_err(|e| {
        Failure::failed(e.stage, &e.error)
            .with_human(render::stages(&e.stages))
            .with_report(json!({ "coefficients": coefficients, "stages": e.stages }))
    })?;
    let human = render::pipeline(&p.space, &coefficients, &report, args.solve.trace);
    if !args.solve.trace {
        report.induced_solve = report.induced_solve.without_trace();
    }
    let reached = match report.outcome {
        Outcome::CommonFixedPoint => true,
        Outcome::PointOfCoincidence => args.coincidence_only,
        Outcome::NotConverged => false,
    };
    let ok = reached && report.hypotheses.satisfied;
    Ok(Reported {
        code: if ok { EXIT_PASS } else { EXIT_FAIL },
        seed: sampler_seed(&p.pair_source),
        human,
        report: json!({ "coefficients": coefficients, "result": report }),
    })
}

#[derive(Serialize)]
pub struct ReduceOutput {
    pub commutes: bool,
    pub witness: ReductionWitness,
}

pub fn reduce(args: &FileArgs) -> Result<Reported, Failure> {
    let p = load(args)?;
    let space = &p.space;
    let restrict = |m: &Mapping| injective_restriction(space, m).map_err(|e| Failure::failed(Stage::InjectiveRestriction, e));
    let witness = match p.maps.arity {
        Arity::Two => return Err(Failure::input("arity", "reduce needs a three- or four-map problem")),
        Arity::Three => {
            let r = restrict(p.maps.f.as_ref().expect("validated"))?;
            induce_three(space, &p.maps, &r).map_err(|e| Failure::failed(Stage::InduceThree, e))?
        }
        Arity::Four => {
            let r1 = restrict(p.maps.f.as_ref().expect("validated"))?;
            let r2 = restrict(p.maps.g.as_ref().expect("validated"))?;
            induce_four(space, &p.maps, &r1, &r2).map_err(|e| Failure::failed(Stage::InduceFour, e))?
        }
    };
    let out = ReduceOutput {
        commutes: witness.commutes(space, &p.maps),
        witness,
    };
    Ok(Reported {
        code: if out.commutes { EXIT_PASS } else { EXIT_FAIL },
        seed: None,
        human: render::reduce(space, &out.witness, out.commutes),
        report: to_value(&out),
    })
}

pub fn oracle(args: &FileArgs) -> Result<Reported, Failure> {
    let p = load(args)?;
    if p.space.as_finite().is_none() {
        return Err(Failure::input("oracle", "the oracle only enumerates finite spaces"));
    }
    let result = run_oracle(&p.space, &p.maps, p.coefficients.as_ref(), check_options(args))
        .map_err(|e| Failure::failed("oracle", e))?;
    Ok(Reported {
        code: EXIT_PASS,
        seed: None,
        human: render::oracle(&p.space, &result),
        report: to_value(&result),
    })
}

pub fn fuzz(args: &FuzzArgs) -> Result<Reported, Failure> {
    if args.n_min < 1 || args.n_min > args.n_max {
        return Err(Failure::input(
            "input",
            format!("need 1 <= --n-min <= --n-max, got {} and {}", args.n_min, args.n_max),
        ));
    }
    let config = FuzzConfig {
        seed: args.seed,
        instances: args.instances,
        n_range: [args.n_min, args.n_max],
        arity: args.arity.map(|a| match a {
            2 => Arity::Two,
            3 => Arity::Three,
            _ => Arity::Four,
        }),
        mapping: match args.mode {
            ModeArg::Contraction => MappingMode::ContractionTowardAnchor,
            ModeArg::Random => MappingMode::Random,
            ModeArg::Identity => MappingMode::Identity,
            ModeArg::Constant => MappingMode::Constant,
        },
        anchors: match args.anchors {
            AnchorArg::Independent => AnchorMode::Independent,
            AnchorArg::Shared => AnchorMode::Shared,
            AnchorArg::Identity => AnchorMode::Identity,
        },
        execution: if args.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        ..FuzzConfig::default()
    };
    let summary = cofix::oracle::fuzz(&config).map_err(|e| Failure::failed("fuzz", e))?;
    let dumps: Vec<Value> = summary
        .disagreements
        .iter()
        .map(|d| {
            let file = ProblemFile::from_parts(&d.instance.space, &d.instance.maps, Some(d.instance.coefficients));
            json!({ "start": d.start, "expected": d.expected, "got": d.got, "recipe": d.instance.recipe, "problem": file })
        })
        .collect();
    Ok(Reported {
        code: if summary.all_agree() { EXIT_PASS } else { EXIT_FAIL },
        seed: Some(args.seed),
        human: render::fuzz(&summary, &dumps),
        report: json!({
            "config": config,
            "generated": summary.generated,
            "verified": summary.verified,
            "unverified": summary.unverified,
            "solver_runs": summary.solver_runs,
            "agreements": summary.agreements,
            "worst_step_excess": summary.worst_step_excess,
            "worst_bound_excess": summary.worst_bound_excess,
            "disagreements": dumps,
        }),
    })
}
