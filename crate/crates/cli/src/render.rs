//! Plain-text rendering of command reports.

use std::fmt::Write;

use serde_json::Value;

use cofix::contraction::{Coefficients, ViolationReport};
use cofix::metric::{MetricSpace, Point};
use cofix::oracle::{FuzzSummary, OracleResult};
use cofix::reduction::{CoincidenceReport, ReductionWitness, Restriction, StageEntry};
use cofix::solver::{SolveReport, TwoMapOutcome};

use crate::commands::{CheckReport, CoefficientInfo, CoefficientOrigin};

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Shows finite points by label when the space has labels.
fn pt(space: &MetricSpace, p: &Point) -> String {
    match (space.as_finite(), p) {
        (Some(fs), Point::Index(i)) if fs.labels().is_some() && *i < fs.len() => fs.label(*i),
        _ => p.to_string(),
    }
}

fn coeffs(c: &Coefficients) -> String {
    format!(
        "alpha={} beta={} gamma={} delta={} L={}",
        short(c.alpha),
        short(c.beta),
        short(c.gamma),
        short(c.delta),
        short(c.l)
    )
}

fn short(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 10 {
        plain
    } else {
        format!("{x:.6e}")
    }
}

fn coefficient_line(out: &mut String, info: &CoefficientInfo) {
    let origin = match info.origin {
        CoefficientOrigin::File => "given",
        CoefficientOrigin::Synthesized => "synthesized",
    };
    match (&info.coefficients, &info.error) {
        (Some(c), None) => {
            let _ = writeln!(out, "coefficients      {origin}: {} (budget {})", coeffs(c), short(c.budget()));
        }
        (_, Some(e)) => {
            let _ = writeln!(out, "coefficients      FAIL ({origin}): {e}");
        }
        (None, None) => {
            let _ = writeln!(out, "coefficients      none");
        }
    }
}

fn condition_line(out: &mut String, space: &MetricSpace, r: &ViolationReport) {
    let mode = format!("{:?}", r.mode).to_lowercase();
    let _ = write!(out, "condition         {} over {} pairs ({mode}", verdict(r.satisfied), r.pairs_checked);
    if let Some(seed) = r.seed {
        let _ = write!(out, ", seed {seed}");
    }
    let _ = writeln!(out, ")");
    if let Some((x, y)) = &r.worst_pair {
        let rel = if r.satisfied { "<=" } else { ">" };
        let _ = writeln!(
            out,
            "  worst pair      ({}, {}): lhs {} {rel} rhs {} (margin {:.3e})",
            pt(space, x),
            pt(space, y),
            short(r.worst_lhs),
            short(r.worst_rhs),
            r.worst_margin
        );
    }
}

pub fn check(space: &MetricSpace, r: &CheckReport) -> String {
    let mut out = String::new();
    let mode = format!("{:?}", r.axioms.mode).to_lowercase();
    let _ = writeln!(out, "metric axioms     {} ({mode})", verdict(r.axioms.passed));
    for c in r.axioms.checks.iter().filter(|c| !c.passed) {
        let witness: Vec<String> = c.witness.iter().flatten().map(|p| pt(space, p)).collect();
        let _ = writeln!(out, "  {:?} violated at ({}) by {:e}", c.axiom, witness.join(", "), c.magnitude);
    }
    coefficient_line(&mut out, &r.coefficients);
    if let Some(c) = &r.condition {
        condition_line(&mut out, space, c);
    }
    if let Some(inc) = &r.inclusions {
        let _ = writeln!(out, "range inclusions  {}", verdict(inc.holds));
        for c in &inc.checks {
            let _ = write!(out, "  {:<15} {}", c.relation, if c.holds { "holds" } else { "fails" });
            if let (Some(x), Some(v)) = (&c.witness, &c.escaping_value) {
                let _ = write!(out, ": image of {} is {}", pt(space, x), pt(space, v));
            }
            let _ = writeln!(out);
        }
    }
    for w in &r.weak_compatibility {
        let _ = writeln!(
            out,
            "weakly compatible {} {}",
            w.pair,
            if w.compatible { "yes" } else { "no" }
        );
    }
    let _ = writeln!(out, "assumptions       {}", verdict(r.assumptions_hold));
    let _ = writeln!(out, "result            {}", if r.passed { "PASS" } else { "FAIL" });
    out
}

fn solve_block(out: &mut String, space: &MetricSpace, r: &SolveReport, trace: bool) {
    let status = serde_json::to_value(&r.status).expect("status serializes");
    let _ = writeln!(out, "status            {}", status["status"].as_str().unwrap_or("?"));
    if let Some(v) = status.get("violation") {
        let _ = writeln!(out, "  at step {}: {v}", status["step"]);
    }
    let _ = writeln!(out, "rate k            {}", short(r.rate_k));
    let _ = writeln!(out, "iterations        {}", r.iterations);
    let _ = writeln!(out, "limit             {}", pt(space, &r.limit));
    let _ = writeln!(out, "residuals         d(z, Sz) = {:e}, d(z, Tz) = {:e}", r.residual_s, r.residual_t);
    let _ = writeln!(out, "error bound       {:e}", r.aposteriori_bound);
    if trace {
        let _ = writeln!(out, "trace");
        for (n, x) in r.trace.iterates.iter().enumerate() {
            let step = r.trace.steps.get(n).map_or(String::new(), |d| format!("  step {d:e}"));
            let bound = r.apriori_bounds.get(n).map_or(String::new(), |b| format!("  bound {b:e}"));
            let _ = writeln!(out, "  x{n:<5} {}{step}{bound}", pt(space, x));
        }
    }
}

pub fn solve(space: &MetricSpace, info: &CoefficientInfo, o: &TwoMapOutcome, trace: bool) -> String {
    let mut out = String::new();
    coefficient_line(&mut out, info);
    condition_line(&mut out, space, &o.hypotheses);
    let _ = writeln!(out, "uniqueness        {:?}", o.uniqueness);
    solve_block(&mut out, space, &o.solve, trace);
    out
}

pub fn stages(entries: &[StageEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let _ = writeln!(out, "{:<23} {}  {}", e.stage.to_string(), verdict(e.passed), e.detail);
    }
    out
}

pub fn pipeline(space: &MetricSpace, info: &CoefficientInfo, r: &CoincidenceReport, trace: bool) -> String {
    let mut out = String::new();
    coefficient_line(&mut out, info);
    condition_line(&mut out, space, &r.hypotheses);
    out.push_str(&stages(&r.stages));
    let _ = writeln!(out, "induced iteration (local coordinates of the image)");
    let mut inner = String::new();
    solve_block(&mut inner, &r.witness.induced_space, &r.induced_solve, trace);
    for line in inner.lines() {
        let _ = writeln!(out, "  {line}");
    }
    let show = |p: &Option<Point>| p.as_ref().map_or("-".to_string(), |p| pt(space, p));
    let _ = writeln!(out, "coincidence point {}", show(&r.coincidence_point));
    if r.coincidence_point_g.is_some() {
        let _ = writeln!(out, "  (for T, g)      {}", show(&r.coincidence_point_g));
    }
    let _ = writeln!(out, "point of coinc.   {}", show(&r.point_of_coincidence));
    for w in &r.weak_compatibility {
        let _ = writeln!(out, "weakly compatible {} {}", w.pair, if w.compatible { "yes" } else { "no" });
    }
    let _ = writeln!(out, "outcome           {:?}", r.outcome);
    let _ = writeln!(out, "common fixed pt.  {}", show(&r.common_fixed_point));
    out
}

fn restriction_line(out: &mut String, name: &str, space: &MetricSpace, r: &Restriction) {
    match r {
        Restriction::Finite { subset, image, .. } => {
            let list = |v: &[usize]| v.iter().map(|&i| pt(space, &Point::Index(i))).collect::<Vec<_>>().join(", ");
            let _ = writeln!(out, "{name:<17} E = {{{}}}, image = {{{}}}", list(subset), list(image));
        }
        Restriction::Affine { .. } => {
            let _ = writeln!(out, "{name:<17} whole space (invertible affine map)");
        }
    }
}

pub fn reduce(space: &MetricSpace, w: &ReductionWitness, commutes: bool) -> String {
    let mut out = String::new();
    restriction_line(&mut out, "restriction of f", space, &w.restriction);
    if let Some(r) = &w.restriction_g {
        restriction_line(&mut out, "restriction of g", space, r);
    }
    let describe = |m: &cofix::mapping::Mapping| match m.table() {
        Some(t) => format!("{t:?}"),
        None => serde_json::to_string(m).unwrap_or_default(),
    };
    let _ = writeln!(out, "induced first     {}", describe(&w.induced_s));
    let _ = writeln!(out, "induced second    {}", describe(&w.induced_t));
    let _ = writeln!(out, "commuting square  {}", verdict(commutes));
    out
}

pub fn oracle(space: &MetricSpace, r: &OracleResult) -> String {
    let mut out = String::new();
    let list = |v: &[usize]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.iter().map(|&i| pt(space, &Point::Index(i))).collect::<Vec<_>>().join(", ")
        }
    };
    for f in &r.fixed_points {
        let _ = writeln!(out, "fixed points of {}  {}", f.role, list(&f.points));
    }
    let _ = writeln!(out, "common fixed      {}", list(&r.common_fixed_points));
    for rel in &r.coincidence.relations {
        let _ = writeln!(out, "{:<17} at {}; values {}", rel.relation, list(&rel.points), list(&rel.values));
    }
    let _ = writeln!(out, "points of coinc.  {}", list(&r.coincidence.points_of_coincidence));
    if let Some(c) = &r.condition {
        condition_line(&mut out, space, c);
    }
    out
}

pub fn fuzz(s: &FuzzSummary, dumps: &[Value]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "instances         {} ({} verified, {} unverified)", s.generated, s.verified, s.unverified);
    let _ = writeln!(out, "solver runs       {}", s.solver_runs);
    let _ = writeln!(out, "agreements        {}", s.agreements);
    let _ = writeln!(out, "disagreements     {}", s.disagreements.len());
    let _ = writeln!(out, "worst step excess {:e}", s.worst_step_excess);
    let _ = writeln!(out, "worst bound gap   {:e}", s.worst_bound_excess);
    for d in dumps {
        let _ = writeln!(out, "--- disagreement\n{}", serde_json::to_string_pretty(d).unwrap_or_default());
    }
    out
}
