//! Berinde-type contractive conditions for two, three and four mappings.
//!
//! All three conditions share one shape. For a pair `(x, y)` pick anchors
//! `u` and `v`:
//!
//! | condition | `u`   | `v`   |
//! |-----------|-------|-------|
//! | two maps  | `x`   | `y`   |
//! | three     | `fx`  | `fy`  |
//! | four      | `fx`  | `gy`  |
//!
//! and require
//!
//! ```text
//! d(Sx, Ty) <= α d(u, Sx) + β d(v, Ty) + γ d(u, v)
//!            + δ [d(v, Sx) + d(u, Ty)]
//!            + L min{d(u, Sx), d(v, Ty), d(v, Sx), d(u, Ty)}
//! ```
//!
//! The right-hand side is linear in `(α, β, γ, δ, L)`, which is what makes
//! [`synthesize_coefficients`] a linear feasibility problem.

mod synthesis;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapping::{numerical_rank, AffineMap, Arity, Mapping, MappingError, MappingSet, Role};
use crate::metric::{CheckMode, FiniteSpace, MetricError, MetricSpace, Point};
use crate::par::{self, Execution, Scored};

pub use synthesis::{synthesize_coefficients, Synthesis, SynthesisError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundViolation {
    #[error("{name} = {value} is outside [0, 1)")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("L = {0} must be a finite nonnegative number")]
    NegativeL(f64),
    #[error("alpha + beta + gamma + 2 delta = {0} is not < 1")]
    Budget(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContractionError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Bound(#[from] BoundViolation),
    #[error("exhaustive pair scans need a finite space")]
    ExhaustiveOnInfinite,
    #[error("invalid sampler: {0}")]
    InvalidSampler(String),
    #[error("range inclusions are only defined for three or four mappings")]
    InclusionArity,
}

/// The coefficient tuple `(α, β, γ, δ, L)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl Coefficients {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, l: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
            l,
        }
    }

    /// `α + β + γ + 2δ`
    pub fn budget(&self) -> f64 {
        self.alpha + self.beta + self.gamma + 2.0 * self.delta
    }

    pub fn validate(self) -> Result<Self, BoundViolation> {
        for (name, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !(0.0..1.0).contains(&value) {
                return Err(BoundViolation::OutOfRange { name, value });
            }
        }
        if !(self.l.is_finite() && self.l >= 0.0) {
            return Err(BoundViolation::NegativeL(self.l));
        }
        let budget = self.budget();
        if budget >= 1.0 {
            return Err(BoundViolation::Budget(budget));
        }
        Ok(self)
    }
}

pub fn validate_coefficients(c: Coefficients) -> Result<Coefficients, BoundViolation> {
    c.validate()
}

/// Which inequality is being checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `S, T` with anchors `x, y`.
    TwoMaps,
    /// `S, T, f` with anchors `fx, fy`.
    ThreeMaps,
    /// `S, T, f, g` with anchors `fx, gy`.
    FourMaps,
}

impl Condition {
    pub fn for_arity(arity: Arity) -> Self {
        match arity {
            Arity::Two => Condition::TwoMaps,
            Arity::Three => Condition::ThreeMaps,
            Arity::Four => Condition::FourMaps,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::TwoMaps => "d(Sx,Ty) bound over (x, y)",
            Condition::ThreeMaps => "d(Sx,Ty) bound over (fx, fy)",
            Condition::FourMaps => "d(Sx,Ty) bound over (fx, gy)",
        })
    }
}

/// The maps entering one condition: `S`, `T` and the anchor maps on each
/// side (`None` means identity).
#[derive(Clone, Copy, Debug)]
pub struct ConditionMaps<'a> {
    pub condition: Condition,
    pub s: &'a Mapping,
    pub t: &'a Mapping,
    pub x_anchor: Option<&'a Mapping>,
    pub y_anchor: Option<&'a Mapping>,
}

impl<'a> ConditionMaps<'a> {
    pub fn two(s: &'a Mapping, t: &'a Mapping) -> Self {
        Self {
            condition: Condition::TwoMaps,
            s,
            t,
            x_anchor: None,
            y_anchor: None,
        }
    }

    pub fn three(s: &'a Mapping, t: &'a Mapping, f: &'a Mapping) -> Self {
        Self {
            condition: Condition::ThreeMaps,
            s,
            t,
            x_anchor: Some(f),
            y_anchor: Some(f),
        }
    }

    pub fn four(s: &'a Mapping, t: &'a Mapping, f: &'a Mapping, g: &'a Mapping) -> Self {
        Self {
            condition: Condition::FourMaps,
            s,
            t,
            x_anchor: Some(f),
            y_anchor: Some(g),
        }
    }

    pub fn from_set(maps: &'a MappingSet) -> Result<Self, MappingError> {
        Ok(match maps.arity {
            Arity::Two => Self::two(&maps.s, &maps.t),
            Arity::Three => Self::three(&maps.s, &maps.t, maps.f()?),
            Arity::Four => Self::four(&maps.s, &maps.t, maps.f()?, maps.g()?),
        })
    }

    fn validate(&self, space: &MetricSpace) -> Result<(), MappingError> {
        self.s.check_total(space, Role::S)?;
        self.t.check_total(space, Role::T)?;
        if let Some(f) = self.x_anchor {
            f.check_total(space, Role::F)?;
        }
        if let Some(g) = self.y_anchor {
            g.check_total(space, Role::G)?;
        }
        Ok(())
    }
}

/// The left-hand side and the five right-hand distance groups of a
/// condition at one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Terms {
    /// `d(Sx, Ty)`
    pub lhs: f64,
    /// `d(u, Sx)`
    pub own_x: f64,
    /// `d(v, Ty)`
    pub own_y: f64,
    /// `d(u, v)`
    pub cross: f64,
    /// `d(v, Sx) + d(u, Ty)`
    pub mixed: f64,
    /// `min{d(u, Sx), d(v, Ty), d(v, Sx), d(u, Ty)}`
    pub min: f64,
}

impl Terms {
    fn from_distances(lhs: f64, own_x: f64, own_y: f64, cross: f64, v_sx: f64, u_ty: f64) -> Self {
        Self {
            lhs,
            own_x,
            own_y,
            cross,
            mixed: v_sx + u_ty,
            min: own_x.min(own_y).min(v_sx).min(u_ty),
        }
    }

    pub fn rhs(&self, c: &Coefficients) -> f64 {
        c.alpha * self.own_x
            + c.beta * self.own_y
            + c.gamma * self.cross
            + c.delta * self.mixed
            + c.l * self.min
    }

    /// `lhs - rhs`; the condition holds at this pair iff this is `<= 0`.
    pub fn margin(&self, c: &Coefficients) -> f64 {
        self.lhs - self.rhs(c)
    }
}

/// Distance terms of a condition at `(x, y)`.
pub fn condition_terms(
    space: &MetricSpace,
    maps: &ConditionMaps<'_>,
    x: &Point,
    y: &Point,
) -> Result<Terms, ContractionError> {
    space.contains(x)?;
    space.contains(y)?;
    maps.validate(space)?;
    Ok(terms_unchecked(space, maps, x, y))
}

fn terms_unchecked(space: &MetricSpace, maps: &ConditionMaps<'_>, x: &Point, y: &Point) -> Terms {
    if let (MetricSpace::Finite(fs), Point::Index(i), Point::Index(j)) = (space, x, y) {
        return FiniteMaps::new(maps).terms(fs, *i, *j);
    }
    let sx = maps.s.apply_unchecked(x);
    let ty = maps.t.apply_unchecked(y);
    let u = maps.x_anchor.map_or_else(|| x.clone(), |f| f.apply_unchecked(x));
    let v = maps.y_anchor.map_or_else(|| y.clone(), |g| g.apply_unchecked(y));
    let d = |a: &Point, b: &Point| space.distance_unchecked(a, b);
    Terms::from_distances(d(&sx, &ty), d(&u, &sx), d(&v, &ty), d(&u, &v), d(&v, &sx), d(&u, &ty))
}

/// Index-table view of [`ConditionMaps`] for the finite fast path.
struct FiniteMaps<'a> {
    s: &'a [usize],
    t: &'a [usize],
    fx: Option<&'a [usize]>,
    gy: Option<&'a [usize]>,
}

impl<'a> FiniteMaps<'a> {
    fn new(maps: &ConditionMaps<'a>) -> Self {
        let table = |m: &'a Mapping| m.table().expect("finite space uses table maps");
        Self {
            s: table(maps.s),
            t: table(maps.t),
            fx: maps.x_anchor.map(table),
            gy: maps.y_anchor.map(table),
        }
    }

    #[inline]
    fn terms(&self, space: &FiniteSpace, x: usize, y: usize) -> Terms {
        let (sx, ty) = (self.s[x], self.t[y]);
        let u = self.fx.map_or(x, |f| f[x]);
        let v = self.gy.map_or(y, |g| g[y]);
        let d = |a, b| space.d(a, b);
        Terms::from_distances(d(sx, ty), d(u, sx), d(v, ty), d(u, v), d(v, sx), d(u, ty))
    }
}

/// `α d(x,Sx) + β d(y,Ty) + γ d(x,y) + δ[d(y,Sx) + d(x,Ty)] + L min{..}`
pub fn rhs_two(
    c: &Coefficients,
    space: &MetricSpace,
    s: &Mapping,
    t: &Mapping,
    x: &Point,
    y: &Point,
) -> Result<f64, ContractionError> {
    Ok(condition_terms(space, &ConditionMaps::two(s, t), x, y)?.rhs(c))
}

/// Per-axis sampling bounds: either one `[lo, hi]` for every coordinate or
/// one interval per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleBox {
    Uniform([f64; 2]),
    PerAxis(Vec<[f64; 2]>),
}

impl SampleBox {
    pub fn axes(&self, dimension: usize) -> Result<Vec<[f64; 2]>, ContractionError> {
        let axes = match self {
            SampleBox::Uniform(b) => vec![*b; dimension],
            SampleBox::PerAxis(v) => {
                if v.len() != dimension {
                    return Err(ContractionError::InvalidSampler(format!(
                        "box has {} axes, space has dimension {dimension}",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        for [lo, hi] in &axes {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(ContractionError::InvalidSampler(format!(
                    "bad interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(axes)
    }
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox::Uniform([-1.0, 1.0])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub samples: usize,
    pub seed: u64,
    #[serde(rename = "box", default)]
    pub bounds: SampleBox,
}

/// Where the pairs of a condition check come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairSourceRepr", into = "PairSourceRepr")]
pub enum PairSource {
    /// Every ordered pair of a finite universe.
    Exhaustive,
    /// Seeded uniform pairs (index pairs on finite spaces, points in the
    /// box on Euclidean spaces).
    Sampled(Sampler),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PairSourceRepr {
    Keyword(String),
    Sampled(Sampler),
}

impl TryFrom<PairSourceRepr> for PairSource {
    type Error = String;
    fn try_from(r: PairSourceRepr) -> Result<Self, String> {
        match r {
            PairSourceRepr::Keyword(k) if k == "exhaustive" => Ok(PairSource::Exhaustive),
            PairSourceRepr::Keyword(k) => Err(format!("unknown pair source {k:?}")),
            PairSourceRepr::Sampled(s) => Ok(PairSource::Sampled(s)),
        }
    }
}

impl From<PairSource> for PairSourceRepr {
    fn from(p: PairSource) -> Self {
        match p {
            PairSource::Exhaustive => PairSourceRepr::Keyword("exhaustive".into()),
            PairSource::Sampled(s) => PairSourceRepr::Sampled(s),
        }
    }
}

impl PairSource {
    pub fn sampled(samples: usize, seed: u64, bounds: SampleBox) -> Self {
        PairSource::Sampled(Sampler {
            samples,
            seed,
            bounds,
        })
    }

    /// Exhaustive on finite spaces, a default sampler otherwise.
    pub fn default_for(space: &MetricSpace) -> Self {
        match space {
            MetricSpace::Finite(_) => PairSource::Exhaustive,
            MetricSpace::Euclidean(_) => PairSource::sampled(10_000, 0, SampleBox::default()),
        }
    }
}

/// Draws the pairs of a sampler deterministically from its seed.
pub fn sample_pairs(
    space: &MetricSpace,
    sampler: &Sampler,
) -> Result<Vec<(Point, Point)>, ContractionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    match space {
        MetricSpace::Finite(fs) => {
            let n = fs.len();
            Ok((0..sampler.samples)
                .map(|_| {
                    (
                        Point::Index(rng.random_range(0..n)),
                        Point::Index(rng.random_range(0..n)),
                    )
                })
                .collect())
        }
        MetricSpace::Euclidean(e) => {
            let axes = sampler.bounds.axes(e.dimension())?;
            let mut draw = || -> Point {
                Point::Vector(
                    axes.iter()
                        .map(|&[lo, hi]| if lo == hi { lo } else { rng.random_range(lo..hi) })
                        .collect(),
                )
            };
            Ok((0..sampler.samples).map(|_| (draw(), draw())).collect())
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CheckOptions {
    /// Slack added to the right-hand side; `None` takes the space default.
    pub tolerance: Option<f64>,
    pub execution: Execution,
}

impl CheckOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance: Some(tolerance),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub condition: Condition,
    pub satisfied: bool,
    /// Pair maximising `lhs - rhs`; ties go to the lexicographically
    /// smallest pair (or the earliest sample).
    pub worst_pair: Option<(Point, Point)>,
    pub worst_lhs: f64,
    pub worst_rhs: f64,
    pub worst_margin: f64,
    pub pairs_checked: usize,
    pub mode: CheckMode,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub sample_box: Option<Vec<[f64; 2]>>,
}

/// Scans all pairs of `source`, keeping every pair's terms.
pub(crate) fn collect_terms(
    space: &MetricSpace,
    maps: &ConditionMaps<'_>,
    source: &PairSource,
    exec: Execution,
) -> Result<Vec<(Point, Point, Terms)>, ContractionError> {
    maps.validate(space)?;
    match (source, space) {
        (PairSource::Exhaustive, MetricSpace::Finite(fs)) => {
            let fm = FiniteMaps::new(maps);
            let n = fs.len();
            let rows = par::map_indices(exec, n, |i| {
                (0..n)
                    .map(|j| (Point::Index(i), Point::Index(j), fm.terms(fs, i, j)))
                    .collect::<Vec<_>>()
            });
            Ok(rows.into_iter().flatten().collect())
        }
        (PairSource::Exhaustive, MetricSpace::Euclidean(_)) => {
            Err(ContractionError::ExhaustiveOnInfinite)
        }
        (PairSource::Sampled(sampler), _) => {
            let pairs = sample_pairs(space, sampler)?;
            Ok(par::map_indices(exec, pairs.len(), |k| {
                let (x, y) = &pairs[k];
                (x.clone(), y.clone(), terms_unchecked(space, maps, x, y))
            }))
        }
    }
}

/// Checks a condition over a pair source and reports the worst pair.
pub fn check_condition(
    space: &MetricSpace,
    maps: &ConditionMaps<'_>,
    c: &Coefficients,
    source: &PairSource,
    opts: CheckOptions,
) -> Result<ViolationReport, ContractionError> {
    maps.validate(space)?;
    let tol = opts.tolerance.unwrap_or_else(|| space.default_tolerance());
    let exec = opts.execution;
    let condition = maps.condition;

    let (worst, pairs_checked, mode, seed, sample_box) = match (source, space) {
        (PairSource::Exhaustive, MetricSpace::Finite(fs)) => {
            let fm = FiniteMaps::new(maps);
            let n = fs.len();
            let worst = par::argmax(exec, n, |i| {
                par::fold_best((0..n).map(|j| {
                    let terms = fm.terms(fs, i, j);
                    Scored {
                        key: (i, j),
                        score: terms.margin(c),
                    }
                }))
            })
            .map(|w| {
                let (i, j) = w.key;
                (Point::Index(i), Point::Index(j), fm.terms(fs, i, j))
            });
            (worst, n * n, CheckMode::Exhaustive, None, None)
        }
        (PairSource::Exhaustive, MetricSpace::Euclidean(_)) => {
            return Err(ContractionError::ExhaustiveOnInfinite)
        }
        (PairSource::Sampled(sampler), _) => {
            let pairs = sample_pairs(space, sampler)?;
            let worst = par::argmax(exec, pairs.len(), |k| {
                let (x, y) = &pairs[k];
                Some(Scored {
                    key: k,
                    score: terms_unchecked(space, maps, x, y).margin(c),
                })
            })
            .map(|w| {
                let (x, y) = pairs[w.key].clone();
                let terms = terms_unchecked(space, maps, &x, &y);
                (x, y, terms)
            });
            let sample_box = match space {
                MetricSpace::Euclidean(e) => Some(sampler.bounds.axes(e.dimension())?),
                MetricSpace::Finite(_) => None,
            };
            (
                worst,
                pairs.len(),
                CheckMode::Sampled,
                Some(sampler.seed),
                sample_box,
            )
        }
    };

    let (worst_pair, worst_lhs, worst_rhs, worst_margin) = match worst {
        Some((x, y, terms)) => (Some((x, y)), terms.lhs, terms.rhs(c), terms.margin(c)),
        None => (None, 0.0, 0.0, 0.0),
    };
    Ok(ViolationReport {
        condition,
        satisfied: worst_margin <= tol,
        worst_pair,
        worst_lhs,
        worst_rhs,
        worst_margin,
        pairs_checked,
        mode,
        tolerance: tol,
        seed,
        sample_box,
    })
}

pub fn check_condition_two(
    space: &MetricSpace,
    s: &Mapping,
    t: &Mapping,
    c: &Coefficients,
    source: &PairSource,
    opts: CheckOptions,
) -> Result<ViolationReport, ContractionError> {
    check_condition(space, &ConditionMaps::two(s, t), c, source, opts)
}

pub fn check_condition_three(
    space: &MetricSpace,
    s: &Mapping,
    t: &Mapping,
    f: &Mapping,
    c: &Coefficients,
    source: &PairSource,
    opts: CheckOptions,
) -> Result<ViolationReport, ContractionError> {
    check_condition(space, &ConditionMaps::three(s, t, f), c, source, opts)
}

#[allow(clippy::too_many_arguments)]
pub fn check_condition_four(
    space: &MetricSpace,
    s: &Mapping,
    t: &Mapping,
    f: &Mapping,
    g: &Mapping,
    c: &Coefficients,
    source: &PairSource,
    opts: CheckOptions,
) -> Result<ViolationReport, ContractionError> {
    check_condition(space, &ConditionMaps::four(s, t, f, g), c, source, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionCheck {
    /// e.g. `"SX ⊆ fX"`.
    pub relation: String,
    pub holds: bool,
    /// A point `x` whose image escapes the target set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Point>,
    /// The escaping value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escaping_value: Option<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub holds: bool,
    pub checks: Vec<InclusionCheck>,
}

/// Checks `SX ∪ TX ⊆ fX` (three maps) or `SX, TX ⊆ fX = gX` (four maps).
///
/// Finite images are enumerated exactly. For affine maps the inclusion
/// `AX ⊆ BX` is decided by column-space rank tests and a failing basis
/// point (the origin or a unit vector) is returned as witness.
pub fn check_range_inclusions(
    space: &MetricSpace,
    maps: &MappingSet,
) -> Result<InclusionReport, ContractionError> {
    maps.validate(space)?;
    let f = match maps.arity {
        Arity::Two => return Err(ContractionError::InclusionArity),
        _ => maps.f()?,
    };
    let mut checks = vec![
        inclusion(space, &maps.s, f, "SX ⊆ fX"),
        inclusion(space, &maps.t, f, "TX ⊆ fX"),
    ];
    if maps.arity == Arity::Four {
        let g = maps.g()?;
        checks.push(inclusion(space, f, g, "fX ⊆ gX"));
        checks.push(inclusion(space, g, f, "gX ⊆ fX"));
    }
    Ok(InclusionReport {
        holds: checks.iter().all(|c| c.holds),
        checks,
    })
}

fn inclusion(space: &MetricSpace, inner: &Mapping, outer: &Mapping, relation: &str) -> InclusionCheck {
    let witness = match (inner, outer) {
        (Mapping::Table(a), Mapping::Table(b)) => {
            let mut in_image = vec![false; b.len()];
            for &y in b {
                in_image[y] = true;
            }
            a.iter()
                .position(|&y| !in_image[y])
                .map(|x| (Point::Index(x), Point::Index(a[x])))
        }
        (Mapping::Affine(a), Mapping::Affine(b)) => affine_escape(a, b).map(|x| {
            let value = a.apply(&x);
            (Point::Vector(x), Point::Vector(value))
        }),
        _ => unreachable!("maps validated against {:?}", space.flavor()),
    };
    match witness {
        None => InclusionCheck {
            relation: relation.into(),
            holds: true,
            witness: None,
            escaping_value: None,
        },
        Some((x, y)) => InclusionCheck {
            relation: relation.into(),
            holds: false,
            witness: Some(x),
            escaping_value: Some(y),
        },
    }
}

fn in_column_space(basis: &nalgebra::DMatrix<f64>, v: &nalgebra::DVector<f64>) -> bool {
    let r = numerical_rank(basis);
    let mut aug = basis.clone().insert_column(basis.ncols(), 0.0);
    aug.set_column(basis.ncols(), v);
    numerical_rank(&aug) == r
}

/// A point `x` with `inner(x)` outside the image of `outer`, if any.
fn affine_escape(inner: &AffineMap, outer: &AffineMap) -> Option<Vec<f64>> {
    let m = inner.dimension();
    let shift = inner.offset() - outer.offset();
    if !in_column_space(outer.matrix(), &shift) {
        return Some(vec![0.0; m]);
    }
    (0..m)
        .find(|&j| !in_column_space(outer.matrix(), &inner.matrix().column(j).into_owned()))
        .map(|j| {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            e
        })
}
