//! Reducing three and four mappings to the two-map problem.
//!
//! On a finite space `f` is restricted to a set `E` on which it is
//! one-to-one with `f(E) = f(X)`, picking the smallest preimage of every
//! image value. The induced maps `g(fx) = Sx`, `h(fx) = Tx` then live on the
//! image `fE`, and a fixed point of the induced pair pulls back through the
//! section to a coincidence point of the original maps. Weak compatibility
//! (commuting at coincidence points) lifts that to a common fixed point.
//!
//! On a Euclidean space `f` must be an invertible affine map: `E` is the
//! whole space, the section is `f⁻¹` and the induced maps are `S∘f⁻¹`,
//! `T∘f⁻¹`.

mod pipeline;

pub use pipeline::{
    solve_four, solve_four_coincidence, solve_three, solve_three_coincidence, CoincidenceReport,
    Outcome, PipelineError, PipelineMode, ReductionOptions, Stage, StageEntry,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::{check_range_inclusions, BoundViolation, ContractionError, InclusionCheck};
use crate::mapping::{AffineMap, Arity, Mapping, MappingError, MappingSet, Role, RANK_TOLERANCE};
use crate::metric::{MetricError, MetricSpace, Point};
use crate::par::{map_indices, Execution};
use crate::solver::SolveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Coefficients(#[from] BoundViolation),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("expected {expected} mappings, got {found}")]
    ArityMismatch { expected: Arity, found: Arity },
    #[error("range inclusion {relation} fails: {witness} is sent to {escaping_value}")]
    RangeInclusionFailure {
        relation: String,
        witness: Point,
        escaping_value: Point,
    },
    #[error("fX and gX differ ({relation} fails at {witness}, value {escaping_value})")]
    ImageMismatch {
        relation: String,
        witness: Point,
        escaping_value: Point,
    },
    #[error("points of coincidence of {pair} are not unique: {}", fmt_points(.values))]
    NonUniqueCoincidence { pair: String, values: Vec<Point> },
    #[error("pulling {fz} back through the section does not give a coincidence point")]
    PullBackFailed { fz: Point },
    #[error("lift of {v} fails: T v = {tv}, f v = {fv}")]
    LiftMismatch { v: Point, tv: Point, fv: Point },
    #[error("the two lifts disagree: {first} vs {second}")]
    LiftDisagreement { first: Point, second: Point },
    #[error("the space is declared incomplete")]
    IncompleteSpace,
}

fn fmt_points(points: &[Point]) -> String {
    points.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// A set `E` on which `f` is one-to-one with `f(E) = f(X)`, and the
/// section `fE -> E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Restriction {
    Finite {
        /// `E`, sorted.
        subset: Vec<usize>,
        /// `fE = fX`, sorted.
        image: Vec<usize>,
        /// `section[k]` is the chosen preimage of `image[k]`.
        section: Vec<usize>,
    },
    /// `E` is the whole space and the section is `f⁻¹`.
    Affine { inverse: AffineMap },
}

impl Restriction {
    /// Number of points of `E`, `None` for the Euclidean case.
    pub fn len(&self) -> Option<usize> {
        match self {
            Restriction::Finite { subset, .. } => Some(subset.len()),
            Restriction::Affine { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Chosen preimage of an image point given in the original space.
    pub fn preimage(&self, y: &Point) -> Option<Point> {
        match (self, y) {
            (Restriction::Finite { image, section, .. }, Point::Index(i)) => {
                image.binary_search(i).ok().map(|k| Point::Index(section[k]))
            }
            (Restriction::Affine { inverse }, Point::Vector(v)) => Some(Point::Vector(inverse.apply(v))),
            _ => None,
        }
    }

    /// Image point in the coordinates of the induced space.
    pub fn to_local(&self, y: &Point) -> Option<Point> {
        match (self, y) {
            (Restriction::Finite { image, .. }, Point::Index(i)) => image.binary_search(i).ok().map(Point::Index),
            (Restriction::Affine { .. }, Point::Vector(_)) => Some(y.clone()),
            _ => None,
        }
    }

    /// Induced-space point back in the coordinates of the original space.
    pub fn to_global(&self, local: &Point) -> Point {
        match (self, local) {
            (Restriction::Finite { image, .. }, Point::Index(k)) => Point::Index(image[*k]),
            _ => local.clone(),
        }
    }
}

/// Restricts `f` to a set on which it is one-to-one, choosing the smallest
/// preimage of each image value.
pub fn injective_restriction(space: &MetricSpace, f: &Mapping) -> Result<Restriction, ReductionError> {
    f.check_total(space, Role::F)?;
    match f {
        Mapping::Table(t) => {
            let mut first: Vec<Option<usize>> = vec![None; t.len()];
            for (x, &y) in t.iter().enumerate() {
                first[y].get_or_insert(x);
            }
            let (image, section): (Vec<usize>, Vec<usize>) = first
                .iter()
                .enumerate()
                .filter_map(|(y, x)| x.map(|x| (y, x)))
                .unzip();
            let mut subset = section.clone();
            subset.sort_unstable();
            Ok(Restriction::Finite {
                subset,
                image,
                section,
            })
        }
        Mapping::Affine(a) => Ok(Restriction::Affine {
            inverse: a.inverse()?,
        }),
    }
}

/// The induced pair on `fE` together with the restriction(s) that define it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionWitness {
    pub arity: Arity,
    /// Restriction of `f` (`E` or `E₁`).
    pub restriction: Restriction,
    /// Restriction of `g` (`E₂`), four maps only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction_g: Option<Restriction>,
    /// `fE` with the metric inherited from the original space.
    pub induced_space: MetricSpace,
    /// `g` (three maps) or `A` (four maps), on local coordinates of `fE`.
    pub induced_s: Mapping,
    /// `h` (three maps) or `B` (four maps).
    pub induced_t: Mapping,
}

impl ReductionWitness {
    /// Checks `g(f x) = S x` on `E` and `h(g' x) = T x` on `E₂` (or `E`).
    pub fn commutes(&self, space: &MetricSpace, maps: &MappingSet) -> bool {
        let f = maps.f().expect("witness built from three or four maps");
        let g = if maps.arity == Arity::Four { maps.g().expect("four maps") } else { f };
        let second = self.restriction_g.as_ref().unwrap_or(&self.restriction);
        let square = |r: &Restriction, anchor: &Mapping, original: &Mapping, induced: &Mapping| -> bool {
            match r {
                Restriction::Finite { subset, .. } => subset.iter().all(|&x| {
                    let x = Point::Index(x);
                    let local = r.to_local(&anchor.apply_unchecked(&x)).expect("f(E) lies in the image");
                    r.to_global(&induced.apply_unchecked(&local)) == original.apply_unchecked(&x)
                }),
                Restriction::Affine { .. } => {
                    // Both sides are affine, so agreement on 0 and the unit
                    // vectors is agreement everywhere.
                    let dim = anchor.affine().map_or(0, AffineMap::dimension);
                    (0..=dim).all(|j| {
                        let mut x = vec![0.0; dim];
                        if j < dim {
                            x[j] = 1.0;
                        }
                        let x = Point::Vector(x);
                        let lhs = induced.apply_unchecked(&anchor.apply_unchecked(&x));
                        space.points_equal(&lhs, &original.apply_unchecked(&x))
                    })
                }
            }
        };
        square(&self.restriction, f, &maps.s, &self.induced_s) && square(second, g, &maps.t, &self.induced_t)
    }
}

pub(crate) fn expect_arity(maps: &MappingSet, expected: Arity) -> Result<(), ReductionError> {
    if maps.arity != expected {
        return Err(ReductionError::ArityMismatch {
            expected,
            found: maps.arity,
        });
    }
    Ok(())
}

fn inclusion_failure(check: &InclusionCheck) -> ReductionError {
    let witness = check.witness.clone().expect("failed inclusion carries a witness");
    let escaping_value = check.escaping_value.clone().expect("failed inclusion carries a value");
    let relation = check.relation.clone();
    if check.relation.starts_with('f') || check.relation.starts_with('g') {
        ReductionError::ImageMismatch {
            relation,
            witness,
            escaping_value,
        }
    } else {
        ReductionError::RangeInclusionFailure {
            relation,
            witness,
            escaping_value,
        }
    }
}

fn check_inclusions(space: &MetricSpace, maps: &MappingSet) -> Result<(), ReductionError> {
    let report = check_range_inclusions(space, maps)?;
    match report.checks.iter().find(|c| !c.holds) {
        Some(failed) => Err(inclusion_failure(failed)),
        None => Ok(()),
    }
}

/// Induced table `k -> local(m(section[k]))` on the image of a finite
/// restriction.
fn induced_table(r: &Restriction, section: &[usize], m: &Mapping) -> Mapping {
    Mapping::Table(
        section
            .iter()
            .map(|&x| {
                let y = m.apply_unchecked(&Point::Index(x));
                r.to_local(&y)
                    .and_then(|p| p.index())
                    .expect("range inclusion was verified")
            })
            .collect(),
    )
}

fn induced_space(space: &MetricSpace, r: &Restriction) -> MetricSpace {
    match (space, r) {
        (MetricSpace::Finite(s), Restriction::Finite { image, .. }) => s.subspace(image).into(),
        _ => space.clone(),
    }
}

fn compose_inverse(m: &Mapping, r: &Restriction) -> Mapping {
    match (m, r) {
        (Mapping::Affine(a), Restriction::Affine { inverse }) => Mapping::Affine(a.compose(inverse)),
        _ => unreachable!("affine restriction only arises on Euclidean spaces"),
    }
}

/// Builds `g(fx) = Sx`, `h(fx) = Tx` on `fE` after verifying
/// `SX ∪ TX ⊆ fX`.
pub fn induce_three(
    space: &MetricSpace,
    maps: &MappingSet,
    restriction: &Restriction,
) -> Result<ReductionWitness, ReductionError> {
    expect_arity(maps, Arity::Three)?;
    check_inclusions(space, maps)?;
    let (induced_s, induced_t) = match restriction {
        Restriction::Finite { section, .. } => (
            induced_table(restriction, section, &maps.s),
            induced_table(restriction, section, &maps.t),
        ),
        Restriction::Affine { .. } => (compose_inverse(&maps.s, restriction), compose_inverse(&maps.t, restriction)),
    };
    Ok(ReductionWitness {
        arity: Arity::Three,
        restriction: restriction.clone(),
        restriction_g: None,
        induced_space: induced_space(space, restriction),
        induced_s,
        induced_t,
    })
}

/// Builds `A(fx) = Sx` on `fE₁` and `B(gx) = Tx` on `gE₂ = fE₁` after
/// verifying `SX, TX ⊆ fX` and `fX = gX`.
pub fn induce_four(
    space: &MetricSpace,
    maps: &MappingSet,
    restriction_f: &Restriction,
    restriction_g: &Restriction,
) -> Result<ReductionWitness, ReductionError> {
    expect_arity(maps, Arity::Four)?;
    check_inclusions(space, maps)?;
    let (induced_s, induced_t) = match (restriction_f, restriction_g) {
        (Restriction::Finite { section: s1, .. }, Restriction::Finite { section: s2, .. }) => (
            induced_table(restriction_f, s1, &maps.s),
            // fX = gX, so both restrictions share the sorted image and its
            // local coordinates.
            induced_table(restriction_f, s2, &maps.t),
        ),
        _ => (
            compose_inverse(&maps.s, restriction_f),
            compose_inverse(&maps.t, restriction_g),
        ),
    };
    Ok(ReductionWitness {
        arity: Arity::Four,
        restriction: restriction_f.clone(),
        restriction_g: Some(restriction_g.clone()),
        induced_space: induced_space(space, restriction_f),
        induced_s,
        induced_t,
    })
}

/// An affine set `particular + span(directions)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFamily {
    pub particular: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coincidence {
    pub point: Point,
    /// The common value `Tx = fx`.
    pub value: Point,
}

/// Solutions of `Tx = fx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoincidenceSet {
    Points { points: Vec<Coincidence> },
    /// A positive-dimensional affine solution set.
    Family { family: AffineFamily },
}

impl CoincidenceSet {
    pub fn points(&self) -> Option<&[Coincidence]> {
        match self {
            CoincidenceSet::Points { points } => Some(points),
            CoincidenceSet::Family { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points().is_some_and(<[_]>::is_empty)
    }
}

/// All `x` with `m(x) = f(x)` for every `(m, f)` in `pairs`.
pub(crate) fn joint_coincidence(
    space: &MetricSpace,
    pairs: &[(&Mapping, &Mapping)],
    exec: Execution,
) -> CoincidenceSet {
    match space {
        MetricSpace::Finite(s) => {
            let hits = map_indices(exec, s.len(), |x| {
                let p = Point::Index(x);
                let value = pairs[0].1.apply_unchecked(&p);
                pairs
                    .iter()
                    .all(|(m, f)| m.apply_unchecked(&p) == value && f.apply_unchecked(&p) == value)
                    .then_some(Coincidence { point: p, value })
            });
            CoincidenceSet::Points {
                points: hits.into_iter().flatten().collect(),
            }
        }
        MetricSpace::Euclidean(e) => {
            let affine: Vec<(&AffineMap, &AffineMap)> = pairs
                .iter()
                .map(|(m, f)| (m.affine().expect("validated"), f.affine().expect("validated")))
                .collect();
            affine_coincidence(&affine, e.point_tolerance(), pairs[0].1)
        }
    }
}

fn affine_coincidence(pairs: &[(&AffineMap, &AffineMap)], tol: f64, value_map: &Mapping) -> CoincidenceSet {
    let dim = pairs[0].0.dimension();
    let rows = dim * pairs.len();
    let mut m = DMatrix::zeros(rows, dim);
    let mut rhs = DVector::zeros(rows);
    for (k, (t, f)) in pairs.iter().enumerate() {
        m.view_mut((k * dim, 0), (dim, dim)).copy_from(&(t.matrix() - f.matrix()));
        rhs.rows_mut(k * dim, dim).copy_from(&(f.offset() - t.offset()));
    }
    let svd = m.clone().svd(true, true);
    let largest = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = RANK_TOLERANCE * largest.max(1.0);
    let x = match svd.solve(&rhs, cutoff) {
        Ok(x) => x,
        Err(_) => return CoincidenceSet::Points { points: vec![] },
    };
    if (&m * &x - &rhs).norm() > tol * (1.0 + rhs.norm()) {
        return CoincidenceSet::Points { points: vec![] };
    }
    let v_t = svd.v_t.expect("requested V^T");
    let directions: Vec<Vec<f64>> = (0..dim)
        .filter(|&i| svd.singular_values.get(i).is_none_or(|&s| s <= cutoff))
        .map(|i| v_t.row(i).iter().copied().collect())
        .collect();
    let particular: Vec<f64> = x.iter().copied().collect();
    if directions.is_empty() {
        let point = Point::Vector(particular);
        let value = value_map.apply_unchecked(&point);
        CoincidenceSet::Points {
            points: vec![Coincidence { point, value }],
        }
    } else {
        CoincidenceSet::Family {
            family: AffineFamily {
                particular,
                directions,
            },
        }
    }
}

/// All `x` with `Tx = fx`, with the common values.
pub fn coincidence_points(
    space: &MetricSpace,
    t: &Mapping,
    f: &Mapping,
) -> Result<CoincidenceSet, ReductionError> {
    t.check_total(space, Role::T)?;
    f.check_total(space, Role::F)?;
    Ok(joint_coincidence(space, &[(t, f)], Execution::default()))
}

/// Distinct values `f(x)` over a coincidence set, or `None` when they form
/// a continuum.
pub(crate) fn coincidence_values(
    space: &MetricSpace,
    set: &CoincidenceSet,
    f: &Mapping,
) -> Option<Vec<Point>> {
    match set {
        CoincidenceSet::Points { points } => {
            let mut values: Vec<Point> = Vec::new();
            for c in points {
                if !values.iter().any(|v| space.points_equal(v, &c.value)) {
                    values.push(c.value.clone());
                }
            }
            Some(values)
        }
        CoincidenceSet::Family { family } => {
            let a = f.affine().expect("families only arise for affine maps");
            let base = Point::Vector(a.apply(&family.particular));
            let constant = family.directions.iter().all(|d| {
                let shifted: Vec<f64> = family.particular.iter().zip(d).map(|(p, d)| p + d).collect();
                space.points_equal(&Point::Vector(a.apply(&shifted)), &base)
            });
            constant.then(|| vec![base])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakCompatibility {
    /// e.g. `"(S, f)"`.
    pub pair: String,
    pub compatible: bool,
    /// A coincidence point where `T f x ≠ f T x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Point>,
    pub coincidence_count: Option<usize>,
}

/// Whether `T` and `f` commute at every coincidence point.
pub fn is_weakly_compatible(
    space: &MetricSpace,
    t: &Mapping,
    f: &Mapping,
) -> Result<WeakCompatibility, ReductionError> {
    let set = coincidence_points(space, t, f)?;
    Ok(weak_compatibility_on(space, t, f, &set, "(T, f)"))
}

pub(crate) fn weak_compatibility_on(
    space: &MetricSpace,
    t: &Mapping,
    f: &Mapping,
    set: &CoincidenceSet,
    pair: &str,
) -> WeakCompatibility {
    let commutes = |x: &Point| {
        let tf = t.apply_unchecked(&f.apply_unchecked(x));
        let ft = f.apply_unchecked(&t.apply_unchecked(x));
        space.points_equal(&tf, &ft)
    };
    let (witness, count) = match set {
        CoincidenceSet::Points { points } => (
            points.iter().map(|c| &c.point).find(|x| !commutes(x)).cloned(),
            Some(points.len()),
        ),
        CoincidenceSet::Family { family } => {
            // `x -> T f x - f T x` is affine, so it vanishes on the family iff
            // it vanishes at the particular point and one step along each
            // direction.
            let base = Point::Vector(family.particular.clone());
            let witness = std::iter::once(base.clone())
                .chain(family.directions.iter().map(|d| {
                    Point::Vector(family.particular.iter().zip(d).map(|(p, d)| p + d).collect())
                }))
                .find(|x| !commutes(x));
            (witness, None)
        }
    };
    WeakCompatibility {
        pair: pair.into(),
        compatible: witness.is_none(),
        witness,
        coincidence_count: count,
    }
}

/// Passes from the point of coincidence `v` of a weakly compatible pair to
/// their common fixed point: `w = Tv` must equal `v` (and so must `fv`).
pub fn lift_to_common_fixed_point(
    space: &MetricSpace,
    t: &Mapping,
    f: &Mapping,
    v: &Point,
) -> Result<Point, ReductionError> {
    t.check_total(space, Role::T)?;
    f.check_total(space, Role::F)?;
    let tv = t.apply(space, v)?;
    let fv = f.apply_unchecked(v);
    if space.points_equal(&tv, v) && space.points_equal(&fv, v) {
        Ok(tv)
    } else {
        Err(ReductionError::LiftMismatch {
            v: v.clone(),
            tv,
            fv,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{EuclideanSpace, FiniteSpace};

    fn line(n: usize) -> MetricSpace {
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        FiniteSpace::on_line(&xs).unwrap().into()
    }

    fn t(v: &[usize]) -> Mapping {
        Mapping::Table(v.to_vec())
    }

    fn subset(r: &Restriction) -> Vec<usize> {
        match r {
            Restriction::Finite { subset, .. } => subset.clone(),
            _ => panic!("finite restriction expected"),
        }
    }

    #[test]
    fn restriction_examples() {
        let s = line(3);
        assert_eq!(subset(&injective_restriction(&s, &t(&[0, 1, 2])).unwrap()), vec![0, 1, 2]);
        assert_eq!(subset(&injective_restriction(&s, &t(&[0, 0, 0])).unwrap()), vec![0]);
        let r = injective_restriction(&s, &t(&[0, 0, 1])).unwrap();
        assert_eq!(
            r,
            Restriction::Finite {
                subset: vec![0, 2],
                image: vec![0, 1],
                section: vec![0, 2]
            }
        );
        assert_eq!(r.preimage(&Point::Index(1)), Some(Point::Index(2)));
        assert_eq!(r.preimage(&Point::Index(2)), None);
    }

    #[test]
    fn section_follows_image_order_not_subset_order() {
        let s = line(3);
        let r = injective_restriction(&s, &t(&[2, 0, 0])).unwrap();
        assert_eq!(
            r,
            Restriction::Finite {
                subset: vec![0, 1],
                image: vec![0, 2],
                section: vec![1, 0]
            }
        );
    }

    #[test]
    fn affine_restriction_needs_an_invertible_map() {
        let e: MetricSpace = EuclideanSpace::new(2).unwrap().into();
        let r = injective_restriction(&e, &Mapping::Affine(AffineMap::scaling(2, 2.0))).unwrap();
        assert_eq!(r.preimage(&Point::Vector(vec![2.0, 4.0])), Some(Point::Vector(vec![1.0, 2.0])));
        assert!(matches!(
            injective_restriction(&e, &Mapping::Affine(AffineMap::constant(vec![0.0, 0.0]))),
            Err(ReductionError::Mapping(MappingError::Singular { .. }))
        ));
    }

    #[test]
    fn induce_three_examples() {
        let s = line(3);
        let id = t(&[0, 1, 2]);
        let maps = MappingSet::three(t(&[0, 0, 1]), t(&[1, 1, 2]), id.clone());
        let w = induce_three(&s, &maps, &injective_restriction(&s, &id).unwrap()).unwrap();
        assert_eq!((w.induced_s.clone(), w.induced_t.clone()), (maps.s.clone(), maps.t.clone()));
        assert!(w.commutes(&s, &maps));

        let f = t(&[0, 0, 1]);
        let maps = MappingSet::three(t(&[0, 0, 0]), t(&[0, 0, 0]), f.clone());
        let w = induce_three(&s, &maps, &injective_restriction(&s, &f).unwrap()).unwrap();
        assert_eq!(w.induced_s, t(&[0, 0]));
        assert_eq!(w.induced_t, t(&[0, 0]));
        assert_eq!(w.induced_space.as_finite().unwrap().len(), 2);
        assert!(w.commutes(&s, &maps));
    }

    #[test]
    fn induce_three_rejects_escaping_ranges() {
        let s = line(2);
        let f = t(&[0, 0]);
        let maps = MappingSet::three(t(&[0, 1]), t(&[0, 0]), f.clone());
        let err = induce_three(&s, &maps, &injective_restriction(&s, &f).unwrap()).unwrap_err();
        assert_eq!(
            err,
            ReductionError::RangeInclusionFailure {
                relation: "SX ⊆ fX".into(),
                witness: Point::Index(1),
                escaping_value: Point::Index(1)
            }
        );
    }

    #[test]
    fn induce_four_examples() {
        let s = line(3);
        let id = t(&[0, 1, 2]);
        let zero = t(&[0, 0, 0]);
        let maps = MappingSet::four(zero.clone(), zero.clone(), id.clone(), id.clone());
        let r = injective_restriction(&s, &id).unwrap();
        let w = induce_four(&s, &maps, &r, &r).unwrap();
        assert_eq!((w.induced_s.clone(), w.induced_t.clone()), (zero.clone(), zero.clone()));

        // f = g reproduces the three-map construction.
        let f = t(&[0, 0, 1]);
        let r = injective_restriction(&s, &f).unwrap();
        let four = induce_four(&s, &MappingSet::four(zero.clone(), zero.clone(), f.clone(), f.clone()), &r, &r).unwrap();
        let three = induce_three(&s, &MappingSet::three(zero.clone(), zero.clone(), f.clone()), &r).unwrap();
        assert_eq!(four.induced_s, three.induced_s);
        assert_eq!(four.induced_t, three.induced_t);

        // f = [0,0,1], g = [1,0,0]: same image, different sections.
        let g = t(&[1, 0, 0]);
        let maps = MappingSet::four(zero.clone(), t(&[1, 0, 1]), f.clone(), g.clone());
        let w = induce_four(&s, &maps, &r, &injective_restriction(&s, &g).unwrap()).unwrap();
        assert_eq!(w.induced_t, t(&[0, 1]));
        assert!(w.commutes(&s, &maps));
    }

    #[test]
    fn induce_four_rejects_different_images() {
        let s = line(3);
        let f = t(&[0, 0, 1]);
        let g = t(&[0, 2, 2]);
        let zero = t(&[0, 0, 0]);
        let maps = MappingSet::four(zero.clone(), zero, f.clone(), g.clone());
        let err = induce_four(
            &s,
            &maps,
            &injective_restriction(&s, &f).unwrap(),
            &injective_restriction(&s, &g).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, ReductionError::ImageMismatch { .. }), "{err:?}");
    }

    #[test]
    fn coincidence_examples() {
        let s = line(3);
        let m = t(&[2, 0, 1]);
        assert_eq!(coincidence_points(&s, &m, &m).unwrap().points().unwrap().len(), 3);

        let set = coincidence_points(&s, &t(&[0, 0, 0]), &t(&[0, 0, 1])).unwrap();
        let pts = set.points().unwrap();
        assert_eq!(pts.iter().map(|c| c.point.clone()).collect::<Vec<_>>(), vec![0.into(), 1.into()]);
        assert!(pts.iter().all(|c| c.value == Point::Index(0)));

        let e: MetricSpace = EuclideanSpace::new(1).unwrap().into();
        let set = coincidence_points(
            &e,
            &Mapping::Affine(AffineMap::scaling(1, 0.5)),
            &Mapping::Affine(AffineMap::identity(1)),
        )
        .unwrap();
        let pts = set.points().unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].point.coords().unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn affine_coincidence_families_and_empty_sets() {
        let e: MetricSpace = EuclideanSpace::new(2).unwrap().into();
        let id = Mapping::Affine(AffineMap::identity(2));
        // Projection onto the first axis agrees with the identity on that axis.
        let proj = Mapping::Affine(AffineMap::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]], vec![0.0, 0.0]).unwrap());
        match coincidence_points(&e, &proj, &id).unwrap() {
            CoincidenceSet::Family { family } => {
                assert_eq!(family.directions.len(), 1);
                assert!(family.directions[0][1].abs() < 1e-12);
            }
            other => panic!("expected a line, got {other:?}"),
        }
        let shift = Mapping::Affine(AffineMap::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 0.0]).unwrap());
        assert!(coincidence_points(&e, &shift, &id).unwrap().is_empty());
    }

    #[test]
    fn weak_compatibility_examples() {
        let s = line(3);
        let m = t(&[2, 0, 1]);
        assert!(is_weakly_compatible(&s, &m, &m).unwrap().compatible);

        let f = t(&[0, 2, 2]);
        let tt = t(&[0, 2, 0]);
        let v = is_weakly_compatible(&s, &tt, &f).unwrap();
        assert!(!v.compatible);
        assert_eq!(v.witness, Some(Point::Index(1)));

        // No coincidence points at all.
        let v = is_weakly_compatible(&s, &t(&[1, 2, 0]), &t(&[0, 1, 2])).unwrap();
        assert!(v.compatible);
        assert_eq!(v.coincidence_count, Some(0));
    }

    #[test]
    fn lift_examples() {
        let s = line(3);
        let id = t(&[0, 1, 2]);
        for v in 0..3 {
            assert_eq!(lift_to_common_fixed_point(&s, &id, &id, &v.into()).unwrap(), Point::Index(v));
        }
        assert_eq!(
            lift_to_common_fixed_point(&s, &t(&[0, 0, 0]), &t(&[0, 0, 1]), &0.into()).unwrap(),
            Point::Index(0)
        );
        let err = lift_to_common_fixed_point(&s, &t(&[0, 2, 0]), &t(&[0, 2, 2]), &2.into()).unwrap_err();
        assert_eq!(
            err,
            ReductionError::LiftMismatch {
                v: 2.into(),
                tv: 0.into(),
                fv: 2.into()
            }
        );
    }
}
