//! Metric spaces, points and metric-axiom verification.
//!
//! Two flavors are supported: a finite universe `{0, .., n-1}` with an
//! explicit distance table, and the Euclidean space `R^m`. Finite spaces
//! are complete by construction; for Euclidean spaces completeness is a
//! declared flag that is carried along but never computed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Execution, Scored};

/// Default slack added to right-hand sides when checking contractive
/// conditions on finite tables.
pub const FINITE_TOLERANCE: f64 = 1e-12;
/// Default slack for Euclidean spaces, also used for point equality there.
pub const EUCLIDEAN_TOLERANCE: f64 = 1e-9;

const AXIOM_SAMPLE_SEED: u64 = 0x5eed_a710;
const AXIOM_SAMPLES: usize = 512;

/// An element of a metric space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    /// Index into a finite universe.
    Index(usize),
    /// Coordinates in `R^m`.
    Vector(Vec<f64>),
}

impl Point {
    pub fn index(&self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(*i),
            Point::Vector(_) => None,
        }
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Index(_) => None,
            Point::Vector(v) => Some(v),
        }
    }
}

impl From<usize> for Point {
    fn from(i: usize) -> Self {
        Point::Index(i)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Vector(v)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Vector(v) => {
                write!(f, "(")?;
                for (k, x) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("point {point} does not belong to the space: {reason}")]
    ForeignPoint { point: Point, reason: String },
    #[error("distance table must be non-empty and square, got {rows} rows with a row of length {bad_len}")]
    NotSquare { rows: usize, bad_len: usize },
    #[error("distance table entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("a finite space needs at least one point")]
    Empty,
    #[error("Euclidean dimension must be at least 1")]
    ZeroDimension,
    #[error("{0} labels given for {1} points")]
    LabelCount(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    FiniteExplicit,
    EuclideanAffine,
}

/// A finite metric space with an explicit row-major distance table.
///
/// Construction only checks shape and finiteness; use
/// [`verify_metric_axioms`] to confirm the table is actually a metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FiniteRepr", into = "FiniteRepr")]
pub struct FiniteSpace {
    n: usize,
    table: Vec<f64>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct FiniteRepr {
    distances: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<FiniteRepr> for FiniteSpace {
    type Error = MetricError;

    fn try_from(r: FiniteRepr) -> Result<Self, MetricError> {
        let space = FiniteSpace::new(r.distances)?;
        match r.labels {
            Some(l) => space.with_labels(l),
            None => Ok(space),
        }
    }
}

impl From<FiniteSpace> for FiniteRepr {
    fn from(s: FiniteSpace) -> Self {
        FiniteRepr {
            distances: s.rows(),
            labels: s.labels,
        }
    }
}

impl FiniteSpace {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let mut table = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(MetricError::NotSquare {
                    rows: n,
                    bad_len: row.len(),
                });
            }
            table.extend_from_slice(row);
        }
        Self::from_flat(n, table)
    }

    pub fn from_flat(n: usize, table: Vec<f64>) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if table.len() != n * n {
            return Err(MetricError::NotSquare {
                rows: n,
                bad_len: table.len() / n.max(1),
            });
        }
        if let Some(pos) = table.iter().position(|d| !d.is_finite()) {
            return Err(MetricError::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(Self {
            n,
            table,
            labels: None,
        })
    }

    /// Builds the table `|x_i - x_j|` from real labels on a line.
    pub fn on_line(xs: &[f64]) -> Result<Self, MetricError> {
        let n = xs.len();
        let mut table = Vec::with_capacity(n * n);
        for a in xs {
            for b in xs {
                table.push((a - b).abs());
            }
        }
        let labels = xs.iter().map(|x| x.to_string()).collect();
        Self::from_flat(n, table)?.with_labels(labels)
    }

    /// Tabulates Euclidean distances between the given coordinate vectors.
    pub fn tabulate(points: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = points.len();
        let mut table = Vec::with_capacity(n * n);
        for a in points {
            for b in points {
                table.push(euclidean(a, b));
            }
        }
        Self::from_flat(n, table)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MetricError> {
        if labels.len() != self.n {
            return Err(MetricError::LabelCount(labels.len(), self.n));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// Unchecked table lookup; panics when an index is out of range.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.n + j]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// The subspace spanned by `points` (global indices); local index `k`
    /// corresponds to `points[k]`.
    pub fn subspace(&self, points: &[usize]) -> Self {
        let m = points.len();
        let mut table = Vec::with_capacity(m * m);
        for &a in points {
            for &b in points {
                table.push(self.d(a, b));
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| points.iter().map(|&p| l[p].clone()).collect());
        Self {
            n: m,
            table,
            labels,
        }
    }

    pub fn check_index(&self, i: usize) -> Result<(), MetricError> {
        if i < self.n {
            Ok(())
        } else {
            Err(MetricError::ForeignPoint {
                point: Point::Index(i),
                reason: format!("index out of range 0..{}", self.n),
            })
        }
    }
}

/// The Euclidean space `R^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclideanSpace {
    dimension: usize,
    complete: bool,
    point_tolerance: f64,
}

impl EuclideanSpace {
    pub fn new(dimension: usize) -> Result<Self, MetricError> {
        if dimension == 0 {
            return Err(MetricError::ZeroDimension);
        }
        Ok(Self {
            dimension,
            complete: true,
            point_tolerance: EUCLIDEAN_TOLERANCE,
        })
    }

    pub fn with_completeness(mut self, complete: bool) -> Self {
        self.complete = complete;
        self
    }

    pub fn with_point_tolerance(mut self, tol: f64) -> Self {
        self.point_tolerance = tol;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn point_tolerance(&self) -> f64 {
        self.point_tolerance
    }

    pub fn check_vector(&self, v: &[f64]) -> Result<(), MetricError> {
        if v.len() != self.dimension {
            return Err(MetricError::ForeignPoint {
                point: Point::Vector(v.to_vec()),
                reason: format!("expected dimension {}", self.dimension),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(MetricError::ForeignPoint {
                point: Point::Vector(v.to_vec()),
                reason: "non-finite coordinate".into(),
            });
        }
        Ok(())
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "snake_case")]
pub enum MetricSpace {
    Finite(FiniteSpace),
    Euclidean(EuclideanSpace),
}

impl From<FiniteSpace> for MetricSpace {
    fn from(s: FiniteSpace) -> Self {
        MetricSpace::Finite(s)
    }
}

impl From<EuclideanSpace> for MetricSpace {
    fn from(s: EuclideanSpace) -> Self {
        MetricSpace::Euclidean(s)
    }
}

impl MetricSpace {
    pub fn flavor(&self) -> Flavor {
        match self {
            MetricSpace::Finite(_) => Flavor::FiniteExplicit,
            MetricSpace::Euclidean(_) => Flavor::EuclideanAffine,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSpace> {
        match self {
            MetricSpace::Finite(s) => Some(s),
            MetricSpace::Euclidean(_) => None,
        }
    }

    pub fn as_euclidean(&self) -> Option<&EuclideanSpace> {
        match self {
            MetricSpace::Finite(_) => None,
            MetricSpace::Euclidean(s) => Some(s),
        }
    }

    /// Completeness assumption: always true for finite spaces.
    pub fn is_complete(&self) -> bool {
        match self {
            MetricSpace::Finite(_) => true,
            MetricSpace::Euclidean(e) => e.complete,
        }
    }

    /// Default slack for contractive-condition checks.
    pub fn default_tolerance(&self) -> f64 {
        match self {
            MetricSpace::Finite(_) => FINITE_TOLERANCE,
            MetricSpace::Euclidean(_) => EUCLIDEAN_TOLERANCE,
        }
    }

    pub fn contains(&self, p: &Point) -> Result<(), MetricError> {
        match (self, p) {
            (MetricSpace::Finite(s), Point::Index(i)) => s.check_index(*i),
            (MetricSpace::Euclidean(e), Point::Vector(v)) => e.check_vector(v),
            (MetricSpace::Finite(_), Point::Vector(_)) => Err(MetricError::ForeignPoint {
                point: p.clone(),
                reason: "finite spaces take point indices".into(),
            }),
            (MetricSpace::Euclidean(_), Point::Index(_)) => Err(MetricError::ForeignPoint {
                point: p.clone(),
                reason: "Euclidean spaces take coordinate vectors".into(),
            }),
        }
    }

    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64, MetricError> {
        self.contains(a)?;
        self.contains(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    /// Distance between points already known to belong to the space.
    pub(crate) fn distance_unchecked(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (MetricSpace::Finite(s), Point::Index(i), Point::Index(j)) => s.d(*i, *j),
            (MetricSpace::Euclidean(_), Point::Vector(x), Point::Vector(y)) => euclidean(x, y),
            _ => unreachable!("points were validated against the space"),
        }
    }

    /// `x = y` decision: exact index equality on finite spaces, distance
    /// within the point tolerance on Euclidean spaces.
    pub fn points_equal(&self, a: &Point, b: &Point) -> bool {
        match (self, a, b) {
            (MetricSpace::Finite(_), Point::Index(i), Point::Index(j)) => i == j,
            (MetricSpace::Euclidean(e), Point::Vector(x), Point::Vector(y)) => {
                euclidean(x, y) <= e.point_tolerance
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `d(x, x) = 0`
    Identity,
    /// `d(x, y) > 0` for `x != y`
    Positivity,
    /// `d(x, y) = d(y, x)`
    Symmetry,
    /// `d(x, z) <= d(x, y) + d(y, z)`
    Triangle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Worst violating point tuple (`[x]`, `[x, y]` or `[x, y, z]`).
    pub witness: Option<Vec<Point>>,
    /// Size of the worst violation; zero when nothing is violated.
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub mode: CheckMode,
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("every axiom is checked")
    }
}

/// Checks the metric axioms: exhaustively over all pairs and triples on a
/// finite table, on a fixed seeded sample for Euclidean spaces.
pub fn verify_metric_axioms(space: &MetricSpace, tolerance: f64) -> AxiomReport {
    verify_metric_axioms_with(space, tolerance, Execution::default())
}

pub fn verify_metric_axioms_with(
    space: &MetricSpace,
    tolerance: f64,
    exec: Execution,
) -> AxiomReport {
    match space {
        MetricSpace::Finite(s) => verify_finite(s, tolerance, exec),
        MetricSpace::Euclidean(e) => verify_sampled(e, tolerance),
    }
}

fn finite_check(
    axiom: Axiom,
    worst: Option<Scored<Vec<usize>>>,
    violated: impl Fn(f64) -> bool,
) -> AxiomCheck {
    match worst {
        Some(w) if violated(w.score) => AxiomCheck {
            axiom,
            passed: false,
            witness: Some(w.key.into_iter().map(Point::Index).collect()),
            magnitude: w.score,
        },
        _ => AxiomCheck {
            axiom,
            passed: true,
            witness: None,
            magnitude: 0.0,
        },
    }
}

fn verify_finite(s: &FiniteSpace, tol: f64, exec: Execution) -> AxiomReport {
    let n = s.len();

    let identity = par::fold_best((0..n).map(|i| Scored {
        key: vec![i],
        score: s.d(i, i).abs(),
    }));

    // Positivity is judged by exact comparison; the score is how far the
    // entry sits at or below zero.
    let positivity = par::argmax(exec, n, |i| {
        par::fold_best((0..n).filter(|&j| j != i && s.d(i, j) <= 0.0).map(|j| Scored {
            key: vec![i, j],
            score: -s.d(i, j),
        }))
    });

    let symmetry = par::argmax(exec, n, |i| {
        par::fold_best((i + 1..n).map(|j| Scored {
            key: vec![i, j],
            score: (s.d(i, j) - s.d(j, i)).abs(),
        }))
    });

    let triangle = par::argmax(exec, n, |i| {
        let mut best: Option<Scored<Vec<usize>>> = None;
        for j in 0..n {
            let dij = s.d(i, j);
            for k in 0..n {
                let excess = s.d(i, k) - (dij + s.d(j, k));
                let better = match &best {
                    None => true,
                    Some(b) => excess > b.score,
                };
                if better {
                    best = Some(Scored {
                        key: vec![i, j, k],
                        score: excess,
                    });
                }
            }
        }
        best
    });

    let checks = vec![
        finite_check(Axiom::Identity, identity, |m| m > tol),
        finite_check(Axiom::Positivity, positivity, |_| true),
        finite_check(Axiom::Symmetry, symmetry, |m| m > tol),
        finite_check(Axiom::Triangle, triangle, |m| m > tol),
    ];
    AxiomReport {
        passed: checks.iter().all(|c| c.passed),
        mode: CheckMode::Exhaustive,
        tolerance: tol,
        checks,
    }
}

fn verify_sampled(e: &EuclideanSpace, tol: f64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SAMPLE_SEED);
    let m = e.dimension();
    let mut sample = || -> Vec<f64> { (0..m).map(|_| rng.random_range(-1.0..1.0)).collect() };

    let mut worst: [Option<(Vec<Point>, f64)>; 4] = [None, None, None, None];
    let mut record = |slot: usize, witness: Vec<&Vec<f64>>, magnitude: f64| {
        if magnitude > worst[slot].as_ref().map_or(tol, |w| w.1) {
            worst[slot] = Some((
                witness.into_iter().map(|v| Point::Vector(v.clone())).collect(),
                magnitude,
            ));
        }
    };
    for _ in 0..AXIOM_SAMPLES {
        let (x, y, z) = (sample(), sample(), sample());
        let (dxy, dyx, dyz, dxz) = (
            euclidean(&x, &y),
            euclidean(&y, &x),
            euclidean(&y, &z),
            euclidean(&x, &z),
        );
        record(0, vec![&x], euclidean(&x, &x));
        if x != y && dxy <= 0.0 {
            record(1, vec![&x, &y], f64::MAX);
        }
        record(2, vec![&x, &y], (dxy - dyx).abs());
        record(3, vec![&x, &y, &z], dxz - dxy - dyz);
    }
    let axioms = [
        Axiom::Identity,
        Axiom::Positivity,
        Axiom::Symmetry,
        Axiom::Triangle,
    ];
    let checks: Vec<AxiomCheck> = axioms
        .into_iter()
        .zip(worst)
        .map(|(axiom, w)| match w {
            Some((witness, magnitude)) => AxiomCheck {
                axiom,
                passed: false,
                witness: Some(witness),
                magnitude,
            },
            None => AxiomCheck {
                axiom,
                passed: true,
                witness: None,
                magnitude: 0.0,
            },
        })
        .collect();
    AxiomReport {
        passed: checks.iter().all(|c| c.passed),
        mode: CheckMode::Sampled,
        tolerance: tol,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> MetricSpace {
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        FiniteSpace::on_line(&xs).unwrap().into()
    }

    #[test]
    fn table_lookup() {
        let s = line(3);
        assert_eq!(s.distance(&0.into(), &2.into()).unwrap(), 2.0);
        assert_eq!(s.distance(&1.into(), &1.into()).unwrap(), 0.0);
    }

    #[test]
    fn euclidean_line_distance() {
        let s: MetricSpace = EuclideanSpace::new(1).unwrap().into();
        let d = s
            .distance(&vec![3.0].into(), &vec![4.0].into())
            .unwrap();
        assert_eq!(d, 1.0);
        let a: Point = vec![0.25].into();
        assert_eq!(s.distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn foreign_points_are_rejected() {
        let s = line(3);
        assert!(matches!(
            s.distance(&0.into(), &3.into()),
            Err(MetricError::ForeignPoint { .. })
        ));
        assert!(s.distance(&0.into(), &vec![1.0].into()).is_err());
        let e: MetricSpace = EuclideanSpace::new(2).unwrap().into();
        assert!(e.distance(&vec![1.0].into(), &vec![1.0, 2.0].into()).is_err());
        assert!(e.distance(&0.into(), &vec![1.0, 2.0].into()).is_err());
    }

    #[test]
    fn malformed_tables() {
        assert_eq!(FiniteSpace::new(vec![]), Err(MetricError::Empty));
        assert!(matches!(
            FiniteSpace::new(vec![vec![0.0, 1.0], vec![1.0]]),
            Err(MetricError::NotSquare { .. })
        ));
        assert!(matches!(
            FiniteSpace::new(vec![vec![0.0, f64::NAN], vec![1.0, 0.0]]),
            Err(MetricError::NonFinite { row: 0, col: 1 })
        ));
        assert_eq!(EuclideanSpace::new(0), Err(MetricError::ZeroDimension));
    }

    #[test]
    fn line_table_is_a_metric() {
        let report = verify_metric_axioms(&line(3), 0.0);
        assert!(report.passed);
        assert_eq!(report.mode, CheckMode::Exhaustive);
    }

    #[test]
    fn triangle_failure_names_the_triple() {
        let s: MetricSpace = FiniteSpace::new(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap()
        .into();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let report = verify_metric_axioms_with(&s, 0.0, exec);
            assert!(!report.passed);
            let tri = report.check(Axiom::Triangle);
            assert!(!tri.passed);
            assert_eq!(
                tri.witness.as_deref(),
                Some(&[Point::Index(0), Point::Index(1), Point::Index(2)][..])
            );
            assert_eq!(tri.magnitude, 3.0);
            assert!(report.check(Axiom::Symmetry).passed);
            assert!(report.check(Axiom::Positivity).passed);
        }
    }

    #[test]
    fn single_point_space_passes() {
        let s: MetricSpace = FiniteSpace::new(vec![vec![0.0]]).unwrap().into();
        assert!(verify_metric_axioms(&s, 0.0).passed);
    }

    #[test]
    fn asymmetric_and_degenerate_tables_fail() {
        let s: MetricSpace = FiniteSpace::new(vec![
            vec![0.0, 1.0, 0.0],
            vec![2.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.5],
        ])
        .unwrap()
        .into();
        let report = verify_metric_axioms(&s, 1e-12);
        let sym = report.check(Axiom::Symmetry);
        assert!(!sym.passed);
        assert_eq!(sym.magnitude, 1.0);
        let pos = report.check(Axiom::Positivity);
        assert!(!pos.passed);
        assert_eq!(
            pos.witness.as_deref(),
            Some(&[Point::Index(0), Point::Index(2)][..])
        );
        let id = report.check(Axiom::Identity);
        assert!(!id.passed);
        assert_eq!(id.witness.as_deref(), Some(&[Point::Index(2)][..]));
    }

    #[test]
    fn euclidean_self_test_passes() {
        let s: MetricSpace = EuclideanSpace::new(3).unwrap().into();
        let report = verify_metric_axioms(&s, 1e-12);
        assert!(report.passed);
        assert_eq!(report.mode, CheckMode::Sampled);
    }

    #[test]
    fn points_equal_uses_flavor_rule() {
        let e: MetricSpace = EuclideanSpace::new(1).unwrap().into();
        assert!(e.points_equal(&vec![1.0].into(), &vec![1.0 + 1e-10].into()));
        assert!(!e.points_equal(&vec![1.0].into(), &vec![1.0 + 1e-6].into()));
        let f = line(2);
        assert!(f.points_equal(&1.into(), &1.into()));
        assert!(!f.points_equal(&0.into(), &1.into()));
    }

    #[test]
    fn subspace_keeps_distances() {
        let s = FiniteSpace::on_line(&[0.0, 1.0, 2.0, 4.0]).unwrap();
        let sub = s.subspace(&[1, 3]);
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.d(0, 1), 3.0);
        assert_eq!(sub.label(1), "4");
    }
}
