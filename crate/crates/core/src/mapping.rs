//! Self-mappings of a metric space.
//!
//! Finite spaces use index tables (`map[i]` is the image of point `i`);
//! Euclidean spaces use affine maps `x -> Mx + b`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricError, MetricSpace, Point};

/// Singular values below this (relative to the largest) count as zero.
pub(crate) const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MappingError {
    #[error("mapping {role} is not a total self-map: {reason}")]
    NotTotal { role: Role, reason: String },
    #[error("arity {arity} requires mapping {role}")]
    Missing { arity: Arity, role: Role },
    #[error("mapping {role} has the wrong representation for this space")]
    WrongFlavor { role: Role },
    #[error("affine map is singular (rank {rank} < {dimension})")]
    Singular { rank: usize, dimension: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Which of the four mappings a value plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    S,
    T,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "g")]
    G,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::S => "S",
            Role::T => "T",
            Role::F => "f",
            Role::G => "g",
        })
    }
}

/// Number of mappings in a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Arity {
    Two,
    Three,
    Four,
}

impl TryFrom<u8> for Arity {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            2 => Ok(Arity::Two),
            3 => Ok(Arity::Three),
            4 => Ok(Arity::Four),
            other => Err(format!("arity must be 2, 3 or 4, got {other}")),
        }
    }
}

impl From<Arity> for u8 {
    fn from(a: Arity) -> u8 {
        match a {
            Arity::Two => 2,
            Arity::Three => 3,
            Arity::Four => 4,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// An affine map `x -> Mx + b` on `R^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffineRepr", into = "AffineRepr")]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    offset: DVector<f64>,
}

#[derive(Serialize, Deserialize)]
struct AffineRepr {
    matrix: Vec<Vec<f64>>,
    offset: Vec<f64>,
}

impl TryFrom<AffineRepr> for AffineMap {
    type Error = String;
    fn try_from(r: AffineRepr) -> Result<Self, String> {
        AffineMap::from_rows(r.matrix, r.offset)
    }
}

impl From<AffineMap> for AffineRepr {
    fn from(a: AffineMap) -> Self {
        AffineRepr {
            matrix: a.rows(),
            offset: a.offset.iter().copied().collect(),
        }
    }
}

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>) -> Result<Self, String> {
        if !matrix.is_square() || matrix.nrows() != offset.len() || offset.is_empty() {
            return Err(format!(
                "affine map needs an m x m matrix and an m-vector, got {}x{} and {}",
                matrix.nrows(),
                matrix.ncols(),
                offset.len()
            ));
        }
        if matrix.iter().chain(offset.iter()).any(|x| !x.is_finite()) {
            return Err("affine map has non-finite entries".into());
        }
        Ok(Self { matrix, offset })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self, String> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err("affine matrix must be square".into());
        }
        let matrix = DMatrix::from_row_iterator(m, m, rows.into_iter().flatten());
        Self::new(matrix, DVector::from_vec(offset))
    }

    /// `x -> scale * x` on `R^m`.
    pub fn scaling(dimension: usize, scale: f64) -> Self {
        Self {
            matrix: DMatrix::identity(dimension, dimension) * scale,
            offset: DVector::zeros(dimension),
        }
    }

    pub fn identity(dimension: usize) -> Self {
        Self::scaling(dimension, 1.0)
    }

    pub fn constant(value: Vec<f64>) -> Self {
        let m = value.len();
        Self {
            matrix: DMatrix::zeros(m, m),
            offset: DVector::from_vec(value),
        }
    }

    pub fn dimension(&self) -> usize {
        self.offset.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.matrix * DVector::from_column_slice(x) + &self.offset;
        v.iter().copied().collect()
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            matrix: &self.matrix * &inner.matrix,
            offset: &self.matrix * &inner.offset + &self.offset,
        }
    }

    pub fn rank(&self) -> usize {
        numerical_rank(&self.matrix)
    }

    pub fn inverse(&self) -> Result<AffineMap, MappingError> {
        let m = self.dimension();
        let rank = self.rank();
        if rank < m {
            return Err(MappingError::Singular { rank, dimension: m });
        }
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(MappingError::Singular { rank, dimension: m })?;
        let offset = -(&inv * &self.offset);
        Ok(AffineMap {
            matrix: inv,
            offset,
        })
    }
}

pub(crate) fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.iter().cloned().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * largest.max(1.0)).count()
}

/// A self-map of a metric space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Mapping {
    Table(Vec<usize>),
    Affine(AffineMap),
}

impl From<Vec<usize>> for Mapping {
    fn from(t: Vec<usize>) -> Self {
        Mapping::Table(t)
    }
}

impl From<AffineMap> for Mapping {
    fn from(a: AffineMap) -> Self {
        Mapping::Affine(a)
    }
}

impl Mapping {
    pub fn identity(space: &MetricSpace) -> Self {
        match space {
            MetricSpace::Finite(s) => Mapping::Table((0..s.len()).collect()),
            MetricSpace::Euclidean(e) => Mapping::Affine(AffineMap::identity(e.dimension())),
        }
    }

    pub fn table(&self) -> Option<&[usize]> {
        match self {
            Mapping::Table(t) => Some(t),
            Mapping::Affine(_) => None,
        }
    }

    pub fn affine(&self) -> Option<&AffineMap> {
        match self {
            Mapping::Table(_) => None,
            Mapping::Affine(a) => Some(a),
        }
    }

    /// Checks that the map is total on the space and maps into it.
    pub fn check_total(&self, space: &MetricSpace, role: Role) -> Result<(), MappingError> {
        match (self, space) {
            (Mapping::Table(t), MetricSpace::Finite(s)) => {
                if t.len() != s.len() {
                    return Err(MappingError::NotTotal {
                        role,
                        reason: format!("table has {} entries for {} points", t.len(), s.len()),
                    });
                }
                if let Some((x, &y)) = t.iter().enumerate().find(|(_, &y)| y >= s.len()) {
                    return Err(MappingError::NotTotal {
                        role,
                        reason: format!("point {x} maps to {y}, outside 0..{}", s.len()),
                    });
                }
                Ok(())
            }
            (Mapping::Affine(a), MetricSpace::Euclidean(e)) => {
                if a.dimension() != e.dimension() {
                    return Err(MappingError::NotTotal {
                        role,
                        reason: format!(
                            "affine map acts on R^{}, space is R^{}",
                            a.dimension(),
                            e.dimension()
                        ),
                    });
                }
                Ok(())
            }
            _ => Err(MappingError::WrongFlavor { role }),
        }
    }

    /// Applies the map after checking that `p` belongs to `space`.
    pub fn apply(&self, space: &MetricSpace, p: &Point) -> Result<Point, MappingError> {
        space.contains(p)?;
        Ok(self.apply_unchecked(p))
    }

    /// Applies the map to a point already validated against the space.
    pub(crate) fn apply_unchecked(&self, p: &Point) -> Point {
        match (self, p) {
            (Mapping::Table(t), Point::Index(i)) => Point::Index(t[*i]),
            (Mapping::Affine(a), Point::Vector(v)) => Point::Vector(a.apply(v)),
            _ => unreachable!("mapping flavor was validated against the space"),
        }
    }

    /// Image set of a table map, sorted.
    pub fn image(&self) -> Option<Vec<usize>> {
        self.table().map(|t| {
            let mut img = t.to_vec();
            img.sort_unstable();
            img.dedup();
            img
        })
    }
}

/// The mappings of a problem: `S`, `T` and optionally `f`, `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingSet {
    pub arity: Arity,
    #[serde(rename = "S")]
    pub s: Mapping,
    #[serde(rename = "T")]
    pub t: Mapping,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Mapping>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Mapping>,
}

impl MappingSet {
    pub fn two(s: impl Into<Mapping>, t: impl Into<Mapping>) -> Self {
        Self {
            arity: Arity::Two,
            s: s.into(),
            t: t.into(),
            f: None,
            g: None,
        }
    }

    pub fn three(s: impl Into<Mapping>, t: impl Into<Mapping>, f: impl Into<Mapping>) -> Self {
        Self {
            arity: Arity::Three,
            s: s.into(),
            t: t.into(),
            f: Some(f.into()),
            g: None,
        }
    }

    pub fn four(
        s: impl Into<Mapping>,
        t: impl Into<Mapping>,
        f: impl Into<Mapping>,
        g: impl Into<Mapping>,
    ) -> Self {
        Self {
            arity: Arity::Four,
            s: s.into(),
            t: t.into(),
            f: Some(f.into()),
            g: Some(g.into()),
        }
    }

    pub fn f(&self) -> Result<&Mapping, MappingError> {
        self.f.as_ref().ok_or(MappingError::Missing {
            arity: self.arity,
            role: Role::F,
        })
    }

    pub fn g(&self) -> Result<&Mapping, MappingError> {
        self.g.as_ref().ok_or(MappingError::Missing {
            arity: self.arity,
            role: Role::G,
        })
    }

    pub fn get(&self, role: Role) -> Option<&Mapping> {
        match role {
            Role::S => Some(&self.s),
            Role::T => Some(&self.t),
            Role::F => self.f.as_ref(),
            Role::G => self.g.as_ref(),
        }
    }

    /// Checks presence per arity and totality of every mapping.
    pub fn validate(&self, space: &MetricSpace) -> Result<(), MappingError> {
        match self.arity {
            Arity::Two => {}
            Arity::Three => {
                self.f()?;
            }
            Arity::Four => {
                self.f()?;
                self.g()?;
            }
        }
        for role in [Role::S, Role::T, Role::F, Role::G] {
            if let Some(m) = self.get(role) {
                m.check_total(space, role)?;
            }
        }
        Ok(())
    }
}
