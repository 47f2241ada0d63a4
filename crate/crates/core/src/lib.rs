//! Common fixed points of two, three and four self-mappings of a metric
//! space.
//!
//! The two-map solver runs the alternating iteration
//! `x_{2n+1} = S x_{2n}`, `x_{2n+2} = T x_{2n+1}` under a Berinde-type
//! contractive condition. Three- and four-map problems are reduced to the
//! two-map case by restricting `f` (and `g`) to a set on which they are
//! injective and solving for the induced maps on the image, then lifted
//! back through weak compatibility.
//!
//! Finite instances can be checked against brute-force enumeration in
//! [`oracle`], which also hosts the seeded instance generator and fuzzer.
//!
//! ```
//! use cofix::contraction::{CheckOptions, Coefficients, PairSource};
//! use cofix::mapping::Mapping;
//! use cofix::metric::{FiniteSpace, MetricSpace, Point};
//! use cofix::solver::{solve_two, SolveOptions, Uniqueness};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let space: MetricSpace = FiniteSpace::on_line(&[0.0, 1.0, 3.0])?.into();
//! let s = Mapping::Table(vec![0, 0, 1]);
//! let c = Coefficients::new(0.0, 0.0, 0.5, 0.0, 0.0);
//! let out = solve_two(&space, &s, &s, &Point::Index(2), &c,
//!                     &PairSource::Exhaustive, &SolveOptions::default(), CheckOptions::default())?;
//! assert_eq!(out.solve.limit, Point::Index(0));
//! assert_eq!(out.uniqueness, Uniqueness::Certified);
//! # Ok(())
//! # }
//! ```

pub mod contraction;
pub mod mapping;
pub mod metric;
pub mod oracle;
pub mod par;
pub mod problem;
pub mod reduction;
pub mod solver;
