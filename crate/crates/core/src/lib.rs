//! Exact and Monte Carlo workbench for the decomposition of random Pólya
//! trees into a weighted C-tree skeleton with D-forests hanging off its nodes.
//!
//! * [`series`] holds the exact power-series engine: Pólya tree counts, the
//!   D-forest and Cayley weights, the C-tree polynomials and the finite-n
//!   forest-size law.
//! * [`tree`] enumerates canonical trees and forests and computes automorphism
//!   data (group order, fixed-point polynomial, orbit count) used as
//!   brute-force oracles for the series engine.
//! * [`asymptotics`] evaluates the singularity constants and the limiting
//!   formulas in high precision.
//! * [`sampler`] draws uniform trees of a given size, uniform automorphisms,
//!   and runs reproducible Monte Carlo experiments on the decomposition.

pub mod asymptotics;
pub mod error;
pub mod sampler;
pub mod series;
pub mod tree;

pub use error::{Error, Result};
pub use series::{ExactSeries, UPolynomial};
pub use tree::CanonicalTree;

/// Exact rational used throughout the series engine.
pub type Rational = num_rational::BigRational;
