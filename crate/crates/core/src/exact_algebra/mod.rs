//! Exact arithmetic layer: rationals, univariate and Laurent polynomials,
//! dense matrices with fraction-free solving, characteristic polynomials and
//! the squarefree test, plus a sparse eliminator for the invariant solver.
//!
//! Every value here is immutable once built and every operation is a pure
//! function, so everything can be shared freely across threads.

mod laurent;
mod matrix;
mod poly;
pub mod rational;
mod sparse;

use thiserror::Error;

pub use laurent::{pow, LaurentPoly};
pub use matrix::{solve_linear, Matrix, Solution};
pub use poly::{squarefree, Poly1};
pub use rational::{format_rational, int, parse_rational, ratio, Rational};
pub use sparse::{Added, Inconsistent, LinearRow, SparseEliminator};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
    #[error("incompatible shapes")]
    Shape,
    #[error("rows of unequal length")]
    Ragged,
    #[error("the zero polynomial has no squarefree decomposition")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}
