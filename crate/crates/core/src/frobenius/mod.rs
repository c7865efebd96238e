//! Small quantum product at rational parameter points, Frobenius-algebra
//! axiom checks, Euler gradings, and the fibre algebra of a point blow-up at
//! `Z = 0` together with its splitting.

mod algebra;
mod fibre;
mod grading;
mod quantum;

use thiserror::Error;

use crate::exact_algebra::AlgebraError;
use crate::geometry::GeometryError;
use crate::gw_engine::GwError;

pub use algebra::Algebra;
pub use fibre::{fibre_algebra, limit_check, split_check, FibreAlgebra, SplitReport};
pub use grading::{grading_audit, EulerData, GradingReport};
pub use quantum::{
    first_order_associativity, quantum_product, AxiomReport, QuantumAlgebra, SymbolicProduct,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrobeniusError {
    #[error(transparent)]
    Gw(#[from] GwError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("window c1 bound {bound} is below {needed}, needed for three-point invariants")]
    WindowTooSmall { bound: i64, needed: i64 },
    #[error("parameter point does not match the curve lattice")]
    PointShape,
    #[error("a Novikov variable with a negative exponent is zero at this point")]
    SingularPoint,
    #[error("only small parameter points (x = 0) are evaluated exactly")]
    BigPoint,
    #[error("the fibre algebra needs dimension at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("the fibre algebra needs a point with every q nonzero")]
    ZeroParameter,
    #[error("{0} is not a blow-up")]
    NotABlowUp(String),
    #[error("structural check failed: {}", .0.join("; "))]
    Structural(Vec<String>),
}
