//! Genus-zero Gromov–Witten invariants of `P^n` and its point blow-ups.
//!
//! Tables are seeded with `<pt,pt>_L = 1` on `P^n` and `<E^{n-1},E^{n-1}>_{E'} = 1`
//! for the purely exceptional part, take non-exceptional invariants of a
//! blow-up from the parent, install the mixed vanishing zeros, and determine
//! everything else from the associativity (WDVV) equations.

mod cache;
mod engine;
mod key;
mod table;
mod wdvv;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use cache::{CacheHeader, CacheRecord, CachedTable, InvariantCache};
pub use engine::{
    three_point_keys, wdvv_audit, Engine, EngineOptions, PullbackMode, SolveReport, Targets,
};
pub use key::{
    classical_triple, dimension_filter, divisor_reduce, forced_zero, insertable_classes,
    keys_for_class, mixed_vanishing, pure_blowup, CorrelatorKey, Provenance, Window, ZeroReason,
};
pub use table::{Entry, InvariantTable};
pub use wdvv::SolveStats;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GwError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("the zero class has no divisor reduction; use the classical triple product")]
    ZeroClass,
    #[error("invariant {key} is not in the table")]
    Missing { key: String },
    #[error("invariant {key} has c1 = {c1} beyond the window bound {bound}")]
    OutsideWindow { key: String, c1: i64, bound: i64 },
    #[error("window c1 bound {bound} is below {needed}, needed for the small quantum product")]
    WindowTooSmall { needed: i64, bound: i64 },
    #[error("window bounds must be positive")]
    BadWindow,
    #[error("associativity equations are inconsistent at class {class}: {detail}")]
    Inconsistent { class: String, detail: String },
    #[error("{} invariants of {geometry} are not determined within the window: {}", certificate.len(), certificate.join(" "))]
    Underdetermined {
        geometry: String,
        certificate: Vec<String>,
    },
    #[error("{0} is not a blow-up")]
    NotABlowUp(String),
    #[error("key is not pulled back from the parent of {0}")]
    NotPulledBack(String),
    #[error("cache: {0}")]
    Cache(String),
}
