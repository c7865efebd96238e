//! Varieties: projective spaces `P^n` and their iterated blow-ups at points.
//!
//! A [`Geometry`] records the `(p,p)`-cohomology basis with complex degrees,
//! the cup product table, the Poincaré pairing, the curve lattice with its
//! effective cone and the first Chern class. The cohomology of a blow-up is the
//! parent's cohomology followed by the exceptional powers `E^1 .. E^{n-1}`; the
//! point class always stays `H^n`, so `E^n` is rewritten as `(-1)^{n-1} H^n`.

mod curve;
mod document;
mod params;
mod spec;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_algebra::rational::sign_power;
use crate::exact_algebra::{int, Matrix, Rational};

pub use curve::CurveClass;
pub use document::GeometryDocument;
pub use params::{sample_nonzero, sample_rational, ParameterPoint, SAMPLE_HEIGHT};
pub use spec::parse_geometry;

pub const MAX_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("dimension {0} is outside the supported range 1..=8")]
    DimensionOutOfRange(usize),
    #[error("a point blow-up needs dimension at least 2, got {0}")]
    BlowUpDimension(usize),
    #[error("cannot parse geometry spec {0:?}")]
    Parse(String),
    #[error("invariants are not supported for {id}: {reason}")]
    Unsupported { id: String, reason: String },
    #[error("geometry document does not match the construction of {0}")]
    DocumentMismatch(String),
    #[error("curve class {class} has rank {got}, expected {expected}")]
    ClassRank {
        class: String,
        got: usize,
        expected: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ClassKind {
    Unit,
    Divisor,
    Other,
    /// `E_blowup^power`, 0-based blow-up index.
    ExceptionalPower {
        blowup: usize,
        power: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisClass {
    pub index: usize,
    pub complex_degree: usize,
    pub kind: ClassKind,
    pub label: String,
}

impl BasisClass {
    pub fn is_unit(&self) -> bool {
        self.kind == ClassKind::Unit
    }

    pub fn is_divisor(&self) -> bool {
        self.complex_degree == 1
    }

    pub fn exceptional_blowup(&self) -> Option<usize> {
        match self.kind {
            ClassKind::ExceptionalPower { blowup, .. } => Some(blowup),
            _ => None,
        }
    }

    pub fn exceptional_power(&self) -> Option<usize> {
        match self.kind {
            ClassKind::ExceptionalPower { power, .. } => Some(power),
            _ => None,
        }
    }
}

/// Sparse coefficient vector over the basis.
pub type SparseClass = Vec<(usize, Rational)>;

#[derive(Clone, Debug)]
pub struct Geometry {
    id: String,
    dim: usize,
    blowups: usize,
    basis: Vec<BasisClass>,
    cup: Vec<Vec<SparseClass>>,
    pairing: Matrix,
    pairing_inv: Matrix,
    dual_pairs: Vec<(usize, usize, Rational)>,
    cone: Vec<CurveClass>,
    parent: Option<Arc<Geometry>>,
}

impl PartialEq for Geometry {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Geometry {}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

impl Geometry {
    /// `P^n`: basis `1, H, .., H^n`, one curve generator `L` with `c1(L) = n+1`.
    pub fn projective_space(n: usize) -> Result<Geometry, GeometryError> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(GeometryError::DimensionOutOfRange(n));
        }
        Ok(Self::build(n, 0, None))
    }

    /// Blow-up of a general point of `parent`.
    pub fn blow_up_point(parent: &Arc<Geometry>) -> Result<Geometry, GeometryError> {
        if parent.dim < 2 {
            return Err(GeometryError::BlowUpDimension(parent.dim));
        }
        Ok(Self::build(
            parent.dim,
            parent.blowups + 1,
            Some(Arc::clone(parent)),
        ))
    }

    /// `Bl_r(P^n)` with all intermediate parents.
    pub fn blown_up_projective_space(n: usize, r: usize) -> Result<Arc<Geometry>, GeometryError> {
        let mut g = Arc::new(Self::projective_space(n)?);
        for _ in 0..r {
            g = Arc::new(Self::blow_up_point(&g)?);
        }
        Ok(g)
    }

    fn build(n: usize, r: usize, parent: Option<Arc<Geometry>>) -> Geometry {
        let mut basis = Vec::new();
        for k in 0..=n {
            let kind = match k {
                0 => ClassKind::Unit,
                1 => ClassKind::Divisor,
                _ => ClassKind::Other,
            };
            let label = match k {
                0 => "1".to_string(),
                1 => "H".to_string(),
                _ => format!("H^{k}"),
            };
            basis.push(BasisClass {
                index: k,
                complex_degree: k,
                kind,
                label,
            });
        }
        for b in 0..r {
            for k in 1..n {
                let label = if k == 1 {
                    format!("E{}", b + 1)
                } else {
                    format!("E{}^{k}", b + 1)
                };
                basis.push(BasisClass {
                    index: basis.len(),
                    complex_degree: k,
                    kind: ClassKind::ExceptionalPower {
                        blowup: b,
                        power: k,
                    },
                    label,
                });
            }
        }
        let size = basis.len();
        let mut cup = vec![vec![Vec::new(); size]; size];
        for i in 0..size {
            for j in 0..size {
                cup[i][j] = cup_basis(n, &basis[i], &basis[j]);
            }
        }
        let mut pairing = Matrix::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                if let Some((_, c)) = cup[i][j].iter().find(|(k, _)| *k == n) {
                    pairing[(i, j)] = c.clone();
                }
            }
        }
        let pairing_inv = pairing
            .inverse()
            .expect("Poincaré pairing of a supported geometry is nondegenerate");
        let mut dual_pairs = Vec::new();
        for e in 0..size {
            for f in 0..size {
                if !pairing_inv[(e, f)].is_zero() {
                    dual_pairs.push((e, f, pairing_inv[(e, f)].clone()));
                }
            }
        }
        let rank = 1 + r;
        let cone = if r == 0 {
            vec![CurveClass::line(1, 1)]
        } else {
            let mut gens = Vec::new();
            for i in 0..r {
                gens.push(CurveClass::exceptional(rank, i, 1));
            }
            for i in 0..r {
                let mut c = CurveClass::line(rank, 1);
                c = &c - &CurveClass::exceptional(rank, i, 1);
                gens.push(c);
            }
            for i in 0..r {
                for j in i + 1..r {
                    let c = &(&CurveClass::line(rank, 1) - &CurveClass::exceptional(rank, i, 1))
                        - &CurveClass::exceptional(rank, j, 1);
                    gens.push(c);
                }
            }
            gens
        };
        let id = if r == 0 {
            format!("P{n}")
        } else {
            format!("Bl{r}(P{n})")
        };
        Geometry {
            id,
            dim: n,
            blowups: r,
            basis,
            cup,
            pairing,
            pairing_inv,
            dual_pairs,
            cone,
            parent,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blow_up_count(&self) -> usize {
        self.blowups
    }

    pub fn parent(&self) -> Option<&Arc<Geometry>> {
        self.parent.as_ref()
    }

    pub fn basis(&self) -> &[BasisClass] {
        &self.basis
    }

    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn pairing(&self) -> &Matrix {
        &self.pairing
    }

    pub fn pairing_inverse(&self) -> &Matrix {
        &self.pairing_inv
    }

    /// Nonzero entries `(e, f, g^{ef})` of the inverse pairing.
    pub fn dual_pairs(&self) -> &[(usize, usize, Rational)] {
        &self.dual_pairs
    }

    pub fn curve_rank(&self) -> usize {
        1 + self.blowups
    }

    pub fn cone_generators(&self) -> &[CurveClass] {
        &self.cone
    }

    pub const UNIT: usize = 0;
    pub const HYPERPLANE: usize = 1;

    pub fn point_index(&self) -> usize {
        self.dim
    }

    /// Index of `E_blowup^power`.
    pub fn exceptional_index(&self, blowup: usize, power: usize) -> usize {
        assert!(blowup < self.blowups && (1..self.dim).contains(&power));
        self.dim + 1 + blowup * (self.dim - 1) + (power - 1)
    }

    pub fn cup(&self, i: usize, j: usize) -> &SparseClass {
        &self.cup[i][j]
    }

    /// `int_X a ∪ b ∪ c`.
    pub fn triple_intersection(&self, a: usize, b: usize, c: usize) -> Rational {
        self.cup[a][b].iter().fold(Rational::zero(), |acc, (k, v)| {
            acc + v * &self.pairing[(*k, c)]
        })
    }

    /// `(D, beta)` for a divisor basis class `D`.
    pub fn divisor_pairing(&self, divisor: usize, beta: &CurveClass) -> i64 {
        match self.basis[divisor].kind {
            ClassKind::Divisor => beta.line_degree(),
            ClassKind::ExceptionalPower { blowup, power: 1 } => -beta.exceptional_multiple(blowup),
            _ => panic!("basis class {divisor} is not a divisor"),
        }
    }

    /// `k(beta) = (c1, beta)` with `c1 = (n+1) H - (n-1) sum E_i`.
    pub fn c1_pairing(&self, beta: &CurveClass) -> i64 {
        let n = self.dim as i64;
        let mut k = (n + 1) * beta.line_degree();
        for i in 0..self.blowups {
            k += (n - 1) * beta.exceptional_multiple(i);
        }
        k
    }

    pub fn check_rank(&self, beta: &CurveClass) -> Result<(), GeometryError> {
        if beta.rank() != self.curve_rank() {
            return Err(GeometryError::ClassRank {
                class: beta.to_string(),
                got: beta.rank(),
                expected: self.curve_rank(),
            });
        }
        Ok(())
    }

    /// Membership in the cone spanned by [`Self::cone_generators`].
    ///
    /// Every generator other than the `E_i'` has line degree one, so a class
    /// `a L + sum d_i E_i'` is a nonnegative combination iff `a >= 0` and the
    /// deficits `max(0, -d_i)` can be covered by `a` generators, each covering
    /// at most two distinct points (one when `r < 2`).
    pub fn is_effective(&self, beta: &CurveClass) -> bool {
        if beta.rank() != self.curve_rank() {
            return false;
        }
        let a = beta.line_degree();
        if a < 0 {
            return false;
        }
        let needs: Vec<i64> = (0..self.blowups)
            .map(|i| (-beta.exceptional_multiple(i)).max(0))
            .collect();
        let cover = if self.blowups >= 2 { 2 } else { 1 };
        needs.iter().all(|&m| m <= a) && needs.iter().sum::<i64>() <= cover * a
    }

    /// Whether the WDVV reconstruction is supported: every cone generator has
    /// positive `c1` and the generator list is the full effective cone.
    pub fn check_invariant_support(&self) -> Result<(), GeometryError> {
        let unsupported = |reason: &str| GeometryError::Unsupported {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if let Some(g) = self.cone.iter().find(|g| self.c1_pairing(g) <= 0) {
            return Err(unsupported(&format!(
                "cone generator {g} has c1 = {} <= 0, so the recursion on c1 is not well founded",
                self.c1_pairing(g)
            )));
        }
        if self.dim == 2 && self.blowups > 4 {
            return Err(unsupported(
                "effective cone of Bl_r(P2), r >= 5, needs conic generators that are not modelled",
            ));
        }
        Ok(())
    }

    /// Nonzero effective classes with `0 < c1 <= c1_bound`, sorted by
    /// `(c1, coordinates)`.
    pub fn window_classes(&self, c1_bound: i64) -> Result<Vec<CurveClass>, GeometryError> {
        self.check_invariant_support()?;
        let rank = self.curve_rank();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([CurveClass::zero(rank)]);
        while let Some(c) = queue.pop_front() {
            for g in &self.cone {
                let next = &c + g;
                if self.c1_pairing(&next) <= c1_bound && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<CurveClass> = seen.into_iter().collect();
        out.sort_by_key(|c| (self.c1_pairing(c), c.clone()));
        Ok(out)
    }

    /// Cup product of two coefficient vectors.
    pub fn cup_vectors(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.basis_len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                for (k, c) in &self.cup[i][j] {
                    out[*k] += x * y * c;
                }
            }
        }
        out
    }

    /// Maps a basis index of the parent to this geometry (parents are prefixes).
    pub fn from_parent_index(&self, parent_index: usize) -> usize {
        parent_index
    }

    /// Exceptional classes of the most recent blow-up.
    pub fn last_exceptional_indices(&self) -> Vec<usize> {
        if self.blowups == 0 {
            return Vec::new();
        }
        (1..self.dim)
            .map(|k| self.exceptional_index(self.blowups - 1, k))
            .collect()
    }

    pub fn ancestors(self: &Arc<Self>) -> Vec<Arc<Geometry>> {
        let mut chain = vec![Arc::clone(self)];
        while let Some(p) = chain.last().unwrap().parent.clone() {
            chain.push(p);
        }
        chain.reverse();
        chain
    }
}

fn cup_basis(n: usize, a: &BasisClass, b: &BasisClass) -> SparseClass {
    use ClassKind::*;
    match (a.kind, b.kind) {
        (Unit, _) => vec![(b.index, int(1))],
        (_, Unit) => vec![(a.index, int(1))],
        (
            ExceptionalPower {
                blowup: i,
                power: p,
            },
            ExceptionalPower {
                blowup: j,
                power: q,
            },
        ) => {
            if i != j {
                Vec::new()
            } else if p + q < n {
                // E^{p+q} of the same family
                let offset = b.index - (q - 1);
                vec![(offset + (p + q - 1), int(1))]
            } else if p + q == n {
                vec![(n, sign_power(n as i64 - 1))]
            } else {
                Vec::new()
            }
        }
        (ExceptionalPower { .. }, _) | (_, ExceptionalPower { .. }) => Vec::new(),
        _ => {
            let d = a.complex_degree + b.complex_degree;
            if d <= n {
                vec![(d, int(1))]
            } else {
                Vec::new()
            }
        }
    }
}
