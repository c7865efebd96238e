use std::sync::Arc;

use num_traits::Zero;

use super::algebra::Algebra;
use super::FrobeniusError;
use crate::exact_algebra::{LaurentPoly, Matrix, Rational};
use crate::geometry::{Geometry, ParameterPoint};
use crate::gw_engine::InvariantTable;

/// Structure constants of the small quantum product as Laurent polynomials in
/// the Novikov variables: `c_ij^k(q) = (Δ_i ∪ Δ_j)_k + sum_beta sum_l
/// <Δ_i Δ_j Δ_l>_beta g^{lk} q^beta`.
#[derive(Clone, Debug)]
pub struct SymbolicProduct {
    geometry: Arc<Geometry>,
    constants: Vec<Vec<Vec<LaurentPoly>>>,
}

impl SymbolicProduct {
    pub fn new(table: &InvariantTable) -> Result<Self, FrobeniusError> {
        let g = Arc::clone(table.geometry());
        let n = g.dim() as i64;
        if table.window().c1_bound < 2 * n {
            return Err(FrobeniusError::WindowTooSmall {
                bound: table.window().c1_bound,
                needed: 2 * n,
            });
        }
        let size = g.basis_len();
        let rank = g.curve_rank();
        let mut constants = vec![vec![vec![LaurentPoly::zero(rank); size]; size]; size];
        for (i, row) in constants.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                for (k, c) in g.cup(i, j) {
                    slot[*k].add_term(vec![0; rank], c.clone());
                }
            }
        }
        let classes = g.window_classes(2 * n)?;
        for i in 1..size {
            for j in i..size {
                for beta in &classes {
                    for l in 1..size {
                        let v = table.invariant(beta, &[i, j, l])?;
                        if v.is_zero() {
                            continue;
                        }
                        for (e, k, gek) in g.dual_pairs() {
                            if *e != l {
                                continue;
                            }
                            let term = &v * gek;
                            constants[i][j][*k].add_term(beta.coords().to_vec(), term.clone());
                            if i != j {
                                constants[j][i][*k].add_term(beta.coords().to_vec(), term);
                            }
                        }
                    }
                }
            }
        }
        Ok(SymbolicProduct {
            geometry: g,
            constants,
        })
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geometry
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &LaurentPoly {
        &self.constants[i][j][k]
    }

    pub fn constants(&self) -> &[Vec<Vec<LaurentPoly>>] {
        &self.constants
    }

    /// Evaluates at `pt`. When every `q` is zero the quantum corrections are
    /// dropped (the classical limit), even for classes with negative
    /// exceptional coordinates.
    pub fn evaluate(&self, pt: &ParameterPoint) -> Result<QuantumAlgebra, FrobeniusError> {
        let g = &self.geometry;
        if pt.q.len() != g.curve_rank() {
            return Err(FrobeniusError::PointShape);
        }
        let classical = pt.q.iter().all(|q| q.is_zero());
        let size = g.basis_len();
        let mut c = vec![vec![vec![Rational::zero(); size]; size]; size];
        for i in 0..size {
            for j in 0..size {
                for k in 0..size {
                    let p = &self.constants[i][j][k];
                    c[i][j][k] = if classical {
                        p.coeff(&vec![0; g.curve_rank()])
                    } else {
                        p.eval(&pt.q).map_err(|_| FrobeniusError::SingularPoint)?
                    };
                }
            }
        }
        let labels = g.basis().iter().map(|b| b.label.clone()).collect();
        Ok(QuantumAlgebra {
            geometry: Arc::clone(g),
            point: pt.clone(),
            algebra: Algebra::new(labels, c),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub commutative: Vec<String>,
    pub unital: Vec<String>,
    pub frobenius: Vec<String>,
    pub associative: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.commutative.is_empty()
            && self.unital.is_empty()
            && self.frobenius.is_empty()
            && self.associative.is_empty()
    }
}

/// The small quantum product at a rational parameter point.
#[derive(Clone, Debug)]
pub struct QuantumAlgebra {
    geometry: Arc<Geometry>,
    point: ParameterPoint,
    algebra: Algebra,
}

impl QuantumAlgebra {
    pub fn new(table: &InvariantTable, pt: &ParameterPoint) -> Result<Self, FrobeniusError> {
        if !pt.is_small() {
            return Err(FrobeniusError::BigPoint);
        }
        SymbolicProduct::new(table)?.evaluate(pt)
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geometry
    }

    pub fn point(&self) -> &ParameterPoint {
        &self.point
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn pairing(&self) -> &Matrix {
        self.geometry.pairing()
    }

    /// `Δ_i ∘ Δ_j` as a coefficient vector.
    pub fn product(&self, i: usize, j: usize) -> &[Rational] {
        self.algebra.product(i, j)
    }

    pub fn check_axioms(&self) -> AxiomReport {
        AxiomReport {
            commutative: self.algebra.commutativity_failures(),
            unital: self.algebra.unit_failures(&self.algebra.basis_vector(0)),
            frobenius: self.algebra.frobenius_failures(self.pairing()),
            associative: self.algebra.associativity_failures(),
        }
    }
}

/// `Δ_i ∘ Δ_j` at `pt` (small product).
pub fn quantum_product(
    table: &InvariantTable,
    pt: &ParameterPoint,
    i: usize,
    j: usize,
) -> Result<Vec<Rational>, FrobeniusError> {
    Ok(QuantumAlgebra::new(table, pt)?.product(i, j).to_vec())
}

/// First-order big quantum product: structure constants `c + sum_a x_a c^(a)`
/// with `c^(a)_ij^k = sum_beta sum_l <Δ_i Δ_j Δ_l Δ_a>_beta g^{lk} q^beta`.
/// Returns the associativity failures modulo `x^2`; needs four-point
/// invariants up to `c1 = 3n - 1` in the table.
pub fn first_order_associativity(
    table: &InvariantTable,
    pt: &ParameterPoint,
) -> Result<Vec<String>, FrobeniusError> {
    let g = table.geometry();
    let size = g.basis_len();
    let base = SymbolicProduct::new(table)?.evaluate(&ParameterPoint::small(g, pt.q.clone()))?;
    let c0 = base.algebra().constants();
    let n = g.dim() as i64;
    let classes = g.window_classes(table.window().c1_bound.min(3 * n - 1))?;
    let qpow = |beta: &crate::geometry::CurveClass| -> Result<Rational, FrobeniusError> {
        let mut p = LaurentPoly::zero(g.curve_rank());
        p.add_term(beta.coords().to_vec(), Rational::from_integer(1.into()));
        p.eval(&pt.q).map_err(|_| FrobeniusError::SingularPoint)
    };
    let mut c1 = vec![vec![vec![Rational::zero(); size]; size]; size];
    for (a, xa) in pt.x.iter().enumerate() {
        if xa.is_zero() || g.basis()[a].is_unit() || g.basis()[a].is_divisor() {
            continue;
        }
        for beta in &classes {
            let qb = qpow(beta)?;
            for i in 0..size {
                for j in 0..size {
                    for (l, k, glk) in g.dual_pairs() {
                        let v = table.invariant(beta, &[i, j, *l, a])?;
                        if !v.is_zero() {
                            c1[i][j][*k] += xa * &v * glk * &qb;
                        }
                    }
                }
            }
        }
    }
    // (e_i e_j) e_k - e_i (e_j e_k) at order one in x
    let mut failures = Vec::new();
    for i in 0..size {
        for j in 0..size {
            for k in 0..size {
                for out in 0..size {
                    let mut diff = Rational::zero();
                    for m in 0..size {
                        diff += &c1[i][j][m] * &c0[m][k][out] + &c0[i][j][m] * &c1[m][k][out];
                        diff -= &c1[j][k][m] * &c0[i][m][out] + &c0[j][k][m] * &c1[i][m][out];
                    }
                    if !diff.is_zero() {
                        failures.push(format!(
                            "order-one associativity fails at ({i},{j},{k}) -> {out}"
                        ));
                    }
                }
            }
        }
    }
    Ok(failures)
}
