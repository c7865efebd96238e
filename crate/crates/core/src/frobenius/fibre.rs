use num_traits::{One, Zero};

use super::algebra::Algebra;
use super::quantum::{QuantumAlgebra, SymbolicProduct};
use super::FrobeniusError;
use crate::exact_algebra::{pow, rational::sign_power, squarefree, Matrix, Poly1, Rational};
use crate::geometry::CurveClass;

/// The `Z = 0` fibre of the quantum product of a point blow-up: the parent
/// algebra next to the rescaled exceptional sector `e_k = (ZE)^k`,
/// `1 <= k <= n - 1`.
#[derive(Clone, Debug)]
pub struct FibreAlgebra {
    n: usize,
    parent_dim: usize,
    parent: Algebra,
    algebra: Algebra,
}

impl FibreAlgebra {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }

    pub fn parent(&self) -> &Algebra {
        &self.parent
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    /// Basis index of `e_k`.
    pub fn e(&self, k: usize) -> usize {
        assert!((1..self.n).contains(&k));
        self.parent_dim + k - 1
    }

    /// `Y = (-1)^n e_{n-1}`.
    pub fn y(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.algebra.dim()];
        v[self.e(self.n - 1)] = sign_power(self.n as i64);
        v
    }
}

/// Builds the fibre algebra over the parent's small quantum product.
///
/// Exceptional sector: `e_i e_j = e_{i+j}` for `i + j <= n - 1`, otherwise
/// `(-1)^n e_{i+j-n+1}`. Cross products vanish. A parent product of positive
/// degree classes keeps its structure constants, except that its unit
/// component `c` becomes `c (Δ0 - Y)`: the unit of the parent sector is
/// `Δ0 - Y`.
pub fn fibre_algebra(n: usize, parent: &QuantumAlgebra) -> Result<FibreAlgebra, FrobeniusError> {
    if n < 2 {
        return Err(FrobeniusError::DimensionTooSmall(n));
    }
    if parent.geometry().dim() != n {
        return Err(FrobeniusError::DimensionTooSmall(parent.geometry().dim()));
    }
    if parent.point().q.iter().any(|q| q.is_zero()) {
        return Err(FrobeniusError::ZeroParameter);
    }
    let p = parent.algebra().dim();
    let size = p + n - 1;
    let e = |k: usize| p + k - 1;
    let y_index = e(n - 1);
    let y_sign = sign_power(n as i64);
    let mut c = vec![vec![vec![Rational::zero(); size]; size]; size];
    for j in 0..size {
        c[0][j][j] = Rational::one();
        c[j][0][j] = Rational::one();
    }
    for a in 1..p {
        for b in 1..p {
            let prod = parent.product(a, b);
            for (k, v) in prod.iter().enumerate() {
                c[a][b][k] = v.clone();
            }
            c[a][b][y_index] = -&prod[0] * &y_sign;
        }
    }
    for i in 1..n {
        for j in 1..n {
            let s = i + j;
            if s < n {
                c[e(i)][e(j)][e(s)] = Rational::one();
            } else {
                c[e(i)][e(j)][e(s - n + 1)] = y_sign.clone();
            }
        }
    }
    let mut labels = parent.algebra().labels().to_vec();
    labels.extend((1..n).map(|k| {
        if k == 1 {
            "ZE".to_string()
        } else {
            format!("(ZE)^{k}")
        }
    }));
    Ok(FibreAlgebra {
        n,
        parent_dim: p,
        parent: parent.algebra().clone(),
        algebra: Algebra::new(labels, c),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub y: Vec<Rational>,
    /// `e_1 e_i` against the table, for `1 <= i <= n - 1`.
    pub table_failures: Vec<String>,
    pub failures: Vec<String>,
    /// Characteristic polynomial of `e_1` on the exceptional ideal.
    pub exceptional_charpoly: Poly1,
    /// `z -> -ZE` identifies the ideal with `F[z]/(z^{n-1} - (-1)^{n-1})`;
    /// only attempted for even `n`.
    pub isomorphism_witness: Option<String>,
}

impl SplitReport {
    pub fn passed(&self) -> bool {
        self.table_failures.is_empty() && self.failures.is_empty()
    }
}

/// Verifies that `Y` is an idempotent splitting the fibre algebra into the
/// exceptional ideal `Y F` and the parent sector `(Δ0 - Y) F`.
pub fn split_check(f: &FibreAlgebra) -> SplitReport {
    let a = f.algebra();
    let n = f.n;
    let p = f.parent_dim;
    let size = a.dim();
    let y = f.y();
    let unit = a.basis_vector(0);
    let complement: Vec<Rational> = unit.iter().zip(&y).map(|(u, v)| u - v).collect();
    let scale = |v: &[Rational], c: &Rational| v.iter().map(|x| x * c).collect::<Vec<_>>();

    let mut table_failures = Vec::new();
    for i in 1..n {
        let expected = if i < n - 1 {
            a.basis_vector(f.e(i + 1))
        } else {
            scale(&a.basis_vector(f.e(1)), &sign_power(n as i64))
        };
        if a.product(f.e(1), f.e(i)) != expected.as_slice() {
            table_failures.push(format!("ZE * {} is wrong", a.labels()[f.e(i)]));
        }
    }

    let mut failures = Vec::new();
    if a.mul(&y, &y) != y {
        failures.push("Y is not idempotent".into());
    }
    if a.mul(&complement, &complement) != complement {
        failures.push("Δ0 - Y is not idempotent".into());
    }
    for k in 1..n {
        let ek = a.basis_vector(f.e(k));
        if a.mul(&y, &ek) != ek {
            failures.push(format!("Y does not fix {}", a.labels()[f.e(k)]));
        }
        if !a.mul(&complement, &ek).iter().all(|v| v.is_zero()) {
            failures.push(format!("Δ0 - Y does not kill {}", a.labels()[f.e(k)]));
        }
        for b in 1..p {
            if !a.product(b, f.e(k)).iter().all(|v| v.is_zero()) {
                failures.push(format!(
                    "{} * {} is not zero",
                    a.labels()[b],
                    a.labels()[f.e(k)]
                ));
            }
        }
    }
    // K = span{Δ0 - Y, Δ1, .., Δ_{p-1}} with unit Δ0 - Y, mapped to the parent
    let k_basis: Vec<Vec<Rational>> = (0..p)
        .map(|i| {
            if i == 0 {
                complement.clone()
            } else {
                a.basis_vector(i)
            }
        })
        .collect();
    for (i, u) in k_basis.iter().enumerate() {
        if !a.mul(&y, u).iter().all(|v| v.is_zero()) {
            failures.push(format!("Y does not kill {}", a.labels()[i]));
        }
        if a.mul(&complement, u) != *u {
            failures.push(format!("Δ0 - Y does not fix {}", a.labels()[i]));
        }
        for (j, w) in k_basis.iter().enumerate() {
            let prod = a.mul(u, w);
            let mut expected = vec![Rational::zero(); size];
            for (m, c) in f.parent.product(i, j).iter().enumerate() {
                for (t, v) in k_basis[m].iter().enumerate() {
                    expected[t] += c * v;
                }
            }
            if prod != expected {
                failures.push(format!(
                    "parent sector product {} * {} differs",
                    a.labels()[i],
                    a.labels()[j]
                ));
            }
        }
    }

    // e_1^{n-1} = (-1)^n Y, so z -> ZE satisfies z^{n-1} = (-1)^n
    let e1 = a.basis_vector(f.e(1));
    let mut power = y.clone();
    for _ in 0..n - 1 {
        power = a.mul(&power, &e1);
    }
    if power != scale(&y, &sign_power(n as i64)) {
        failures.push("(ZE)^(n-1) != (-1)^n Y".into());
    }
    let ideal = Matrix::from_rows(
        (1..n)
            .map(|r| {
                (1..n)
                    .map(|c| a.product(f.e(1), f.e(c))[f.e(r)].clone())
                    .collect()
            })
            .collect(),
    )
    .expect("square");
    let exceptional_charpoly = ideal.char_poly().expect("square");
    let mut target = vec![Rational::zero(); n];
    target[0] = -sign_power(n as i64);
    target[n - 1] = Rational::one();
    if exceptional_charpoly != Poly1::from_coeffs(target) {
        failures.push(format!(
            "char poly of ZE on the ideal is {exceptional_charpoly}"
        ));
    }
    if !squarefree(&exceptional_charpoly).unwrap_or(false) {
        failures.push("exceptional ideal is not étale".into());
    }
    let isomorphism_witness = if n.is_multiple_of(2) {
        // (-ZE)^{n-1} = -(ZE)^{n-1} = -Y = (-1)^{n-1} Y
        let z = scale(&e1, &-Rational::one());
        let mut zp = y.clone();
        for _ in 0..n - 1 {
            zp = a.mul(&zp, &z);
        }
        if zp == scale(&y, &sign_power(n as i64 - 1)) {
            Some(format!(
                "z -> -ZE, z^{} = {}",
                n - 1,
                sign_power(n as i64 - 1)
            ))
        } else {
            failures.push("z -> -ZE does not satisfy the ring relation".into());
            None
        }
    } else {
        None
    };
    SplitReport {
        y,
        table_failures,
        failures,
        exceptional_charpoly,
        isomorphism_witness,
    }
}

/// Takes the `Z -> 0` limit of the symbolic product of a point blow-up
/// (`q_E = Z^{-(n-1)}` for the last blow-up, `E^k` rescaled by `Z^k`) at the
/// parent point of `fibre`, and compares it with `fibre`. Reports negative
/// `Z` powers and every mismatching structure constant.
pub fn limit_check(
    blown_up: &SymbolicProduct,
    parent_q: &[Rational],
    fibre: &FibreAlgebra,
) -> Result<Vec<String>, FrobeniusError> {
    let g = blown_up.geometry();
    let parent = g
        .parent()
        .ok_or_else(|| FrobeniusError::NotABlowUp(g.id().to_string()))?;
    if parent_q.len() != parent.curve_rank() {
        return Err(FrobeniusError::PointShape);
    }
    let n = g.dim();
    let last = g.blow_up_count() - 1;
    let size = g.basis_len();
    if size != fibre.algebra().dim() {
        return Err(FrobeniusError::PointShape);
    }
    let scaling: Vec<i64> = g
        .basis()
        .iter()
        .map(|b| match (b.exceptional_blowup(), b.exceptional_power()) {
            (Some(i), Some(k)) if i == last => k as i64,
            _ => 0,
        })
        .collect();
    let mut failures = Vec::new();
    for i in 0..size {
        for j in 0..size {
            for k in 0..size {
                let mut limit = Rational::zero();
                for (exp, c) in blown_up.constant(i, j, k).terms() {
                    if c.is_zero() {
                        continue;
                    }
                    let beta = CurveClass::new(exp.clone());
                    let z = scaling[i] + scaling[j]
                        - scaling[k]
                        - beta.exceptional_multiple(last) * (n as i64 - 1);
                    if z < 0 {
                        failures.push(format!(
                            "{} * {} has a Z^{z} term along {} at {beta}",
                            g.basis()[i].label,
                            g.basis()[j].label,
                            g.basis()[k].label
                        ));
                    } else if z == 0 {
                        let mut term = c.clone();
                        for (q, &d) in parent_q.iter().zip(exp.iter()) {
                            if d >= 0 {
                                term *= pow(q, d as u64);
                            } else {
                                term /= pow(q, d.unsigned_abs());
                            }
                        }
                        limit += term;
                    }
                }
                if limit != fibre.algebra().product(i, j)[k] {
                    failures.push(format!(
                        "limit of {} * {} along {} is {limit}, fibre has {}",
                        g.basis()[i].label,
                        g.basis()[j].label,
                        g.basis()[k].label,
                        fibre.algebra().product(i, j)[k]
                    ));
                }
            }
        }
    }
    Ok(failures)
}
