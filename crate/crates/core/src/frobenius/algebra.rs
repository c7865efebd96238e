use num_traits::{One, Zero};

use crate::exact_algebra::{Matrix, Rational};

/// A finite-dimensional commutative algebra given by structure constants
/// `e_i e_j = sum_k c[i][j][k] e_k` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    labels: Vec<String>,
    constants: Vec<Vec<Vec<Rational>>>,
}

impl Algebra {
    pub fn new(labels: Vec<String>, constants: Vec<Vec<Vec<Rational>>>) -> Self {
        let n = labels.len();
        assert!(
            constants.len() == n
                && constants
                    .iter()
                    .all(|r| r.len() == n && r.iter().all(|v| v.len() == n))
        );
        Algebra { labels, constants }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn constants(&self) -> &[Vec<Vec<Rational>>] {
        &self.constants
    }

    /// `e_i e_j` as a coefficient vector.
    pub fn product(&self, i: usize, j: usize) -> &[Rational] {
        &self.constants[i][j]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    pub fn mul(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in self.constants[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &xy * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `v -> a v`; column `j` is `a e_j`.
    pub fn multiplication_matrix(&self, a: &[Rational]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.mul(a, &self.basis_vector(j));
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn commutativity_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                if self.constants[i][j] != self.constants[j][i] {
                    out.push(format!(
                        "{} * {} != {} * {}",
                        self.labels[i], self.labels[j], self.labels[j], self.labels[i]
                    ));
                }
            }
        }
        out
    }

    /// Checks that `unit` acts as the identity on every basis vector.
    pub fn unit_failures(&self, unit: &[Rational]) -> Vec<String> {
        (0..self.dim())
            .filter(|&j| {
                let e = self.basis_vector(j);
                self.mul(unit, &e) != e || self.mul(&e, unit) != e
            })
            .map(|j| format!("unit does not fix {}", self.labels[j]))
            .collect()
    }

    pub fn associativity_failures(&self) -> Vec<String> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let ij = self.constants[i][j].clone();
                for k in 0..n {
                    let left = self.mul(&ij, &self.basis_vector(k));
                    let right = self.mul(&self.basis_vector(i), &self.constants[j][k]);
                    if left != right {
                        out.push(format!(
                            "({} * {}) * {} != {} * ({} * {})",
                            self.labels[i],
                            self.labels[j],
                            self.labels[k],
                            self.labels[i],
                            self.labels[j],
                            self.labels[k]
                        ));
                    }
                }
            }
        }
        out
    }

    /// `g(e_i e_j, e_k)` totally symmetric.
    pub fn frobenius_failures(&self, pairing: &Matrix) -> Vec<String> {
        let n = self.dim();
        let form = |i: usize, j: usize, k: usize| -> Rational {
            self.constants[i][j]
                .iter()
                .enumerate()
                .fold(Rational::zero(), |acc, (m, c)| acc + c * &pairing[(m, k)])
        };
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = form(i, j, k);
                    if v != form(j, k, i) || v != form(k, i, j) || v != form(j, i, k) {
                        out.push(format!(
                            "g({} * {}, {}) is not symmetric",
                            self.labels[i], self.labels[j], self.labels[k]
                        ));
                    }
                }
            }
        }
        out
    }
}
