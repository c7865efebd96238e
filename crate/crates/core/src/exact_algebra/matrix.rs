//! Dense exact matrices, fraction-free linear solving and characteristic
//! polynomials.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::Poly1;
use super::rational::{int, Rational};
use super::AlgebraError;

/// Row-major `rows x cols` matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    Inconsistent,
    /// `particular` sets every free variable to zero.
    Underdetermined {
        free: Vec<usize>,
        particular: Vec<Rational>,
    },
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Ragged);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::Shape);
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Shape);
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::Shape);
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Determinant by Bareiss elimination on an integer-scaled copy.
    pub fn determinant(&self) -> Result<Rational, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        let (mut m, scales) = integer_rows(self, None);
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let denom = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
        Ok(Rational::new(prev * BigInt::from(sign), denom))
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NotSquare);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = (col..n)
                .find(|&i| !a[(i, col)].is_zero())
                .ok_or(AlgebraError::Singular)?;
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let piv = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] *= &piv;
                inv[(col, j)] *= &piv;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(i, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    /// `det(tI - A)` via Faddeev–LeVerrier; monic of degree `n`.
    pub fn char_poly(&self) -> Result<Poly1, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NotSquare);
        }
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.try_mul(&m)?;
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self.try_mul(&m)?;
            coeffs[n - k] = -am.trace() / int(k as i64);
        }
        Ok(Poly1::from_coeffs(coeffs))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix shapes must agree")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Clears denominators row by row. Returns the integer rows and the per-row
/// scale factors; `extra` is appended as a final column before scaling.
fn integer_rows(a: &Matrix, extra: Option<&[Rational]>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut out = Vec::with_capacity(a.rows);
    let mut scales = Vec::with_capacity(a.rows);
    for i in 0..a.rows {
        let mut row: Vec<Rational> = a.row(i).to_vec();
        if let Some(b) = extra {
            row.push(b[i].clone());
        }
        let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        out.push(row.iter().map(|v| v.numer() * (&l / v.denom())).collect());
        scales.push(l);
    }
    (out, scales)
}

/// Solves `A x = b` exactly by fraction-free (Bareiss) forward elimination on
/// the integer-scaled augmented matrix followed by rational back substitution.
pub fn solve_linear(a: &Matrix, b: &[Rational]) -> Result<Solution, AlgebraError> {
    if a.rows != b.len() {
        return Err(AlgebraError::Shape);
    }
    let (m_rows, n) = (a.rows, a.cols);
    let (mut m, _) = integer_rows(a, Some(b));
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == m_rows {
            break;
        }
        let Some(p) = (r..m_rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..m_rows {
            for j in col + 1..=n {
                let v = &m[r][col] * &m[i][j] - &m[i][col] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    if (r..m_rows).any(|i| !m[i][n].is_zero()) {
        return Ok(Solution::Inconsistent);
    }
    let mut x = vec![Rational::zero(); n];
    for (k, &col) in pivots.iter().enumerate().rev() {
        let mut acc = Rational::from_integer(m[k][n].clone());
        for j in col + 1..n {
            if !m[k][j].is_zero() && !x[j].is_zero() {
                acc -= Rational::from_integer(m[k][j].clone()) * &x[j];
            }
        }
        x[col] = acc / Rational::from_integer(m[k][col].clone());
    }
    if pivots.len() == n {
        Ok(Solution::Unique(x))
    } else {
        let free = (0..n).filter(|c| !pivots.contains(c)).collect();
        Ok(Solution::Underdetermined {
            free,
            particular: x,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rational::ratio;

    #[test]
    fn solve_examples() {
        let a = Matrix::from_i64(&[&[1]]).unwrap();
        assert_eq!(
            solve_linear(&a, &[int(1)]).unwrap(),
            Solution::Unique(vec![int(1)])
        );
        let a = Matrix::from_i64(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(
            solve_linear(&a, &[int(1), int(2)]).unwrap(),
            Solution::Inconsistent
        );
        let a = Matrix::from_i64(&[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(
            solve_linear(&a, &[int(1), int(1)]).unwrap(),
            Solution::Unique(vec![ratio(1, 2), ratio(1, 3)])
        );
    }

    #[test]
    fn underdetermined_reports_free_columns() {
        let a = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 7]]).unwrap();
        match solve_linear(&a, &[int(1), int(3)]).unwrap() {
            Solution::Underdetermined { free, particular } => {
                assert_eq!(free, vec![1]);
                assert_eq!(a.mul_vec(&particular).unwrap(), vec![int(1), int(3)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = Matrix::from_i64(&[&[1, 2]]).unwrap();
        assert!(solve_linear(&a, &[int(1), int(2)]).is_err());
        assert!(matches!(a.char_poly(), Err(AlgebraError::NotSquare)));
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(
            Matrix::from_i64(&[&[0]]).unwrap().char_poly().unwrap(),
            Poly1::t()
        );
        assert_eq!(
            Matrix::from_i64(&[&[0, 1], &[1, 0]])
                .unwrap()
                .char_poly()
                .unwrap(),
            Poly1::from_i64(&[-1, 0, 1])
        );
        // companion matrix of t^3 - q at q = 1
        let c = Matrix::from_i64(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(c.char_poly().unwrap(), Poly1::from_i64(&[-1, 0, 0, 1]));
    }

    #[test]
    fn determinant_and_inverse() {
        let a = Matrix::from_rows(vec![
            vec![ratio(1, 2), int(3), int(0)],
            vec![int(-1), int(2), ratio(5, 3)],
            vec![int(4), int(0), int(1)],
        ])
        .unwrap();
        // cofactor expansion along the first row
        let expected = ratio(1, 2) * (int(2) - int(0)) - int(3) * (int(-1) - ratio(20, 3));
        assert_eq!(a.determinant().unwrap(), expected);
        assert_eq!(&a * &a.inverse().unwrap(), Matrix::identity(3));
        let s = Matrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(s.determinant().unwrap(), int(0));
        assert!(matches!(s.inverse(), Err(AlgebraError::Singular)));
    }
}
