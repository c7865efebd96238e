//! Sparse multivariate Laurent polynomials with rational coefficients.
//!
//! Used for structure constants of the small quantum product as functions of
//! the Novikov variables `q^beta`, where exceptional directions may carry
//! negative exponents.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::rational::Rational;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Rational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exponent: Vec<i64>, c: Rational) {
        assert_eq!(exponent.len(), self.nvars, "exponent arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &[i64]) -> Rational {
        self.terms
            .get(exponent)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Evaluates at a point. Negative exponents need a nonzero coordinate.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        if point.len() != self.nvars {
            return Err(AlgebraError::Shape);
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k == 0 {
                    continue;
                }
                if k < 0 && x.is_zero() {
                    return Err(AlgebraError::DivisionByZero);
                }
                let base = if k < 0 { x.recip() } else { x.clone() };
                m *= pow(&base, k.unsigned_abs());
            }
            acc += m;
        }
        Ok(acc)
    }
}

pub fn pow(base: &Rational, e: u64) -> Rational {
    let mut acc = Rational::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, k)| format!("q{i}^{k}"))
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rational::{int, ratio};

    #[test]
    fn cancellation_removes_terms() {
        let mut p = LaurentPoly::zero(2);
        p.add_term(vec![1, -1], int(3));
        p.add_term(vec![1, -1], int(-3));
        assert!(p.is_zero());
    }

    #[test]
    fn eval_with_negative_exponents() {
        let mut p = LaurentPoly::zero(2);
        p.add_term(vec![1, -1], int(2));
        p.add_term(vec![0, 0], int(1));
        assert_eq!(p.eval(&[int(3), int(4)]).unwrap(), ratio(5, 2));
        assert!(p.eval(&[int(3), int(0)]).is_err());
    }

    #[test]
    fn product_adds_exponents() {
        let mut a = LaurentPoly::zero(1);
        a.add_term(vec![1], int(1));
        a.add_term(vec![-1], int(1));
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(&[0]), int(2));
        assert_eq!(sq.coeff(&[2]), int(1));
        assert_eq!(sq.coeff(&[-2]), int(1));
    }
}
