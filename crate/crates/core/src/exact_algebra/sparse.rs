//! Incremental sparse elimination for large, highly redundant exact systems.
//!
//! Rows are kept in fully reduced echelon form: every stored row has a pivot
//! with coefficient one and no pivot variable occurs in any other row. A
//! variable is determined once its pivot row has no other variable left.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::rational::Rational;

/// `sum coeffs[v] * x_v = constant`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearRow {
    pub coeffs: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

impl LinearRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, var: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(var).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&var);
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `self -= factor * other`.
    fn axpy(&mut self, factor: &Rational, other: &LinearRow) {
        for (v, c) in &other.coeffs {
            self.add(*v, &(-(factor * c)));
        }
        self.constant -= factor * &other.constant;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inconsistent {
    /// Nonzero constant left after reduction (`0 = residual`).
    pub residual: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Added {
    Redundant,
    NewPivot {
        pivot: usize,
        /// Variables that became determined by this row.
        determined: Vec<(usize, Rational)>,
    },
}

#[derive(Clone, Debug, Default)]
pub struct SparseEliminator {
    rows: BTreeMap<usize, LinearRow>,
    /// var -> pivots of rows containing it as a non-pivot entry
    occurs: HashMap<usize, BTreeSet<usize>>,
    determined: BTreeSet<usize>,
}

impl SparseEliminator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn value(&self, var: usize) -> Option<&Rational> {
        let row = self.rows.get(&var)?;
        (row.coeffs.len() == 1).then_some(&row.constant)
    }

    pub fn is_pivot(&self, var: usize) -> bool {
        self.rows.contains_key(&var)
    }

    /// Reduces `row` against the stored rows without inserting it.
    pub fn reduce(&self, row: &LinearRow) -> LinearRow {
        let mut row = row.clone();
        let pivots: Vec<usize> = row
            .coeffs
            .keys()
            .filter(|v| self.rows.contains_key(v))
            .copied()
            .collect();
        for p in pivots {
            if let Some(c) = row.coeffs.get(&p).cloned() {
                row.axpy(&c, &self.rows[&p]);
            }
        }
        row
    }

    pub fn add(&mut self, row: LinearRow) -> Result<Added, Inconsistent> {
        let mut row = self.reduce(&row);
        let Some((&pivot, _)) = row.coeffs.iter().next_back() else {
            return if row.constant.is_zero() {
                Ok(Added::Redundant)
            } else {
                Err(Inconsistent {
                    residual: row.constant,
                })
            };
        };
        let inv = row.coeffs[&pivot].recip();
        if !inv.is_one() {
            for c in row.coeffs.values_mut() {
                *c *= &inv;
            }
            row.constant *= &inv;
        }

        let mut touched = vec![pivot];
        let holders: Vec<usize> = self
            .occurs
            .remove(&pivot)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        for h in holders {
            let mut other = self.rows.remove(&h).expect("holder row exists");
            let before: Vec<usize> = other.coeffs.keys().copied().collect();
            let c = other.coeffs[&pivot].clone();
            other.axpy(&c, &row);
            for v in before {
                if v != h && !other.coeffs.contains_key(&v) {
                    if let Some(s) = self.occurs.get_mut(&v) {
                        s.remove(&h);
                    }
                }
            }
            for &v in other.coeffs.keys() {
                if v != h {
                    self.occurs.entry(v).or_default().insert(h);
                }
            }
            self.rows.insert(h, other);
            touched.push(h);
        }
        for &v in row.coeffs.keys() {
            if v != pivot {
                self.occurs.entry(v).or_default().insert(pivot);
            }
        }
        self.rows.insert(pivot, row);

        let mut determined = Vec::new();
        for t in touched {
            if self.determined.contains(&t) {
                continue;
            }
            if let Some(v) = self.value(t) {
                determined.push((t, v.clone()));
                self.determined.insert(t);
            }
        }
        determined.sort_by_key(|(v, _)| *v);
        Ok(Added::NewPivot { pivot, determined })
    }
}
