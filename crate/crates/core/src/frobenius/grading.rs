use num_traits::Zero;

use super::quantum::SymbolicProduct;
use super::FrobeniusError;
use crate::geometry::{CurveClass, Geometry};
use crate::gw_engine::{pure_blowup, CorrelatorKey, InvariantTable};

/// Gradings of basis classes, their coordinates and Novikov monomials.
///
/// Under the Euler field a class `Δ` of complex degree `k` has degree `k`,
/// its coordinate `x` has degree `1 - k` and `q^beta` has degree `c1(beta)`,
/// so the product has degree one. Under the exceptional field of blow-up `i`
/// only the family-`i` coordinates `x^E_k` (degree `1 - k`) and `q^beta`
/// (degree `d_i (n - 1)`) are weighted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerData {
    pub class_degree: Vec<i64>,
    pub coordinate_degree: Vec<i64>,
    /// `(blow-up, 1 - k)` for `E_i^k`, `None` elsewhere.
    pub exceptional_weight: Vec<Option<(usize, i64)>>,
}

impl EulerData {
    pub fn new(g: &Geometry) -> Self {
        let class_degree: Vec<i64> = g.basis().iter().map(|b| b.complex_degree as i64).collect();
        let coordinate_degree = class_degree.iter().map(|d| 1 - d).collect();
        let exceptional_weight = g
            .basis()
            .iter()
            .map(|b| {
                let k = b.exceptional_power()? as i64;
                Some((b.exceptional_blowup()?, 1 - k))
            })
            .collect();
        EulerData {
            class_degree,
            coordinate_degree,
            exceptional_weight,
        }
    }

    pub fn q_degree(&self, g: &Geometry, beta: &CurveClass) -> i64 {
        g.c1_pairing(beta)
    }

    /// Degree of the potential monomial `q^beta prod x_a` of `key` under the
    /// exceptional field of `blowup`.
    pub fn exceptional_degree(&self, g: &Geometry, key: &CorrelatorKey, blowup: usize) -> i64 {
        let n = g.dim() as i64;
        let mut deg = key.beta.exceptional_multiple(blowup) * (n - 1);
        for &a in &key.insertions {
            if let Some((b, w)) = self.exceptional_weight[a] {
                if b == blowup {
                    deg += w;
                }
            }
        }
        deg
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradingReport {
    pub pure_checked: usize,
    pub mixed_checked: usize,
    pub product_terms_checked: usize,
    pub violations: Vec<String>,
}

impl GradingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Pure exceptional monomials must have exceptional degree `3 - n`, nonzero
/// mixed ones at most `1 - n`, and every term of the small product must have
/// Euler degree one.
pub fn grading_audit(table: &InvariantTable) -> Result<GradingReport, FrobeniusError> {
    let g = table.geometry();
    let n = g.dim() as i64;
    let euler = EulerData::new(g);
    let mut report = GradingReport::default();
    for (key, entry) in table.sorted() {
        if let Some(i) = pure_blowup(&key.beta) {
            report.pure_checked += 1;
            let deg = euler.exceptional_degree(g, key, i);
            if deg != 3 - n {
                report.violations.push(format!(
                    "pure {} has degree {deg}, expected {}",
                    key.display(g),
                    3 - n
                ));
            }
            continue;
        }
        if entry.value.is_zero() {
            continue;
        }
        for i in 0..g.blow_up_count() {
            let touches = key.beta.exceptional_multiple(i) != 0
                || key
                    .insertions
                    .iter()
                    .any(|&a| g.basis()[a].exceptional_blowup() == Some(i));
            if !touches {
                continue;
            }
            report.mixed_checked += 1;
            let deg = euler.exceptional_degree(g, key, i);
            if deg > 1 - n {
                report.violations.push(format!(
                    "mixed {} = {} has degree {deg} > {} for E{}",
                    key.display(g),
                    entry.value,
                    1 - n,
                    i + 1
                ));
            }
        }
    }
    let product = SymbolicProduct::new(table)?;
    let size = g.basis_len();
    for i in 0..size {
        for j in 0..size {
            for k in 0..size {
                for (exp, c) in product.constant(i, j, k).terms() {
                    if c.is_zero() {
                        continue;
                    }
                    report.product_terms_checked += 1;
                    let qdeg = euler.q_degree(g, &CurveClass::new(exp.clone()));
                    let (di, dj, dk) = (
                        euler.class_degree[i],
                        euler.class_degree[j],
                        euler.class_degree[k],
                    );
                    if di + dj != dk + qdeg {
                        report.violations.push(format!(
                            "{} * {} has a term q^{:?} {} of degree {}",
                            g.basis()[i].label,
                            g.basis()[j].label,
                            exp,
                            g.basis()[k].label,
                            dk + qdeg
                        ));
                    }
                }
            }
        }
    }
    Ok(report)
}
