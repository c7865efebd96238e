use std::fmt;

use serde::{Deserialize, Serialize};

use super::GwError;
use crate::exact_algebra::{int, Rational};
use crate::geometry::{ClassKind, CurveClass, Geometry};

/// A reduced correlator `<Δ_{i_1} .. Δ_{i_l}>_beta`: no unit and no divisor
/// insertions, indices sorted ascending, `beta != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CorrelatorKey {
    pub beta: CurveClass,
    pub insertions: Vec<usize>,
}

impl CorrelatorKey {
    pub fn new(beta: CurveClass, mut insertions: Vec<usize>) -> Self {
        insertions.sort_unstable();
        CorrelatorKey { beta, insertions }
    }

    pub fn display(&self, g: &Geometry) -> String {
        let names: Vec<&str> = self
            .insertions
            .iter()
            .map(|&i| g.basis()[i].label.as_str())
            .collect();
        format!("<{}>_{}", names.join(","), self.beta)
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}>_{}", self.insertions, self.beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Seed,
    AxiomZero,
    Recursion,
    WdvvSolved,
    Imported,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Seed => "seed",
            Provenance::AxiomZero => "axiom-zero",
            Provenance::Recursion => "recursion",
            Provenance::WdvvSolved => "wdvv-solved",
            Provenance::Imported => "imported",
        }
    }
}

/// Enumeration bounds for correlators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub c1_bound: i64,
    /// `None`: only the dimension axiom bounds the insertion count.
    pub max_insertions: Option<usize>,
}

impl Window {
    pub fn default_for(g: &Geometry) -> Self {
        Window {
            c1_bound: 2 * g.dim() as i64 + 4,
            max_insertions: None,
        }
    }

    pub fn admits_count(&self, count: usize) -> bool {
        self.max_insertions.is_none_or(|m| count <= m)
    }
}

/// Whether a correlator may be nonzero by the dimension axiom. For `beta = 0`
/// the raw insertions must be exactly three with total degree `n`.
pub fn dimension_filter(g: &Geometry, beta: &CurveClass, insertions: &[usize]) -> bool {
    let n = g.dim() as i64;
    if beta.is_zero() {
        let total: usize = insertions
            .iter()
            .map(|&i| g.basis()[i].complex_degree)
            .sum();
        return insertions.len() == 3 && total as i64 == n;
    }
    let excess: i64 = insertions
        .iter()
        .map(|&i| g.basis()[i].complex_degree as i64 - 1)
        .sum();
    g.c1_pairing(beta) == 3 - n + excess
}

/// Strips divisor and unit insertions (divisor and fundamental class axioms).
pub fn divisor_reduce(
    g: &Geometry,
    beta: &CurveClass,
    raw: &[usize],
) -> Result<(CorrelatorKey, Rational), GwError> {
    if beta.is_zero() {
        return Err(GwError::ZeroClass);
    }
    let mut multiplier: i64 = 1;
    let mut kept = Vec::with_capacity(raw.len());
    for &i in raw {
        let class = &g.basis()[i];
        if class.kind == ClassKind::Unit {
            multiplier = 0;
        } else if class.is_divisor() {
            multiplier *= g.divisor_pairing(i, beta);
        } else {
            kept.push(i);
        }
    }
    Ok((CorrelatorKey::new(beta.clone(), kept), int(multiplier)))
}

pub fn classical_triple(g: &Geometry, a: usize, b: usize, c: usize) -> Rational {
    g.triple_intersection(a, b, c)
}

/// Mixed vanishing for one blow-up: with the non-exceptional part of `beta`
/// nonzero, exceptional multiple `d` and exceptional powers `k_j`, the
/// invariant vanishes iff `sum (k_j - 1) < (d+1)(n-1)` unless `d = 0` and
/// there are no exceptional insertions.
pub fn mixed_vanishing(n: usize, d: i64, powers: &[usize]) -> bool {
    if d == 0 && powers.is_empty() {
        return false;
    }
    let lhs: i64 = powers.iter().map(|&k| k as i64 - 1).sum();
    lhs < (d + 1) * (n as i64 - 1)
}

/// The blow-up `i` for which `beta = d E_i'` with `d > 0`, if any.
pub fn pure_blowup(beta: &CurveClass) -> Option<usize> {
    let c = beta.coords();
    if c[0] != 0 {
        return None;
    }
    let nonzero: Vec<usize> = (1..c.len()).filter(|&i| c[i] != 0).collect();
    match nonzero.as_slice() {
        [i] if c[*i] > 0 => Some(i - 1),
        _ => None,
    }
}

/// Why a reduced key is zero without computation, if it is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroReason {
    /// A purely exceptional class with an insertion from outside that family.
    PureWithForeignInsertion,
    /// Mixed vanishing for the given blow-up.
    Mixed { blowup: usize },
}

pub fn forced_zero(g: &Geometry, key: &CorrelatorKey, mixed: bool) -> Option<ZeroReason> {
    if let Some(i) = pure_blowup(&key.beta) {
        let foreign = key
            .insertions
            .iter()
            .any(|&x| g.basis()[x].exceptional_blowup() != Some(i));
        return foreign.then_some(ZeroReason::PureWithForeignInsertion);
    }
    if !mixed {
        return None;
    }
    for i in 0..g.blow_up_count() {
        let d = key.beta.exceptional_multiple(i);
        let rest_nonzero = key
            .beta
            .coords()
            .iter()
            .enumerate()
            .any(|(j, &c)| j != i + 1 && c != 0);
        if !rest_nonzero {
            continue;
        }
        let powers: Vec<usize> = key
            .insertions
            .iter()
            .filter(|&&x| g.basis()[x].exceptional_blowup() == Some(i))
            .map(|&x| g.basis()[x].exceptional_power().unwrap())
            .collect();
        if mixed_vanishing(g.dim(), d, &powers) {
            return Some(ZeroReason::Mixed { blowup: i });
        }
    }
    None
}

/// All reduced keys of class `beta` allowed by the dimension axiom, built from
/// `classes` (non-unit, non-divisor basis indices).
pub fn keys_for_class(
    g: &Geometry,
    beta: &CurveClass,
    classes: &[usize],
    window: &Window,
) -> Vec<CorrelatorKey> {
    let excess = g.c1_pairing(beta) + g.dim() as i64 - 3;
    if beta.is_zero() || excess < 0 {
        return Vec::new();
    }
    let weights: Vec<i64> = classes
        .iter()
        .map(|&c| g.basis()[c].complex_degree as i64 - 1)
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    multisets_with_weight(classes, &weights, 0, excess, &mut current, &mut |m| {
        if window.admits_count(m.len()) {
            out.push(CorrelatorKey::new(beta.clone(), m.to_vec()));
        }
    });
    out.sort();
    out
}

/// Calls `emit` for every multiset drawn from `items[start..]` (nondecreasing
/// positions) whose weights sum to `remaining`. Weights must be positive.
pub(crate) fn multisets_with_weight(
    items: &[usize],
    weights: &[i64],
    start: usize,
    remaining: i64,
    current: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if remaining == 0 {
        emit(current);
        return;
    }
    for p in start..items.len() {
        if weights[p] <= remaining {
            current.push(items[p]);
            multisets_with_weight(items, weights, p, remaining - weights[p], current, emit);
            current.pop();
        }
    }
}

/// Non-unit, non-divisor basis indices.
pub fn insertable_classes(g: &Geometry) -> Vec<usize> {
    g.basis()
        .iter()
        .filter(|b| !b.is_unit() && !b.is_divisor())
        .map(|b| b.index)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::ratio;
    use std::sync::Arc;

    fn bl(n: usize, r: usize) -> Arc<Geometry> {
        Geometry::blown_up_projective_space(n, r).unwrap()
    }

    #[test]
    fn dimension_examples() {
        let p2 = bl(2, 0);
        assert!(dimension_filter(&p2, &CurveClass::line(1, 1), &[2, 2]));
        assert!(!dimension_filter(&p2, &CurveClass::zero(1), &[1, 1, 0, 0]));
        assert!(dimension_filter(&p2, &CurveClass::zero(1), &[1, 1, 0]));
        for n in 2..=6 {
            let x = bl(n, 1);
            let top = x.exceptional_index(0, n - 1);
            assert!(dimension_filter(
                &x,
                &CurveClass::exceptional(2, 0, 1),
                &[top, top]
            ));
        }
    }

    #[test]
    fn divisor_reduce_examples() {
        let p2 = bl(2, 0);
        let (k, m) = divisor_reduce(&p2, &CurveClass::line(1, 1), &[1, 2, 2]).unwrap();
        assert_eq!(k.insertions, vec![2, 2]);
        assert_eq!(m, int(1));
        for n in 2..=5 {
            let x = bl(n, 1);
            let e = x.exceptional_index(0, 1);
            let top = x.exceptional_index(0, n - 1);
            let (k, m) =
                divisor_reduce(&x, &CurveClass::exceptional(2, 0, 1), &[top, e, top]).unwrap();
            let expected = if n == 2 { vec![] } else { vec![top, top] };
            assert_eq!(k.insertions, expected);
            assert_eq!(m, int(-1));
        }
        let (_, m) = divisor_reduce(&p2, &CurveClass::line(1, 2), &[0, 2]).unwrap();
        assert_eq!(m, int(0));
        assert!(matches!(
            divisor_reduce(&p2, &CurveClass::zero(1), &[2]),
            Err(GwError::ZeroClass)
        ));
    }

    #[test]
    fn classical_examples() {
        let p2 = bl(2, 0);
        assert_eq!(classical_triple(&p2, 1, 1, 0), int(1));
        let x = bl(2, 1);
        let e = x.exceptional_index(0, 1);
        assert_eq!(classical_triple(&x, e, e, 0), int(-1));
        assert_eq!(classical_triple(&x, 1, e, 0), int(0));
        assert_eq!(ratio(2, 2), int(1));
    }

    #[test]
    fn mixed_vanishing_examples() {
        assert!(mixed_vanishing(2, 0, &[1]));
        for l in 1..5 {
            assert!(!mixed_vanishing(2, -1, &vec![1; l]));
        }
        assert!(!mixed_vanishing(2, 0, &[]));
        assert!(mixed_vanishing(3, 1, &[]));
    }

    #[test]
    fn key_enumeration_respects_dimension() {
        let p2 = bl(2, 0);
        let keys = keys_for_class(
            &p2,
            &CurveClass::line(1, 2),
            &insertable_classes(&p2),
            &Window::default_for(&p2),
        );
        assert_eq!(
            keys,
            vec![CorrelatorKey::new(CurveClass::line(1, 2), vec![2; 5])]
        );
        let x = bl(3, 1);
        let beta = CurveClass::new(vec![1, -1]);
        for k in keys_for_class(&x, &beta, &insertable_classes(&x), &Window::default_for(&x)) {
            assert!(dimension_filter(&x, &k.beta, &k.insertions));
        }
    }

    #[test]
    fn forced_zero_rules() {
        let x = bl(3, 1);
        let top = x.exceptional_index(0, 2);
        let pure = CurveClass::exceptional(2, 0, 1);
        assert_eq!(
            forced_zero(&x, &CorrelatorKey::new(pure.clone(), vec![top, top]), true),
            None
        );
        assert_eq!(
            forced_zero(&x, &CorrelatorKey::new(pure, vec![3, 2]), false),
            Some(ZeroReason::PureWithForeignInsertion)
        );
        // a line meeting the point generically: <E^2, ..>_L vanishes
        let key = CorrelatorKey::new(CurveClass::line(2, 1), vec![top, 3]);
        assert_eq!(
            forced_zero(&x, &key, true),
            Some(ZeroReason::Mixed { blowup: 0 })
        );
        assert_eq!(forced_zero(&x, &key, false), None);
    }
}
