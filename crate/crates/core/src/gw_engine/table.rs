use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use super::key::{
    dimension_filter, divisor_reduce, forced_zero, CorrelatorKey, Provenance, Window,
};
use super::GwError;
use crate::exact_algebra::Rational;
use crate::geometry::{CurveClass, Geometry};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub value: Rational,
    pub provenance: Provenance,
}

/// Stored invariants of one geometry. Keys forced to vanish by the dimension
/// axiom, by effectivity or by the purely exceptional rule are never stored;
/// queries answer them with zero.
#[derive(Clone, Debug)]
pub struct InvariantTable {
    geometry: Arc<Geometry>,
    window: Window,
    entries: HashMap<CorrelatorKey, Entry>,
}

impl InvariantTable {
    pub fn new(geometry: Arc<Geometry>, window: Window) -> Self {
        InvariantTable {
            geometry,
            window,
            entries: HashMap::new(),
        }
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geometry
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CorrelatorKey) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &CorrelatorKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn insert(&mut self, key: CorrelatorKey, value: Rational, provenance: Provenance) {
        debug_assert!(
            dimension_filter(&self.geometry, &key.beta, &key.insertions),
            "storing a key the dimension axiom kills: {key}"
        );
        self.entries.insert(key, Entry { value, provenance });
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CorrelatorKey, &Entry)> {
        self.entries.iter()
    }

    /// Entries in key order, for stable output.
    pub fn sorted(&self) -> Vec<(&CorrelatorKey, &Entry)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub(crate) fn values(&self) -> HashMap<CorrelatorKey, Rational> {
        self.entries
            .iter()
            .map(|(k, e)| (k.clone(), e.value.clone()))
            .collect()
    }

    /// `<Δ_{raw_1} .. Δ_{raw_l}>_beta` for arbitrary (unsorted, unreduced)
    /// insertions.
    pub fn invariant(&self, beta: &CurveClass, raw: &[usize]) -> Result<Rational, GwError> {
        let g = &self.geometry;
        g.check_rank(beta)?;
        if beta.is_zero() {
            return Ok(if raw.len() == 3 {
                g.triple_intersection(raw[0], raw[1], raw[2])
            } else {
                Rational::zero()
            });
        }
        if !g.is_effective(beta) || !dimension_filter(g, beta, raw) {
            return Ok(Rational::zero());
        }
        let (key, multiplier) = divisor_reduce(g, beta, raw)?;
        if multiplier.is_zero() || forced_zero(g, &key, false).is_some() {
            return Ok(Rational::zero());
        }
        match self.entries.get(&key) {
            Some(e) => Ok(e.value.clone() * multiplier),
            None if g.c1_pairing(beta) > self.window.c1_bound => Err(GwError::OutsideWindow {
                key: key.display(g),
                c1: g.c1_pairing(beta),
                bound: self.window.c1_bound,
            }),
            None => Err(GwError::Missing {
                key: key.display(g),
            }),
        }
    }

    /// Reduced key lookup; `None` when not stored.
    pub fn value(&self, key: &CorrelatorKey) -> Option<&Rational> {
        self.entries.get(key).map(|e| &e.value)
    }
}
