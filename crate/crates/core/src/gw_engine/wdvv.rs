//! WDVV reconstruction at the level of correlators.
//!
//! For a target class `beta`, basis classes `a, b, c, d` and a multiset `S` of
//! extra non-divisor insertions,
//!
//! ```text
//! F(xy|zw) = <x y (z∪w) S>_beta + <(x∪y) z w S>_beta
//!          + sum_{beta1+beta2=beta} sum_{S1+S2=S} sum_{e,f}
//!                <x y S1 e>_beta1 g^{ef} <f z w S2>_beta2
//! ```
//!
//! and associativity says `F(ab|cd) = F(ac|bd) = F(ad|bc)`. Both split classes
//! are nonzero and effective, so every quadratic term involves strictly
//! smaller classes. Equations are fed to an incremental exact eliminator one
//! class at a time in increasing `c1`.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};

use super::key::{
    dimension_filter, divisor_reduce, forced_zero, multisets_with_weight, CorrelatorKey,
};
use super::GwError;
use crate::exact_algebra::{format_rational, int, Added, LinearRow, Rational, SparseEliminator};
use crate::geometry::{CurveClass, Geometry};

enum Lin {
    Zero,
    Const(Rational),
    Var(usize, Rational),
}

/// A correlator needed by an equation is neither known nor an unknown of the
/// system (outside the enumerated range); the equation is skipped.
struct Missing;

#[derive(Default)]
struct RowBuilder {
    row: LinearRow,
    nonlinear: bool,
}

impl RowBuilder {
    fn add(&mut self, l: Lin, w: &Rational) {
        match l {
            Lin::Zero => {}
            Lin::Const(c) => self.row.constant -= w * c,
            Lin::Var(v, m) => self.row.add(v, &(w * m)),
        }
    }

    fn product(&mut self, a: Lin, b: Lin, w: &Rational) {
        match (a, b) {
            (Lin::Zero, _) | (_, Lin::Zero) => {}
            (Lin::Const(x), Lin::Const(y)) => self.row.constant -= w * x * y,
            (Lin::Const(c), Lin::Var(v, m)) | (Lin::Var(v, m), Lin::Const(c)) => {
                self.row.add(v, &(w * c * m))
            }
            (Lin::Var(..), Lin::Var(..)) => self.nonlinear = true,
        }
    }
}

#[derive(Clone, Debug)]
struct Equation {
    beta: CurveClass,
    abcd: [usize; 4],
    s: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub equations: usize,
    pub rank: usize,
    pub deferred: usize,
}

pub(crate) struct SolveOutcome {
    pub solved: Vec<(CorrelatorKey, Rational)>,
    pub undetermined: Vec<CorrelatorKey>,
    pub stats: SolveStats,
}

pub(crate) struct WdvvSystem<'a> {
    g: &'a Geometry,
    known: &'a HashMap<CorrelatorKey, Rational>,
    effective: HashSet<CurveClass>,
    window_classes: Vec<CurveClass>,
    abcd_basis: Vec<usize>,
    s_basis: Vec<usize>,
    dual_by_degree: Vec<Vec<(usize, usize, Rational)>>,
    splits: HashMap<CurveClass, Vec<(CurveClass, CurveClass)>>,
    var_of: HashMap<CorrelatorKey, usize>,
    var_keys: Vec<CorrelatorKey>,
    values: Vec<Option<Rational>>,
    pending_by_class: HashMap<CurveClass, usize>,
    /// Classes already visited by [`Self::solve`].
    visited: HashSet<CurveClass>,
    /// Undetermined unknowns among visited classes.
    open: usize,
    elim: SparseEliminator,
    stats: SolveStats,
}

impl<'a> WdvvSystem<'a> {
    /// `window_classes`: every effective class that may occur, sorted by `c1`.
    /// `unknowns` are numbered in the given order; later ones are eliminated first.
    pub fn new(
        g: &'a Geometry,
        known: &'a HashMap<CorrelatorKey, Rational>,
        window_classes: Vec<CurveClass>,
        abcd_basis: Vec<usize>,
        s_basis: Vec<usize>,
        unknowns: Vec<CorrelatorKey>,
    ) -> Self {
        let mut dual_by_degree = vec![Vec::new(); g.dim() + 1];
        for (e, f, c) in g.dual_pairs() {
            dual_by_degree[g.basis()[*e].complex_degree].push((*e, *f, c.clone()));
        }
        let mut pending_by_class = HashMap::new();
        for k in &unknowns {
            *pending_by_class.entry(k.beta.clone()).or_insert(0) += 1;
        }
        let var_of = unknowns
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        WdvvSystem {
            g,
            known,
            effective: window_classes.iter().cloned().collect(),
            window_classes,
            abcd_basis,
            s_basis,
            dual_by_degree,
            splits: HashMap::new(),
            var_of,
            values: vec![None; unknowns.len()],
            var_keys: unknowns,
            pending_by_class,
            visited: HashSet::new(),
            open: 0,
            elim: SparseEliminator::new(),
            stats: SolveStats::default(),
        }
    }

    fn corr(&self, beta: &CurveClass, raw: &[usize]) -> Result<Lin, Missing> {
        if beta.is_zero() {
            return Ok(if raw.len() == 3 {
                Lin::Const(self.g.triple_intersection(raw[0], raw[1], raw[2]))
            } else {
                Lin::Zero
            });
        }
        if !self.effective.contains(beta) || !dimension_filter(self.g, beta, raw) {
            return Ok(Lin::Zero);
        }
        let (key, m) = divisor_reduce(self.g, beta, raw).map_err(|_| Missing)?;
        if m.is_zero() || forced_zero(self.g, &key, false).is_some() {
            return Ok(Lin::Zero);
        }
        if let Some(v) = self.known.get(&key) {
            return Ok(Lin::Const(v * m));
        }
        match self.var_of.get(&key) {
            Some(&id) => Ok(match &self.values[id] {
                Some(v) => Lin::Const(v * m),
                None => Lin::Var(id, m),
            }),
            None => Err(Missing),
        }
    }

    fn splits_of(&mut self, beta: &CurveClass) -> Vec<(CurveClass, CurveClass)> {
        if let Some(s) = self.splits.get(beta) {
            return s.clone();
        }
        let c = self.g.c1_pairing(beta);
        let mut out = Vec::new();
        for b1 in &self.window_classes {
            if self.g.c1_pairing(b1) >= c {
                break;
            }
            let b2 = beta - b1;
            if self.effective.contains(&b2) {
                out.push((b1.clone(), b2));
            }
        }
        self.splits.insert(beta.clone(), out.clone());
        out
    }

    fn excess(&self, classes: &[usize]) -> i64 {
        classes
            .iter()
            .map(|&i| self.g.basis()[i].complex_degree as i64 - 1)
            .sum()
    }

    /// Adds `sign * F(xy|zw)` for the given target and extra insertions.
    fn add_f(
        &self,
        b: &mut RowBuilder,
        splits: &[(CurveClass, CurveClass)],
        beta: &CurveClass,
        [x, y, z, w]: [usize; 4],
        s: &[usize],
        sign: &Rational,
    ) -> Result<(), Missing> {
        let g = self.g;
        let mut raw = Vec::with_capacity(s.len() + 4);
        for &(k, ref c) in g.cup(z, w) {
            raw.clear();
            raw.extend([x, y, k]);
            raw.extend_from_slice(s);
            b.add(self.corr(beta, &raw)?, &(sign * c));
        }
        for &(k, ref c) in g.cup(x, y) {
            raw.clear();
            raw.extend([k, z, w]);
            raw.extend_from_slice(s);
            b.add(self.corr(beta, &raw)?, &(sign * c));
        }
        if splits.is_empty() {
            return Ok(());
        }
        let n = g.dim() as i64;
        let xy_excess = self.excess(&[x, y]);
        for (s1, s2, weight) in sub_multisets(s) {
            let left_excess = xy_excess + self.excess(&s1);
            let scaled = sign * weight;
            for (b1, b2) in splits {
                let deg_e = g.c1_pairing(b1) + n - 3 - left_excess + 1;
                if deg_e < 1 || deg_e >= n {
                    continue;
                }
                for (e, f, gef) in &self.dual_by_degree[deg_e as usize] {
                    raw.clear();
                    raw.extend([x, y, *e]);
                    raw.extend_from_slice(&s1);
                    let left = self.corr(b1, &raw)?;
                    if matches!(left, Lin::Zero) {
                        continue;
                    }
                    raw.clear();
                    raw.extend([*f, z, w]);
                    raw.extend_from_slice(&s2);
                    let right = self.corr(b2, &raw)?;
                    b.product(left, right, &(&scaled * gef));
                }
            }
        }
        Ok(())
    }

    /// Rows `F(P_0) - F(P_j)` over the distinct pairings of `abcd`.
    /// `Ok(None)` when some row is nonlinear in the current unknowns.
    fn rows_for(&mut self, eq: &Equation) -> Result<Option<Vec<LinearRow>>, Missing> {
        let [a, b, c, d] = eq.abcd;
        let mut pairings: Vec<[usize; 4]> = Vec::new();
        for p in [[a, b, c, d], [a, c, b, d], [a, d, b, c]] {
            let canon = canonical_pairing(p);
            if !pairings.contains(&canon) {
                pairings.push(canon);
            }
        }
        if pairings.len() < 2 {
            return Ok(Some(Vec::new()));
        }
        let splits = self.splits_of(&eq.beta);
        let one = Rational::one();
        let minus = -Rational::one();
        let mut rows = Vec::new();
        for p in &pairings[1..] {
            let mut builder = RowBuilder::default();
            self.add_f(&mut builder, &splits, &eq.beta, pairings[0], &eq.s, &one)?;
            self.add_f(&mut builder, &splits, &eq.beta, *p, &eq.s, &minus)?;
            if builder.nonlinear {
                return Ok(None);
            }
            rows.push(builder.row);
        }
        Ok(Some(rows))
    }

    fn equations_for(&self, beta: &CurveClass) -> Vec<Equation> {
        let g = self.g;
        let budget = g.c1_pairing(beta) + g.dim() as i64;
        let deg = |i: usize| g.basis()[i].complex_degree as i64;
        let weights: Vec<i64> = self.s_basis.iter().map(|&i| deg(i) - 1).collect();
        let m = self.abcd_basis.len();
        let mut out = Vec::new();
        for i0 in 0..m {
            for i1 in i0..m {
                for i2 in i1..m {
                    for i3 in i2..m {
                        let abcd = [
                            self.abcd_basis[i0],
                            self.abcd_basis[i1],
                            self.abcd_basis[i2],
                            self.abcd_basis[i3],
                        ];
                        let rest = budget - abcd.iter().map(|&i| deg(i)).sum::<i64>();
                        if rest < 0 {
                            continue;
                        }
                        let mut cur = Vec::new();
                        multisets_with_weight(
                            &self.s_basis,
                            &weights,
                            0,
                            rest,
                            &mut cur,
                            &mut |s| {
                                out.push(Equation {
                                    beta: beta.clone(),
                                    abcd,
                                    s: s.to_vec(),
                                })
                            },
                        );
                    }
                }
            }
        }
        out.sort_by_key(|e| e.s.len());
        out
    }

    /// Feeds one equation; returns `true` if it had to be deferred.
    fn process(&mut self, eq: &Equation) -> Result<bool, GwError> {
        let rows = match self.rows_for(eq) {
            Err(Missing) => return Ok(false),
            Ok(None) => return Ok(true),
            Ok(Some(rows)) => rows,
        };
        for row in rows {
            if row.is_trivial() && row.constant.is_zero() {
                continue;
            }
            self.stats.equations += 1;
            match self.elim.add(row) {
                Err(bad) => {
                    return Err(GwError::Inconsistent {
                        class: eq.beta.to_string(),
                        detail: format!(
                            "insertions {:?} + {:?} leave residual {}",
                            eq.abcd,
                            eq.s,
                            format_rational(&bad.residual)
                        ),
                    })
                }
                Ok(Added::Redundant) => {}
                Ok(Added::NewPivot { determined, .. }) => {
                    for (v, val) in determined {
                        if self.values[v].is_none() {
                            let beta = &self.var_keys[v].beta;
                            *self.pending_by_class.get_mut(beta).expect("counted") -= 1;
                            if self.visited.contains(beta) {
                                self.open -= 1;
                            }
                            self.values[v] = Some(val);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// Processes `classes` (sorted by `c1`) until every unknown in `targets`
    /// is determined or the equations run out.
    pub fn solve(
        mut self,
        classes: &[CurveClass],
        targets: &[CorrelatorKey],
    ) -> Result<SolveOutcome, GwError> {
        let target_ids: Vec<usize> = targets
            .iter()
            .filter_map(|k| self.var_of.get(k).copied())
            .collect();
        let mut deferred: Vec<Equation> = Vec::new();
        for beta in classes {
            if target_ids.iter().all(|&t| self.values[t].is_some()) {
                break;
            }
            if self.visited.insert(beta.clone()) {
                self.open += self.pending_by_class.get(beta).copied().unwrap_or(0);
            }
            if self.open == 0 {
                continue;
            }
            let before = self.determined_count();
            for eq in self.equations_for(beta) {
                if self.open == 0 {
                    break;
                }
                if self.process(&eq)? {
                    deferred.push(eq);
                }
            }
            if self.determined_count() > before && !deferred.is_empty() {
                deferred = self.retry(deferred)?;
            }
        }
        let mut progress = true;
        while progress && !deferred.is_empty() {
            let before = self.determined_count();
            deferred = self.retry(deferred)?;
            progress = self.determined_count() > before;
        }
        self.stats.rank = self.elim.rank();
        self.stats.deferred = deferred.len();
        let mut solved = Vec::new();
        let mut undetermined = Vec::new();
        for (k, v) in self.var_keys.into_iter().zip(self.values) {
            match v {
                Some(v) => solved.push((k, v)),
                None => undetermined.push(k),
            }
        }
        Ok(SolveOutcome {
            solved,
            undetermined,
            stats: self.stats,
        })
    }

    fn determined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    fn retry(&mut self, eqs: Vec<Equation>) -> Result<Vec<Equation>, GwError> {
        let mut still = Vec::new();
        for eq in eqs {
            if self.process(&eq)? {
                still.push(eq);
            }
        }
        Ok(still)
    }

    /// Evaluates every equation of the given classes on known values only and
    /// returns `(checked, violations)`. Equations touching unknown keys are
    /// skipped.
    pub fn audit(mut self, classes: &[CurveClass]) -> (usize, Vec<String>) {
        let mut checked = 0;
        let mut bad = Vec::new();
        for beta in classes {
            for eq in self.equations_for(beta) {
                if let Ok(Some(rows)) = self.rows_for(&eq) {
                    checked += 1;
                    if rows
                        .iter()
                        .any(|r| !r.is_trivial() || !r.constant.is_zero())
                    {
                        bad.push(format!("{} {:?} {:?}", eq.beta, eq.abcd, eq.s));
                    }
                }
            }
        }
        (checked, bad)
    }
}

fn canonical_pairing([a, b, c, d]: [usize; 4]) -> [usize; 4] {
    let p = (a.min(b), a.max(b));
    let q = (c.min(d), c.max(d));
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    [p.0, p.1, q.0, q.1]
}

/// All splittings of a sorted multiset into `(S1, S2)` with the number of
/// labelled splittings each represents.
fn sub_multisets(s: &[usize]) -> Vec<(Vec<usize>, Vec<usize>, Rational)> {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &x in s {
        match groups.last_mut() {
            Some((c, n)) if *c == x => *n += 1,
            _ => groups.push((x, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new(), Rational::one())];
    for (class, count) in groups {
        let mut next = Vec::with_capacity(out.len() * (count + 1));
        for (s1, s2, w) in &out {
            for take in 0..=count {
                let mut a = s1.clone();
                let mut b = s2.clone();
                a.extend(std::iter::repeat_n(class, take));
                b.extend(std::iter::repeat_n(class, count - take));
                next.push((a, b, w * int(binomial(count, take))));
            }
        }
        out = next;
    }
    out
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_multisets_count_labelled_splittings() {
        let s = vec![2, 2, 2, 5];
        let parts = sub_multisets(&s);
        assert_eq!(parts.len(), 4 * 2);
        let total: Rational = parts.iter().map(|(_, _, w)| w.clone()).sum();
        assert_eq!(total, int(16));
        assert_eq!(binomial(5, 2), 10);
    }

    #[test]
    fn pairings_canonical() {
        assert_eq!(canonical_pairing([3, 1, 2, 0]), [0, 2, 1, 3]);
        assert_eq!(canonical_pairing([1, 1, 1, 1]), [1, 1, 1, 1]);
    }
}
