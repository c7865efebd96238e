use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::cache::{CacheHeader, InvariantCache};
use super::key::{
    divisor_reduce, forced_zero, insertable_classes, keys_for_class, pure_blowup, CorrelatorKey,
    Provenance, Window, ZeroReason,
};
use super::table::InvariantTable;
use super::wdvv::{SolveStats, WdvvSystem};
use super::GwError;
use crate::exact_algebra::{int, Rational};
use crate::geometry::{CurveClass, Geometry, GeometryError};

/// How a blow-up obtains its non-exceptional invariants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PullbackMode {
    /// Copy them from the parent's table (they agree by the pullback theorem).
    #[default]
    Import,
    /// Treat them as unknowns and re-derive them by WDVV from the `P^n` seed.
    Solve,
}

impl PullbackMode {
    fn label(self) -> &'static str {
        match self {
            PullbackMode::Import => "import",
            PullbackMode::Solve => "solve",
        }
    }
}

/// Which unknowns must be determined for the solve to succeed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Targets {
    All,
    /// Keys reachable from three-point correlators (the small quantum product).
    ThreePoint,
    Keys(Vec<CorrelatorKey>),
}

impl Targets {
    fn label(&self) -> String {
        match self {
            Targets::All => "all".into(),
            Targets::ThreePoint => "three-point".into(),
            Targets::Keys(keys) => {
                let mut k: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
                k.sort();
                format!("keys:{}", k.join(";"))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// `None`: [`Window::default_for`] of each geometry.
    pub window: Option<Window>,
    pub pullback: PullbackMode,
    /// Install mixed-vanishing zeros as axioms instead of solving for them.
    pub impose_mixed_vanishing: bool,
    pub targets: Targets,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            window: None,
            pullback: PullbackMode::Import,
            impose_mixed_vanishing: true,
            targets: Targets::ThreePoint,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveReport {
    pub stats: SolveStats,
    pub unknowns: usize,
    pub undetermined: Vec<CorrelatorKey>,
    pub from_cache: bool,
}

/// Builds and memoizes invariant tables along blow-up chains.
pub struct Engine {
    options: EngineOptions,
    tables: HashMap<(String, String, bool), Arc<InvariantTable>>,
    pure: HashMap<(usize, i64), Arc<InvariantTable>>,
    reports: HashMap<String, SolveReport>,
    cache: Option<InvariantCache>,
}

impl Engine {
    pub fn new(options: EngineOptions) -> Self {
        Engine {
            options,
            tables: HashMap::new(),
            pure: HashMap::new(),
            reports: HashMap::new(),
            cache: None,
        }
    }

    pub fn with_cache(mut self, path: impl Into<PathBuf>) -> Result<Self, GwError> {
        self.cache = Some(InvariantCache::open(path.into())?);
        Ok(self)
    }

    pub fn options(&self) -> &EngineOptions {
        &self.options
    }

    pub fn window_for(&self, g: &Geometry) -> Window {
        self.options
            .window
            .unwrap_or_else(|| Window::default_for(g))
    }

    /// Report of the most recent build of `g` (strict request).
    pub fn report(&self, g: &Geometry) -> Option<&SolveReport> {
        self.reports.get(g.id())
    }

    /// Table for `g` with the configured targets; fails with a certificate if a
    /// target stays undetermined.
    pub fn table(&mut self, g: &Arc<Geometry>) -> Result<Arc<InvariantTable>, GwError> {
        let targets = self.options.targets.clone();
        self.build(g, &targets, true)
    }

    /// `<raw>_beta` on `g`, building the table on demand.
    pub fn invariant(
        &mut self,
        g: &Arc<Geometry>,
        beta: &CurveClass,
        raw: &[usize],
    ) -> Result<Rational, GwError> {
        self.table(g)?.invariant(beta, raw)
    }

    /// A non-exceptional invariant of a blow-up answered by its parent's table.
    pub fn pullback_invariant(
        &mut self,
        g: &Arc<Geometry>,
        beta: &CurveClass,
        raw: &[usize],
    ) -> Result<Rational, GwError> {
        let parent = g
            .parent()
            .ok_or_else(|| GwError::NotABlowUp(g.id().to_string()))?
            .clone();
        g.check_rank(beta)?;
        let last = g.blow_up_count() - 1;
        if beta.exceptional_multiple(last) != 0 || raw.iter().any(|&i| i >= parent.basis_len()) {
            return Err(GwError::NotPulledBack(g.id().to_string()));
        }
        let pb = beta.truncate_last();
        let table = self.build(&parent, &Targets::All, false)?;
        table.invariant(&pb, raw)
    }

    /// `<E^{k_1} .. E^{k_l}>_{d E'}` on `Bl_1(P^n)`; depends only on `n`.
    pub fn pure_exceptional_invariant(
        &mut self,
        n: usize,
        d: i64,
        powers: &[usize],
    ) -> Result<Rational, GwError> {
        let g = Geometry::blown_up_projective_space(n, 1)?;
        let raw: Vec<usize> = powers.iter().map(|&k| g.exceptional_index(0, k)).collect();
        let window = self.window_for(&g);
        let table = self.pure_table(&g, window)?;
        table.invariant(&CurveClass::exceptional(2, 0, d), &raw)
    }

    /// Purely exceptional invariants of `Bl_1(P^n)`; they are the same for
    /// every blown-up point of every `n`-dimensional blow-up.
    pub fn pure_exceptional_table(&mut self, n: usize) -> Result<Arc<InvariantTable>, GwError> {
        let g = Geometry::blown_up_projective_space(n, 1)?;
        let window = self.window_for(&g);
        self.pure_table(&g, window)
    }

    fn pure_table(
        &mut self,
        g1: &Arc<Geometry>,
        window: Window,
    ) -> Result<Arc<InvariantTable>, GwError> {
        let n = g1.dim();
        if let Some(t) = self.pure.get(&(n, window.c1_bound)) {
            return Ok(Arc::clone(t));
        }
        let mut table = InvariantTable::new(Arc::clone(g1), window);
        let top = g1.exceptional_index(0, n - 1);
        let seed = if n == 2 { vec![] } else { vec![top, top] };
        table.insert(
            CorrelatorKey::new(CurveClass::exceptional(2, 0, 1), seed),
            Rational::one(),
            Provenance::Seed,
        );
        let family: Vec<usize> = (1..n).map(|k| g1.exceptional_index(0, k)).collect();
        let s_basis: Vec<usize> = family
            .iter()
            .copied()
            .filter(|&i| !g1.basis()[i].is_divisor())
            .collect();
        let classes: Vec<CurveClass> = g1
            .window_classes(window.c1_bound)?
            .into_iter()
            .filter(|c| pure_blowup(c).is_some())
            .collect();
        let mut unknowns = Vec::new();
        for beta in &classes {
            for k in keys_for_class(g1, beta, &s_basis, &window) {
                if !table.contains(&k) {
                    unknowns.push(k);
                }
            }
        }
        sort_well_ordered(g1, &mut unknowns);
        let known = table.values();
        let outcome = WdvvSystem::new(
            g1,
            &known,
            classes.clone(),
            family,
            s_basis,
            unknowns.clone(),
        )
        .solve(&classes, &unknowns)?;
        for (k, v) in outcome.solved {
            table.insert(k, v, Provenance::Recursion);
        }
        let table = Arc::new(table);
        self.pure.insert((n, window.c1_bound), Arc::clone(&table));
        Ok(table)
    }

    fn build(
        &mut self,
        g: &Arc<Geometry>,
        targets: &Targets,
        strict: bool,
    ) -> Result<Arc<InvariantTable>, GwError> {
        g.check_invariant_support()?;
        let window = self.window_for(g);
        if window.c1_bound < 1 {
            return Err(GwError::BadWindow);
        }
        let memo_key = (g.id().to_string(), targets.label(), strict);
        if let Some(t) = self.tables.get(&memo_key) {
            return Ok(Arc::clone(t));
        }
        let header = CacheHeader::new(
            g,
            window,
            self.options.pullback.label(),
            self.options.impose_mixed_vanishing,
            &targets.label(),
        );
        if let Some(cache) = &self.cache {
            if let Some(table) = cache.load(g, &header, strict)? {
                let table = Arc::new(table);
                self.tables.insert(memo_key, Arc::clone(&table));
                if strict {
                    self.reports.insert(
                        g.id().to_string(),
                        SolveReport {
                            from_cache: true,
                            ..SolveReport::default()
                        },
                    );
                }
                return Ok(table);
            }
        }

        let mut table = InvariantTable::new(Arc::clone(g), window);
        self.seed(g, &mut table, window)?;
        let classes = g.window_classes(window.c1_bound)?;
        let insertable = insertable_classes(g);
        let mut unknowns = Vec::new();
        for beta in &classes {
            for k in keys_for_class(g, beta, &insertable, &window) {
                if table.contains(&k) {
                    continue;
                }
                match forced_zero(g, &k, self.options.impose_mixed_vanishing) {
                    Some(ZeroReason::PureWithForeignInsertion) => {}
                    Some(ZeroReason::Mixed { .. }) => {
                        table.insert(k, Rational::zero(), Provenance::AxiomZero)
                    }
                    None => unknowns.push(k),
                }
            }
        }
        sort_well_ordered(g, &mut unknowns);
        let target_keys = self.target_keys(g, &table, &unknowns, targets, window)?;
        let known = table.values();
        let abcd: Vec<usize> = (1..g.basis_len()).collect();
        let outcome = WdvvSystem::new(
            g,
            &known,
            classes.clone(),
            abcd,
            insertable,
            unknowns.clone(),
        )
        .solve(&classes, &target_keys)?;
        for (k, v) in outcome.solved {
            let provenance = if pure_blowup(&k.beta).is_some() {
                Provenance::Recursion
            } else {
                Provenance::WdvvSolved
            };
            table.insert(k, v, provenance);
        }
        let target_set: HashSet<&CorrelatorKey> = target_keys.iter().collect();
        let missing: Vec<CorrelatorKey> = outcome
            .undetermined
            .iter()
            .filter(|k| target_set.contains(k))
            .cloned()
            .collect();
        if strict {
            self.reports.insert(
                g.id().to_string(),
                SolveReport {
                    stats: outcome.stats,
                    unknowns: unknowns.len(),
                    undetermined: outcome.undetermined.clone(),
                    from_cache: false,
                },
            );
        }
        if strict && !missing.is_empty() {
            return Err(GwError::Underdetermined {
                geometry: g.id().to_string(),
                certificate: missing.iter().map(|k| k.display(g)).collect(),
            });
        }
        if let Some(cache) = &mut self.cache {
            cache.store(&table, &header.completed(missing.is_empty()))?;
        }
        let table = Arc::new(table);
        self.tables.insert(memo_key, Arc::clone(&table));
        Ok(table)
    }

    fn seed(
        &mut self,
        g: &Arc<Geometry>,
        table: &mut InvariantTable,
        window: Window,
    ) -> Result<(), GwError> {
        let n = g.dim();
        let r = g.blow_up_count();
        let rank = g.curve_rank();
        let line_seed = || {
            let ins = if n == 1 { vec![] } else { vec![n, n] };
            CorrelatorKey::new(CurveClass::line(rank, 1), ins)
        };
        if r == 0 {
            table.insert(line_seed(), Rational::one(), Provenance::Seed);
            return Ok(());
        }
        let families: Vec<usize> = match self.options.pullback {
            PullbackMode::Import => {
                let parent = Arc::clone(g.parent().expect("blow-up has a parent"));
                let pt = self.build(&parent, &Targets::All, false)?;
                for (k, e) in pt.iter() {
                    let mut coords = k.beta.coords().to_vec();
                    coords.push(0);
                    let key = CorrelatorKey::new(CurveClass::new(coords), k.insertions.clone());
                    if g.c1_pairing(&key.beta) <= window.c1_bound {
                        let provenance = match e.provenance {
                            Provenance::Seed => Provenance::Seed,
                            _ => Provenance::Imported,
                        };
                        table.insert(key, e.value.clone(), provenance);
                    }
                }
                vec![r - 1]
            }
            PullbackMode::Solve => {
                table.insert(line_seed(), Rational::one(), Provenance::Seed);
                (0..r).collect()
            }
        };
        let g1 = Geometry::blown_up_projective_space(n, 1)?;
        let pure = self.pure_table(&g1, window)?;
        for family in families {
            for (k, e) in pure.iter() {
                let d = k.beta.exceptional_multiple(0);
                let beta = CurveClass::exceptional(rank, family, d);
                if g.c1_pairing(&beta) > window.c1_bound {
                    continue;
                }
                let ins = k
                    .insertions
                    .iter()
                    .map(|&i| {
                        g.exceptional_index(family, g1.basis()[i].exceptional_power().unwrap())
                    })
                    .collect();
                table.insert(CorrelatorKey::new(beta, ins), e.value.clone(), e.provenance);
            }
        }
        Ok(())
    }

    fn target_keys(
        &self,
        g: &Geometry,
        table: &InvariantTable,
        unknowns: &[CorrelatorKey],
        targets: &Targets,
        window: Window,
    ) -> Result<Vec<CorrelatorKey>, GwError> {
        Ok(match targets {
            Targets::All => unknowns.to_vec(),
            Targets::ThreePoint => {
                if window.c1_bound < 2 * g.dim() as i64 {
                    return Err(GwError::WindowTooSmall {
                        needed: 2 * g.dim() as i64,
                        bound: window.c1_bound,
                    });
                }
                let wanted: HashSet<CorrelatorKey> =
                    three_point_keys(g, window)?.into_iter().collect();
                unknowns
                    .iter()
                    .filter(|k| wanted.contains(k))
                    .cloned()
                    .collect()
            }
            Targets::Keys(keys) => {
                let set: HashSet<&CorrelatorKey> = unknowns.iter().collect();
                for k in keys {
                    if g.c1_pairing(&k.beta) > window.c1_bound {
                        return Err(GwError::OutsideWindow {
                            key: k.display(g),
                            c1: g.c1_pairing(&k.beta),
                            bound: window.c1_bound,
                        });
                    }
                }
                keys.iter()
                    .filter(|k| set.contains(k) && !table.contains(k))
                    .cloned()
                    .collect()
            }
        })
    }
}

/// Evaluates every associativity equation of the window on the stored
/// values; equations involving keys that are not stored are skipped.
/// Returns the number of equations checked and the violated ones.
pub fn wdvv_audit(table: &InvariantTable) -> Result<(usize, Vec<String>), GwError> {
    let g = table.geometry();
    let classes = g.window_classes(table.window().c1_bound)?;
    let known = table.values();
    let abcd: Vec<usize> = (1..g.basis_len()).collect();
    let system = WdvvSystem::new(
        g,
        &known,
        classes.clone(),
        abcd,
        insertable_classes(g),
        Vec::new(),
    );
    Ok(system.audit(&classes))
}

/// Reduced keys of all nonvanishing three-point correlators with `c1 <= 2n`.
pub fn three_point_keys(g: &Geometry, window: Window) -> Result<Vec<CorrelatorKey>, GeometryError> {
    let bound = window.c1_bound.min(2 * g.dim() as i64);
    let mut out = HashSet::new();
    let m = g.basis_len();
    for beta in g.window_classes(bound)? {
        for i in 1..m {
            for j in i..m {
                for k in j..m {
                    let raw = [i, j, k];
                    if !super::key::dimension_filter(g, &beta, &raw) {
                        continue;
                    }
                    let (key, mult) = divisor_reduce(g, &beta, &raw).expect("nonzero class");
                    if mult != int(0) && forced_zero(g, &key, false).is_none() {
                        out.insert(key);
                    }
                }
            }
        }
    }
    let mut v: Vec<CorrelatorKey> = out.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Orders unknowns by `(c1, insertions, exceptional insertions, |d|)`.
fn sort_well_ordered(g: &Geometry, keys: &mut [CorrelatorKey]) {
    keys.sort_by_cached_key(|k| {
        let exceptional = k
            .insertions
            .iter()
            .filter(|&&i| g.basis()[i].exceptional_blowup().is_some())
            .count();
        let d: i64 = (0..g.blow_up_count())
            .map(|i| k.beta.exceptional_multiple(i).abs())
            .sum();
        (
            g.c1_pairing(&k.beta),
            k.insertions.len(),
            exceptional,
            d,
            k.clone(),
        )
    });
}
