//! JSON-lines persistence of invariant tables.
//!
//! One header line per stored table (`{"header": {..}}`, naming the geometry
//! and the request) followed by one record per stored key. Values use the canonical `"num/den"` text, so a round trip
//! is bit-exact.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::key::{CorrelatorKey, Provenance, Window};
use super::table::InvariantTable;
use super::GwError;
use crate::exact_algebra::{format_rational, parse_rational};
use crate::geometry::{CurveClass, Geometry, GeometryDocument};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub geometry: String,
    pub document: GeometryDocument,
    pub window: Window,
    pub pullback: String,
    pub impose_mixed_vanishing: bool,
    pub targets: String,
    pub complete: bool,
}

impl CacheHeader {
    pub fn new(g: &Geometry, window: Window, pullback: &str, impose: bool, targets: &str) -> Self {
        CacheHeader {
            geometry: g.id().to_string(),
            document: GeometryDocument::from_geometry(g),
            window,
            pullback: pullback.to_string(),
            impose_mixed_vanishing: impose,
            targets: targets.to_string(),
            complete: false,
        }
    }

    pub fn completed(&self, complete: bool) -> Self {
        CacheHeader {
            complete,
            ..self.clone()
        }
    }

    fn same_request(&self, other: &CacheHeader) -> bool {
        self.completed(true) == other.completed(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub geometry: String,
    pub beta: Vec<i64>,
    pub insertions: Vec<usize>,
    pub value: String,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: CacheHeader,
}

/// One stored table: the request it answers and its records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CachedTable {
    pub header: CacheHeader,
    pub records: Vec<CacheRecord>,
}

#[derive(Debug)]
pub struct InvariantCache {
    path: PathBuf,
    tables: Vec<CachedTable>,
}

fn cache_err(path: &Path, what: impl std::fmt::Display) -> GwError {
    GwError::Cache(format!("{}: {what}", path.display()))
}

impl InvariantCache {
    /// Opens `path`; a missing file is an empty cache.
    pub fn open(path: PathBuf) -> Result<Self, GwError> {
        let mut cache = InvariantCache {
            path,
            tables: Vec::new(),
        };
        let text = match fs::read_to_string(&cache.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(cache_err(&cache.path, e)),
        };
        for (no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let at =
                |e: &dyn std::fmt::Display| cache_err(&cache.path, format!("line {}: {e}", no + 1));
            let value: serde_json::Value = serde_json::from_str(line).map_err(|e| at(&e))?;
            if value.get("header").is_some() {
                let h: HeaderLine = serde_json::from_value(value).map_err(|e| at(&e))?;
                cache.put(CachedTable {
                    header: h.header,
                    records: Vec::new(),
                });
            } else {
                let r: CacheRecord = serde_json::from_value(value).map_err(|e| at(&e))?;
                match cache.tables.last_mut() {
                    Some(t) if t.header.geometry == r.geometry => t.records.push(r),
                    _ => return Err(at(&format!("record for {} outside its table", r.geometry))),
                }
            }
        }
        Ok(cache)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Stored tables of `geometry`, one per request.
    pub fn tables(&self, geometry: &str) -> impl Iterator<Item = &CachedTable> {
        let geometry = geometry.to_string();
        self.tables
            .iter()
            .filter(move |t| t.header.geometry == geometry)
    }

    /// The cached table for `g` if it was computed under the same request.
    pub fn load(
        &self,
        g: &Arc<Geometry>,
        wanted: &CacheHeader,
        need_complete: bool,
    ) -> Result<Option<InvariantTable>, GwError> {
        let Some(cached) = self.tables.iter().find(|t| t.header.same_request(wanted)) else {
            return Ok(None);
        };
        if need_complete && !cached.header.complete {
            return Ok(None);
        }
        let mut table = InvariantTable::new(Arc::clone(g), wanted.window);
        for r in &cached.records {
            let value = parse_rational(&r.value).map_err(|e| cache_err(&self.path, e))?;
            if r.beta.len() != g.curve_rank() || r.insertions.iter().any(|&i| i >= g.basis_len()) {
                return Err(cache_err(
                    &self.path,
                    format!("record out of range for {}", g.id()),
                ));
            }
            let key = CorrelatorKey::new(CurveClass::new(r.beta.clone()), r.insertions.clone());
            if !super::key::dimension_filter(g, &key.beta, &key.insertions) {
                return Err(cache_err(
                    &self.path,
                    format!("record {key} violates the dimension axiom"),
                ));
            }
            table.insert(key, value, r.provenance);
        }
        Ok(Some(table))
    }

    /// Replaces the table stored for the same request and rewrites the file.
    pub fn store(&mut self, table: &InvariantTable, header: &CacheHeader) -> Result<(), GwError> {
        let id = table.geometry().id().to_string();
        let records = table
            .sorted()
            .into_iter()
            .map(|(k, e)| CacheRecord {
                geometry: id.clone(),
                beta: k.beta.coords().to_vec(),
                insertions: k.insertions.clone(),
                value: format_rational(&e.value),
                provenance: e.provenance,
            })
            .collect();
        self.put(CachedTable {
            header: header.clone(),
            records,
        });
        self.write()
    }

    fn put(&mut self, table: CachedTable) {
        match self
            .tables
            .iter_mut()
            .find(|t| t.header.same_request(&table.header))
        {
            Some(slot) => *slot = table,
            None => self.tables.push(table),
        }
    }

    fn write(&self) -> Result<(), GwError> {
        let mut out = Vec::new();
        for t in &self.tables {
            let line = serde_json::to_string(&HeaderLine {
                header: t.header.clone(),
            })
            .map_err(|e| cache_err(&self.path, e))?;
            writeln!(out, "{line}").map_err(|e| cache_err(&self.path, e))?;
            for r in &t.records {
                let line = serde_json::to_string(r).map_err(|e| cache_err(&self.path, e))?;
                writeln!(out, "{line}").map_err(|e| cache_err(&self.path, e))?;
            }
        }
        if let Some(dir) = self.path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(|e| cache_err(&self.path, e))?;
            }
        }
        let tmp = self.path.with_extension("tmp");
        fs::write(&tmp, out).map_err(|e| cache_err(&tmp, e))?;
        fs::rename(&tmp, &self.path).map_err(|e| cache_err(&self.path, e))
    }
}
