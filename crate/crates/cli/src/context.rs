use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use qblow_core::frobenius::FrobeniusError;
use qblow_core::geometry::{parse_geometry, Geometry, GeometryDocument, GeometryError};
use qblow_core::gw_engine::{Engine, EngineOptions, GwError, Window};

use crate::{Cli, Format};

/// Bad command-line input, reported with exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub struct Context {
    pub format: Format,
    pub seed: u64,
    pub c1_bound: Option<i64>,
    pub max_insertions: Option<usize>,
    pub cache: Option<PathBuf>,
    pub jobs: usize,
    document: Option<Arc<Geometry>>,
}

impl Context {
    pub fn new(cli: &Cli) -> Result<Self> {
        if cli.c1_bound.is_some_and(|b| b < 1) || cli.max_insertions == Some(0) {
            return Err(Usage("window bounds must be positive".into()).into());
        }
        if cli.jobs == 0 {
            return Err(Usage("--jobs must be at least 1".into()).into());
        }
        let document = match &cli.geometry {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let doc: GeometryDocument = serde_json::from_str(&text).map_err(|e| {
                    Usage(format!("{}: not a geometry document: {e}", path.display()))
                })?;
                Some(doc.to_geometry()?)
            }
            None => None,
        };
        let cache = if cli.no_cache {
            None
        } else {
            cli.cache.clone().or_else(default_cache)
        };
        Ok(Context {
            format: if cli.json { Format::Json } else { cli.format },
            seed: cli.seed,
            c1_bound: cli.c1_bound,
            max_insertions: cli.max_insertions,
            cache,
            jobs: cli.jobs,
            document,
        })
    }

    /// The `--geometry` document followed by the parsed specs.
    pub fn geometries(&self, specs: &[String]) -> Result<Vec<Arc<Geometry>>> {
        let mut out: Vec<Arc<Geometry>> = self.document.iter().cloned().collect();
        for s in specs {
            out.push(parse_geometry(s)?);
        }
        if out.is_empty() {
            return Err(Usage(
                "no geometry given (pass a spec such as P2 or Bl1(P3), or --geometry)".into(),
            )
            .into());
        }
        Ok(out)
    }

    pub fn window(&self, g: &Geometry) -> Window {
        let default = Window::default_for(g);
        Window {
            c1_bound: self.c1_bound.unwrap_or(default.c1_bound),
            max_insertions: self.max_insertions.or(default.max_insertions),
        }
    }

    pub fn engine(&self, g: &Geometry, mut options: EngineOptions) -> Result<Engine> {
        options.window = Some(self.window(g));
        let engine = Engine::new(options);
        Ok(match &self.cache {
            Some(path) => engine.with_cache(path)?,
            None => engine,
        })
    }

    /// Runs `f` on each geometry with its own engine. Geometries are spread
    /// over `--jobs` threads unless a cache file is shared; results keep the
    /// input order.
    pub fn run_each<T, F>(
        &self,
        geometries: &[Arc<Geometry>],
        options: &EngineOptions,
        f: F,
    ) -> Vec<Result<T>>
    where
        T: Send,
        F: Fn(&mut Engine, &Arc<Geometry>) -> Result<T> + Sync,
    {
        let one = |g: &Arc<Geometry>| -> Result<T> {
            let mut engine = self.engine(g, options.clone())?;
            f(&mut engine, g)
        };
        let jobs = if self.cache.is_some() {
            1
        } else {
            self.jobs.min(geometries.len()).max(1)
        };
        if jobs == 1 {
            return geometries.iter().map(one).collect();
        }
        let mut slots: Vec<Option<Result<T>>> = (0..geometries.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let one = &one;
                    scope.spawn(move || {
                        (w..geometries.len())
                            .step_by(jobs)
                            .map(|i| (i, one(&geometries[i])))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots
            .into_iter()
            .map(|r| r.expect("every geometry processed"))
            .collect()
    }
}

fn default_cache() -> Option<PathBuf> {
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("qblow").join("invariants.jsonl"))
}

/// Prints each output in order and stops at the first error.
pub fn emit(results: Vec<Result<String>>) -> Result<()> {
    for r in results {
        print!("{}", r?);
    }
    Ok(())
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    fn gw(e: &GwError) -> u8 {
        match e {
            GwError::Geometry(_) | GwError::BadWindow | GwError::WindowTooSmall { .. } => 2,
            GwError::Underdetermined { .. } => 3,
            _ => 1,
        }
    }
    if e.downcast_ref::<Usage>().is_some() || e.downcast_ref::<GeometryError>().is_some() {
        return 2;
    }
    if let Some(g) = e.downcast_ref::<GwError>() {
        return gw(g);
    }
    match e.downcast_ref::<FrobeniusError>() {
        Some(FrobeniusError::Gw(g)) => gw(g),
        Some(
            FrobeniusError::Geometry(_)
            | FrobeniusError::WindowTooSmall { .. }
            | FrobeniusError::PointShape,
        ) => 2,
        _ => 1,
    }
}

pub fn parse_rationals(values: &[String]) -> Result<Vec<qblow_core::exact_algebra::Rational>> {
    values
        .iter()
        .map(|v| {
            qblow_core::exact_algebra::parse_rational(v).map_err(|e| anyhow!(Usage(e.to_string())))
        })
        .collect()
}

pub fn require_blow_up(g: &Geometry) -> Result<()> {
    if g.blow_up_count() == 0 {
        bail!(Usage(format!("{} is not a blow-up", g.id())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        let underdetermined = GwError::Underdetermined {
            geometry: "P2".into(),
            certificate: vec!["<H^2>_L".into()],
        };
        assert_eq!(exit_code(&underdetermined.clone().into()), 3);
        assert_eq!(exit_code(&FrobeniusError::Gw(underdetermined).into()), 3);
        assert_eq!(exit_code(&Usage("bad".into()).into()), 2);
        assert_eq!(exit_code(&GeometryError::Parse("Q3".into()).into()), 2);
        assert_eq!(
            exit_code(
                &GwError::WindowTooSmall {
                    needed: 4,
                    bound: 3
                }
                .into()
            ),
            2
        );
        assert_eq!(exit_code(&FrobeniusError::PointShape.into()), 2);
        assert_eq!(exit_code(&FrobeniusError::SingularPoint.into()), 1);
        assert_eq!(exit_code(&anyhow!("io")), 1);
    }

    #[test]
    fn rationals_parse_or_report_usage() {
        let q = parse_rationals(&["1".into(), "-1/2".into()]).unwrap();
        assert_eq!(q[1], qblow_core::exact_algebra::ratio(-1, 2));
        let e = parse_rationals(&["1/0".into()]).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }
}
