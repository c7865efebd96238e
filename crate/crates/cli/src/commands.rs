use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::Result;
use num_traits::{One, Signed, Zero};
use qblow_core::exact_algebra::format_rational;
use qblow_core::frobenius::QuantumAlgebra;
use qblow_core::geometry::{Geometry, GeometryDocument, ParameterPoint};
use qblow_core::gw_engine::{EngineOptions, InvariantTable, PullbackMode, Targets, Window};
use qblow_core::semisimple::{
    blowup_theorem_run, semisimple_verdict, Conclusion, Verdict, VerdictOptions,
};
use serde::Serialize;

use crate::context::{emit, parse_rationals, require_blow_up, Context, Usage};
use crate::Format;

const OK: u8 = 0;
const INCONCLUSIVE: u8 = 4;

pub fn geometry(ctx: &Context, specs: &[String]) -> Result<u8> {
    let out = ctx
        .geometries(specs)?
        .iter()
        .map(|g| render_geometry(ctx.format, g))
        .collect();
    emit(out)?;
    Ok(OK)
}

fn render_geometry(format: Format, g: &Geometry) -> Result<String> {
    let doc = GeometryDocument::from_geometry(g);
    Ok(match format {
        Format::Json => serde_json::to_string(&doc)? + "\n",
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["geometry", "index", "label", "degree"])?;
            for b in g.basis() {
                w.write_record([
                    g.id(),
                    &b.index.to_string(),
                    &b.label,
                    &b.complex_degree.to_string(),
                ])?;
            }
            csv_string(w)?
        }
        Format::Human => {
            let mut s = String::new();
            writeln!(
                s,
                "{}  dim {}  blow-ups {}",
                g.id(),
                g.dim(),
                g.blow_up_count()
            )?;
            let labels: Vec<&str> = g.basis().iter().map(|b| b.label.as_str()).collect();
            writeln!(s, "basis: {}", labels.join(" "))?;
            writeln!(s, "pairing:\n{}", g.pairing())?;
            let cone: Vec<String> = g.cone_generators().iter().map(|c| c.to_string()).collect();
            writeln!(s, "cone generators: {}", cone.join(", "))?;
            s
        }
    })
}

#[derive(Serialize)]
struct InvariantRow {
    beta: Vec<i64>,
    insertions: Vec<usize>,
    key: String,
    value: String,
    provenance: &'static str,
    #[serde(skip)]
    shown: String,
}

#[derive(Serialize)]
struct InvariantDoc {
    geometry: String,
    window: Window,
    invariants: Vec<InvariantRow>,
}

pub fn invariants(
    ctx: &Context,
    specs: &[String],
    pure_only: bool,
    three_point: bool,
    solve: bool,
) -> Result<u8> {
    let geometries = ctx.geometries(specs)?;
    let options = EngineOptions {
        targets: if three_point {
            Targets::ThreePoint
        } else {
            Targets::All
        },
        pullback: if solve {
            PullbackMode::Solve
        } else {
            PullbackMode::Import
        },
        ..Default::default()
    };
    let results = ctx.run_each(&geometries, &options, |engine, g| {
        let table = if pure_only {
            require_blow_up(g)?;
            engine.pure_exceptional_table(g.dim())?
        } else {
            engine.table(g)?
        };
        render_invariants(ctx.format, &table)
    });
    emit(results)?;
    Ok(OK)
}

fn render_invariants(format: Format, table: &InvariantTable) -> Result<String> {
    let g = table.geometry();
    let rows: Vec<InvariantRow> = table
        .sorted()
        .into_iter()
        .map(|(k, e)| InvariantRow {
            beta: k.beta.coords().to_vec(),
            insertions: k.insertions.clone(),
            key: k.display(g),
            value: format_rational(&e.value),
            provenance: e.provenance.as_str(),
            shown: e.value.to_string(),
        })
        .collect();
    Ok(match format {
        Format::Json => {
            let doc = InvariantDoc {
                geometry: g.id().to_string(),
                window: table.window(),
                invariants: rows,
            };
            serde_json::to_string(&doc)? + "\n"
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record([
                "geometry",
                "beta",
                "insertions",
                "key",
                "value",
                "provenance",
            ])?;
            for r in rows {
                w.write_record([
                    g.id(),
                    &join(&r.beta),
                    &join(&r.insertions),
                    &r.key,
                    &r.value,
                    r.provenance,
                ])?;
            }
            csv_string(w)?
        }
        Format::Human => {
            let mut s = String::new();
            writeln!(
                s,
                "# {}: {} invariants, c1 <= {}",
                g.id(),
                rows.len(),
                table.window().c1_bound
            )?;
            let kw = rows
                .iter()
                .map(|r| r.key.chars().count())
                .max()
                .unwrap_or(0);
            let vw = rows.iter().map(|r| r.shown.len()).max().unwrap_or(0);
            for r in rows {
                writeln!(s, "{:<kw$}  {:>vw$}  {}", r.key, r.shown, r.provenance)?;
            }
            s
        }
    })
}

#[derive(Serialize)]
struct QTable {
    geometry: String,
    basis: Vec<String>,
    point: serde_json::Value,
    structure_constants: Vec<Vec<Vec<String>>>,
}

pub fn qtable(ctx: &Context, specs: &[String], classical: bool, q: &[String]) -> Result<u8> {
    let geometries = ctx.geometries(specs)?;
    let q = parse_rationals(q)?;
    let results = ctx.run_each(&geometries, &EngineOptions::default(), |engine, g| {
        let pt = if classical {
            ParameterPoint::classical(g)
        } else if !q.is_empty() {
            if q.len() != g.curve_rank() {
                return Err(
                    Usage(format!("{} needs {} values of q", g.id(), g.curve_rank())).into(),
                );
            }
            ParameterPoint::small(g, q.clone())
        } else {
            ParameterPoint::sample_seeded(g, ctx.seed)
        };
        let algebra = QuantumAlgebra::new(&*engine.table(g)?, &pt)?;
        render_qtable(ctx.format, g, &algebra)
    });
    emit(results)?;
    Ok(OK)
}

fn render_qtable(format: Format, g: &Geometry, a: &QuantumAlgebra) -> Result<String> {
    let labels: Vec<String> = g.basis().iter().map(|b| b.label.clone()).collect();
    let constants = a.algebra().constants();
    Ok(match format {
        Format::Json => {
            let doc = QTable {
                geometry: g.id().to_string(),
                basis: labels,
                point: a.point().to_json(),
                structure_constants: constants
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|v| v.iter().map(format_rational).collect())
                            .collect()
                    })
                    .collect(),
            };
            serde_json::to_string(&doc)? + "\n"
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["geometry", "i", "j", "k", "value"])?;
            for (i, row) in constants.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    for (k, c) in v.iter().enumerate() {
                        if *c != Default::default() {
                            w.write_record([
                                g.id(),
                                &labels[i],
                                &labels[j],
                                &labels[k],
                                &format_rational(c),
                            ])?;
                        }
                    }
                }
            }
            csv_string(w)?
        }
        Format::Human => {
            let mut s = String::new();
            let q: Vec<String> = a.point().q.iter().map(|v| v.to_string()).collect();
            writeln!(s, "# {} at q = ({})", g.id(), q.join(", "))?;
            for i in 1..labels.len() {
                for j in i..labels.len() {
                    let rhs = combination(&constants[i][j], &labels);
                    writeln!(s, "{} * {} = {}", labels[i], labels[j], rhs)?;
                }
            }
            s
        }
    })
}

pub fn semisimple(ctx: &Context, specs: &[String], classical: bool, samples: usize) -> Result<u8> {
    if samples == 0 {
        return Err(Usage("--samples must be at least 1".into()).into());
    }
    let geometries = ctx.geometries(specs)?;
    let opts = VerdictOptions {
        samples,
        seed: ctx.seed,
        classical,
        ..Default::default()
    };
    let results: Vec<Result<Verdict>> =
        ctx.run_each(&geometries, &EngineOptions::default(), |engine, g| {
            Ok(semisimple_verdict(&*engine.table(g)?, &opts)?)
        });
    let mut code = OK;
    for r in results {
        let v = r?;
        if v.conclusion == Conclusion::Inconclusive {
            code = INCONCLUSIVE;
        }
        print!("{}", render_verdict(ctx.format, &v)?);
    }
    Ok(code)
}

fn render_verdict(format: Format, v: &Verdict) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string(v)? + "\n",
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["geometry", "seed", "sample", "q", "squarefree", "charpoly"])?;
            for (i, s) in v.samples.iter().enumerate() {
                w.write_record([
                    v.geometry.as_str(),
                    &v.seed.to_string(),
                    &i.to_string(),
                    &s.point["q"].to_string(),
                    &s.squarefree.to_string(),
                    &s.charpoly.join(";"),
                ])?;
            }
            csv_string(w)?
        }
        Format::Human => {
            let mut s = String::new();
            write!(
                s,
                "{}: {} after {} sample(s)",
                v.geometry,
                v.conclusion.as_str(),
                v.samples.len()
            )?;
            if let Some(w) = &v.witness {
                write!(s, ", witness q = {}", w["q"])?;
            }
            writeln!(s)?;
            if let Some(note) = &v.note {
                writeln!(s, "note: {note}")?;
            }
            s
        }
    })
}

pub fn theorem(ctx: &Context, spec: Option<&str>, points: usize) -> Result<u8> {
    let specs: Vec<String> = spec.map(str::to_string).into_iter().collect();
    let geometries = ctx.geometries(&specs)?;
    if geometries.len() != 1 {
        return Err(Usage("theorem takes exactly one geometry".into()).into());
    }
    let x: &Arc<Geometry> = &geometries[0];
    let opts = VerdictOptions {
        seed: ctx.seed,
        ..Default::default()
    };
    let mut engine = ctx.engine(x, EngineOptions::default())?;
    let report = blowup_theorem_run(&mut engine, x, points, &opts)?;
    match ctx.format {
        Format::Json => println!("{}", serde_json::to_string(&report)?),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["stage", "geometry", "conclusion", "fibre"])?;
            for (i, st) in report.stages.iter().enumerate() {
                let fibre = match &st.fibre {
                    Some(f) if f.passed() => "pass",
                    Some(_) => "fail",
                    None => "",
                };
                w.write_record([
                    &i.to_string(),
                    &st.geometry,
                    st.verdict.conclusion.as_str(),
                    fibre,
                ])?;
            }
            print!("{}", csv_string(w)?);
        }
        Format::Human => {
            for st in &report.stages {
                print!("{}", render_verdict(Format::Human, &st.verdict)?);
                if let Some(f) = &st.fibre {
                    println!(
                        "  fibre: split {}, generic element {} after {} attempt(s), Z -> 0 limit {}",
                        if f.split_passed { "ok" } else { "FAILED" },
                        if f.fibre_squarefree { "squarefree" } else { "not squarefree" },
                        f.element_attempts,
                        if f.limit_failures.is_empty() { "ok" } else { "FAILED" },
                    );
                    for msg in f.failures.iter().chain(&f.limit_failures) {
                        println!("    {msg}");
                    }
                }
            }
        }
    }
    Ok(if report.passed() {
        OK
    } else if !report.all_semisimple() {
        INCONCLUSIVE
    } else {
        1
    })
}

/// `a - 2 b + 1/3 c` style linear combination; `0` when empty.
fn combination(coeffs: &[qblow_core::exact_algebra::Rational], labels: &[String]) -> String {
    let mut s = String::new();
    for (c, label) in coeffs.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative();
        let magnitude = c.abs();
        match (s.is_empty(), negative) {
            (true, true) => s.push('-'),
            (true, false) => {}
            (false, true) => s.push_str(" - "),
            (false, false) => s.push_str(" + "),
        }
        if !magnitude.is_one() {
            s.push_str(&format!("{magnitude} "));
        }
        s.push_str(label);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    Ok(String::from_utf8(w.into_inner()?)?)
}
