//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured time.

#![allow(clippy::needless_range_loop)]

mod common;

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use qblow_core::exact_algebra::{int, Poly1, Rational};
use qblow_core::frobenius::{
    fibre_algebra, grading_audit, limit_check, split_check, EulerData, QuantumAlgebra,
    SymbolicProduct,
};
use qblow_core::geometry::{parse_geometry, CurveClass, Geometry, ParameterPoint};
use qblow_core::gw_engine::{
    mixed_vanishing, pure_blowup, Engine, EngineOptions, InvariantTable, Provenance, PullbackMode,
    Targets, Window,
};
use qblow_core::semisimple::{
    generic_multiplication_operator, semisimple_verdict, Conclusion, VerdictOptions, NILPOTENT_NOTE,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn run(number: usize, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let elapsed = start.elapsed();
    let outcome = match (outcome, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:.0?}")),
        (o, _) => o,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    // written past the test harness capture so the lines always show
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{tag} criterion {number}: {title} [{elapsed:.2?}] {detail}"
    );
    outcome.is_ok()
}

fn engine() -> Engine {
    Engine::new(EngineOptions::default())
}

fn table(engine: &mut Engine, spec: &str) -> Result<Arc<InvariantTable>, String> {
    let g = parse_geometry(spec).map_err(|e| e.to_string())?;
    engine.table(&g).map_err(|e| format!("{spec}: {e}"))
}

fn seed_identity() -> Outcome {
    let mut engine = engine();
    for n in 2..=5 {
        let top = n - 1;
        let seed = engine
            .pure_exceptional_invariant(n, 1, &[top, top])
            .map_err(|e| e.to_string())?;
        let reduced = engine
            .pure_exceptional_invariant(n, 1, &[1, top, top])
            .map_err(|e| e.to_string())?;
        ensure(seed == int(1), || {
            format!("n={n}: <E^(n-1),E^(n-1)>_E' = {seed}")
        })?;
        ensure(reduced == int(-1), || {
            format!("n={n}: <E,E^(n-1),E^(n-1)>_E' = {reduced}")
        })?;
    }
    Ok("n=2..5".into())
}

fn plane_counts() -> Outcome {
    let oracle = common::kontsevich(4);
    let p2 = parse_geometry("P2").unwrap();
    let mut engine = Engine::new(EngineOptions {
        window: Some(Window {
            c1_bound: 12,
            max_insertions: None,
        }),
        targets: Targets::All,
        ..Default::default()
    });
    let table = engine.table(&p2).map_err(|e| e.to_string())?;
    let mut shown = Vec::new();
    for d in 1..=4usize {
        let v = table
            .invariant(
                &CurveClass::line(1, d as i64),
                &vec![p2.point_index(); 3 * d - 1],
            )
            .map_err(|e| e.to_string())?;
        ensure(v == Rational::from_integer(oracle[d].clone()), || {
            format!("N_{d} = {v}, oracle {}", oracle[d])
        })?;
        shown.push(format!("N{d}={v}"));
    }
    Ok(shown.join(" "))
}

fn pullback_consistency() -> Outcome {
    let g = parse_geometry("Bl1(P2)").unwrap();
    let p2 = Arc::clone(g.parent().unwrap());
    let all = EngineOptions {
        targets: Targets::All,
        ..Default::default()
    };
    let mut solve = Engine::new(EngineOptions {
        pullback: PullbackMode::Solve,
        ..all.clone()
    });
    let mut import = Engine::new(all.clone());
    // the parent is taken over the blow-up's window so every key is comparable
    let mut parent_engine = Engine::new(EngineOptions {
        window: Some(Window::default_for(&g)),
        ..all
    });
    let parent = parent_engine.table(&p2).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for t in [solve.table(&g), import.table(&g)] {
        let t = t.map_err(|e| e.to_string())?;
        for (k, e) in t.iter() {
            if k.beta.exceptional_multiple(0) != 0
                || k.insertions.iter().any(|&i| i >= p2.basis_len())
            {
                continue;
            }
            let expected = parent
                .invariant(&k.beta.truncate_last(), &k.insertions)
                .map_err(|e| e.to_string())?;
            ensure(expected == e.value, || {
                format!("{} = {} but {expected} on P2", k.display(&g), e.value)
            })?;
            compared += 1;
        }
    }
    ensure(compared > 0, || "nothing compared".into())?;
    Ok(format!(
        "{compared} non-exceptional invariants (re-derived and imported) equal the P2 values"
    ))
}

fn powers_of(g: &Geometry, insertions: &[usize], blowup: usize) -> Vec<usize> {
    insertions
        .iter()
        .filter(|&&i| g.basis()[i].exceptional_blowup() == Some(blowup))
        .filter_map(|&i| g.basis()[i].exceptional_power())
        .collect()
}

fn mixed_vanishing_audit() -> Outcome {
    let mut engine = engine();
    let mut stored = 0;
    for spec in ["Bl1(P2)", "Bl2(P2)", "Bl3(P2)", "Bl1(P3)", "Bl1(P4)"] {
        let t = table(&mut engine, spec)?;
        let g = t.geometry();
        for (k, e) in t.iter() {
            if pure_blowup(&k.beta).is_some() || e.value.is_zero() {
                continue;
            }
            stored += 1;
            for i in 0..g.blow_up_count() {
                let d = k.beta.exceptional_multiple(i);
                ensure(
                    !mixed_vanishing(g.dim(), d, &powers_of(g, &k.insertions, i)),
                    || format!("{spec}: {} = {} should vanish", k.display(g), e.value),
                )?;
            }
        }
    }
    let mut solved = 0;
    for spec in ["Bl1(P2)", "Bl1(P3)"] {
        let g = parse_geometry(spec).unwrap();
        let mut free = Engine::new(EngineOptions {
            impose_mixed_vanishing: false,
            targets: Targets::All,
            ..Default::default()
        });
        let t = free.table(&g).map_err(|e| e.to_string())?;
        for (k, e) in t.iter() {
            if pure_blowup(&k.beta).is_none()
                && mixed_vanishing(
                    g.dim(),
                    k.beta.exceptional_multiple(0),
                    &powers_of(&g, &k.insertions, 0),
                )
            {
                ensure(e.provenance == Provenance::WdvvSolved, || {
                    format!("{} was not solved", k.display(&g))
                })?;
                ensure(e.value.is_zero(), || {
                    format!("solved {} = {}", k.display(&g), e.value)
                })?;
                solved += 1;
            }
        }
    }
    ensure(solved > 0, || "no forced zero was solved for".into())?;
    Ok(format!(
        "{stored} stored nonzero mixed invariants; {solved} solved forced zeros are 0"
    ))
}

fn grading() -> Outcome {
    let mut engine = engine();
    let (mut pure, mut mixed, mut products) = (0, 0, 0);
    let mut tables = Vec::new();
    for spec in ["Bl1(P2)", "Bl2(P2)", "Bl3(P2)", "Bl1(P3)", "Bl1(P4)"] {
        tables.push(table(&mut engine, spec)?);
    }
    for t in &tables {
        let report = grading_audit(t).map_err(|e| e.to_string())?;
        ensure(report.passed(), || {
            format!("{}: {:?}", t.geometry().id(), report.violations)
        })?;
        pure += report.pure_checked;
        mixed += report.mixed_checked;
        products += report.product_terms_checked;
    }
    // purely exceptional tables up to n = 5: every monomial has degree 3 - n
    for n in 2..=5usize {
        let t = engine
            .pure_exceptional_table(n)
            .map_err(|e| e.to_string())?;
        let g = t.geometry();
        let euler = EulerData::new(g);
        for (k, e) in t.iter() {
            if e.value.is_zero() {
                continue;
            }
            let degree = euler.exceptional_degree(g, k, 0);
            ensure(degree == 3 - n as i64, || {
                format!("{} has degree {degree}", k.display(g))
            })?;
            pure += 1;
        }
    }
    Ok(format!(
        "{pure} pure, {mixed} mixed monomials, {products} product terms; 0 violations"
    ))
}

fn fibre_structure() -> Outcome {
    let mut engine = engine();
    let mut per_n = Vec::new();
    for n in 2..=5usize {
        let start = Instant::now();
        let parent = Geometry::blown_up_projective_space(n, 0).unwrap();
        let blown_up = Geometry::blown_up_projective_space(n, 1).unwrap();
        let pt = ParameterPoint::sample_seeded(&parent, 11);
        let parent_algebra =
            QuantumAlgebra::new(&*engine.table(&parent).map_err(|e| e.to_string())?, &pt)
                .map_err(|e| e.to_string())?;
        let fibre = fibre_algebra(n, &parent_algebra).map_err(|e| e.to_string())?;
        let report = split_check(&fibre);
        ensure(report.table_failures.is_empty(), || {
            format!("n={n}: {:?}", report.table_failures)
        })?;
        ensure(
            fibre.algebra().mul(&report.y, &report.y) == report.y,
            || format!("n={n}: Y*Y != Y"),
        )?;
        ensure(report.failures.is_empty(), || {
            format!("n={n}: {:?}", report.failures)
        })?;
        // the derived relation (ZE)^{n-1} = (-1)^n Y
        let mut expected = vec![Rational::zero(); n];
        expected[0] = if n % 2 == 0 { int(-1) } else { int(1) };
        expected[n - 1] = int(1);
        ensure(
            report.exceptional_charpoly == Poly1::from_coeffs(expected),
            || format!("n={n}: char poly {}", report.exceptional_charpoly),
        )?;
        let took = start.elapsed();
        ensure(took < Duration::from_secs(5), || {
            format!("n={n} took {took:.2?}")
        })?;
        per_n.push(format!("n={n} {took:.2?}"));
        // the fibre is also the Z -> 0 limit of the blown-up product; building
        // Bl1(P^n) itself is not part of the time budget
        let sym = SymbolicProduct::new(&*engine.table(&blown_up).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let limit = limit_check(&sym, &pt.q, &fibre).map_err(|e| e.to_string())?;
        ensure(limit.is_empty(), || {
            format!("n={n}: Z -> 0 limit {limit:?}")
        })?;
    }
    Ok(format!(
        "ZE table, Y idempotent, zero cross products, exceptional ideal z^(n-1) = (-1)^n, Z->0 limit; {}",
        per_n.join(", ")
    ))
}

fn verdicts() -> Outcome {
    let opts = VerdictOptions {
        seed: 7,
        ..Default::default()
    };
    let mut engine = engine();
    for n in 1..=6usize {
        let t = table(&mut engine, &format!("P{n}"))?;
        let v = semisimple_verdict(&t, &opts).map_err(|e| e.to_string())?;
        ensure(v.conclusion == Conclusion::GenericallySemisimple, || {
            format!("P{n}: {}", v.to_json())
        })?;
        let pt = v.witness_point.clone().unwrap();
        let alg = QuantumAlgebra::new(&t, &pt).map_err(|e| e.to_string())?;
        let mut h = vec![Rational::zero(); n + 1];
        h[1] = int(1);
        let cp = generic_multiplication_operator(&alg, &h)
            .char_poly()
            .map_err(|e| e.to_string())?;
        let mut expected = vec![Rational::zero(); n + 2];
        expected[0] = -pt.q[0].clone();
        expected[n + 1] = int(1);
        ensure(cp == Poly1::from_coeffs(expected), || {
            format!("P{n}: char poly of H is {cp}")
        })?;
    }
    let p2 = table(&mut engine, "P2")?;
    let classical = semisimple_verdict(
        &p2,
        &VerdictOptions {
            classical: true,
            ..opts
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(classical.conclusion == Conclusion::Inconclusive, || {
        classical.to_json()
    })?;
    ensure(classical.note.as_deref() == Some(NILPOTENT_NOTE), || {
        classical.to_json()
    })?;
    for spec in ["Bl1(P2)", "Bl2(P2)"] {
        let t = table(&mut engine, spec)?;
        let first = semisimple_verdict(&t, &opts).map_err(|e| e.to_string())?;
        ensure(first.is_semisimple(), || {
            format!("{spec}: {}", first.to_json())
        })?;
        let again = semisimple_verdict(
            &*table(&mut Engine::new(EngineOptions::default()), spec)?,
            &opts,
        )
        .map_err(|e| e.to_string())?;
        ensure(first.to_json() == again.to_json(), || {
            format!("{spec}: verdict changed between runs")
        })?;
    }
    Ok(
        "P1..P6 (H: t^(n+1) - q), Bl1(P2), Bl2(P2) witnessed; q = 0 inconclusive; reruns identical"
            .into(),
    )
}

fn axioms() -> Outcome {
    let specs = [
        "P1", "P2", "P3", "P4", "Bl1(P2)", "Bl2(P2)", "Bl3(P2)", "Bl4(P2)", "Bl1(P3)", "Bl1(P4)",
    ];
    let mut engine = engine();
    for spec in specs {
        let t = table(&mut engine, spec)?;
        let sym = SymbolicProduct::new(&t).map_err(|e| e.to_string())?;
        for seed in 1..=3 {
            let pt = ParameterPoint::sample_seeded(t.geometry(), seed);
            let report = sym.evaluate(&pt).map_err(|e| e.to_string())?.check_axioms();
            ensure(report.passed(), || {
                format!("{spec} seed {seed}: {report:?}")
            })?;
        }
    }
    Ok(format!(
        "{} geometries x 3 points: commutative, unital, Frobenius, associative",
        specs.len()
    ))
}

fn persistence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("invariants.jsonl");
    let specs = ["P2", "Bl1(P2)", "Bl2(P2)", "Bl1(P3)"];
    let opts = VerdictOptions::default();
    let pass = |warm: bool| -> Result<Vec<(Arc<InvariantTable>, String, String)>, String> {
        let mut engine = Engine::new(EngineOptions::default())
            .with_cache(&path)
            .map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        for spec in specs {
            let g = parse_geometry(spec).unwrap();
            let t = engine.table(&g).map_err(|e| e.to_string())?;
            let from_cache = engine.report(&g).is_some_and(|r| r.from_cache);
            ensure(from_cache == warm, || {
                format!("{spec}: from_cache = {from_cache}")
            })?;
            let verdict = semisimple_verdict(&t, &opts)
                .map_err(|e| e.to_string())?
                .to_json();
            let pt = ParameterPoint::sample_seeded(&g, 3);
            let product = format!(
                "{:?}",
                QuantumAlgebra::new(&t, &pt)
                    .map_err(|e| e.to_string())?
                    .algebra()
                    .constants()
            );
            out.push((t, verdict, product));
        }
        Ok(out)
    };
    let cold = pass(false)?;
    let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
    let warm = pass(true)?;
    ensure(
        std::fs::read(&path).map_err(|e| e.to_string())? == bytes,
        || "warm run rewrote the cache".into(),
    )?;
    let mut records = 0;
    for (spec, (c, w)) in specs.iter().zip(cold.iter().zip(&warm)) {
        ensure(c.0.len() == w.0.len(), || {
            format!("{spec}: table sizes differ")
        })?;
        for (k, e) in c.0.iter() {
            ensure(w.0.get(k) == Some(e), || {
                format!("{spec}: {} differs after reload", k.display(c.0.geometry()))
            })?;
            records += 1;
        }
        ensure(c.1 == w.1, || format!("{spec}: verdict differs"))?;
        ensure(c.2 == w.2, || format!("{spec}: structure constants differ"))?;
    }
    Ok(format!(
        "{records} records reloaded with value and provenance; verdicts and products identical"
    ))
}

#[test]
fn acceptance_criteria() {
    let results = [
        run(
            1,
            "seed identity",
            Some(Duration::from_secs(1)),
            seed_identity,
        ),
        run(
            2,
            "P2 counts against the Kontsevich oracle",
            Some(Duration::from_secs(5)),
            plane_counts,
        ),
        run(
            3,
            "pullback consistency on Bl1(P2)",
            None,
            pullback_consistency,
        ),
        run(4, "mixed vanishing audit", None, mixed_vanishing_audit),
        run(5, "grading audit", None, grading),
        run(6, "fibre structure", None, fibre_structure),
        run(
            7,
            "semisimplicity verdicts",
            Some(Duration::from_secs(120)),
            verdicts,
        ),
        run(8, "algebra axioms", None, axioms),
        run(9, "persistence", None, persistence),
    ];
    let failed: Vec<usize> = (1..=9).filter(|i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
