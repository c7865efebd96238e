use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{anyhow, Result};
use num_traits::Zero;
use qblow_core::exact_algebra::{format_rational, int, Rational};
use qblow_core::frobenius::{
    fibre_algebra, grading_audit, limit_check, split_check, QuantumAlgebra, SymbolicProduct,
};
use qblow_core::geometry::{CurveClass, Geometry, ParameterPoint};
use qblow_core::gw_engine::{
    mixed_vanishing, pure_blowup, Engine, EngineOptions, InvariantTable, PullbackMode, Targets,
};
use serde::Serialize;

use crate::context::{Context, Usage};
use crate::Format;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct Checklist {
    passed: bool,
    checks: Vec<Check>,
}

/// Per-dimension data shared by the checks.
struct Stage {
    n: usize,
    engine: Engine,
    blown_up: Arc<Geometry>,
    table: Arc<InvariantTable>,
    parent_algebra: QuantumAlgebra,
}

pub fn run(ctx: &Context, max_n: usize) -> Result<u8> {
    if max_n < 2 {
        return Err(Usage("--max-n must be at least 2".into()).into());
    }
    let mut stages = Vec::new();
    for n in 2..=max_n {
        let parent = Geometry::blown_up_projective_space(n, 0)?;
        let blown_up = Geometry::blown_up_projective_space(n, 1)?;
        let mut engine = ctx.engine(&blown_up, EngineOptions::default())?;
        let table = engine.table(&blown_up)?;
        let pt = ParameterPoint::sample_seeded(&parent, ctx.seed);
        let parent_algebra = QuantumAlgebra::new(&*engine.table(&parent)?, &pt)?;
        stages.push(Stage {
            n,
            engine,
            blown_up,
            table,
            parent_algebra,
        });
    }
    let range = format!("n=2..{max_n}");
    let mut checks = Vec::new();
    let mut check = |name: &'static str, result: Result<Vec<String>>, ok_detail: String| {
        let (passed, detail) = match result {
            Ok(f) if f.is_empty() => (true, ok_detail),
            Ok(f) => (false, f.join("; ")),
            Err(e) => (false, format!("error: {e:#}")),
        };
        checks.push(Check {
            name,
            passed,
            detail,
        });
    };

    check(
        "seed-value",
        seed_values(&mut stages, false),
        format!("<E^(n-1),E^(n-1)>_E' = 1, {range}"),
    );
    check(
        "divisor-reduced",
        seed_values(&mut stages, true),
        format!("<E,E^(n-1),E^(n-1)>_E' = -1, {range}"),
    );
    let small = max_n.min(3);
    check(
        "mixed-vanishing",
        mixed_vanishing_checks(ctx, &stages, small),
        format!("stored mixed invariants {range}; solved forced zeros n=2..{small}"),
    );
    check(
        "grading-audit",
        grading(&stages),
        format!("pure degree 3-n, mixed <= 1-n, product degree 1, {range}"),
    );
    let splits: Vec<_> = stages
        .iter()
        .map(|s| fibre_algebra(s.n, &s.parent_algebra).map(|f| (split_check(&f), f)))
        .collect::<Result<_, _>>()?;
    check(
        "ze-table",
        Ok(splits
            .iter()
            .flat_map(|(r, _)| r.table_failures.clone())
            .collect()),
        format!("ZE * (ZE)^i, {range}"),
    );
    check(
        "y-idempotent",
        Ok(splits
            .iter()
            .filter(|(r, f)| f.algebra().mul(&r.y, &r.y) != r.y)
            .map(|(_, f)| format!("n={}: Y * Y != Y", f.dim()))
            .collect()),
        format!("Y = (-1)^n Q E^(n-1), {range}"),
    );
    check(
        "fibre-splitting",
        fibre_splitting(&stages, &splits),
        format!(
            "ideals, unit Δ0 - Y, parent sector, Z -> 0 limit of the blown-up product, {range}"
        ),
    );
    check(
        "pullback-consistency",
        pullbacks(&mut stages),
        format!("non-exceptional invariants of Bl1(P^n), {range}; re-derived on Bl1(P2)"),
    );

    let list = Checklist {
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    match ctx.format {
        Format::Json => println!("{}", serde_json::to_string(&list)?),
        Format::Human | Format::Csv => {
            let mut s = String::new();
            for c in &list.checks {
                writeln!(
                    s,
                    "{}  {:<22} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )?;
            }
            print!("{s}");
        }
    }
    Ok(if list.passed { 0 } else { 1 })
}

fn seed_values(stages: &mut [Stage], with_divisor: bool) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for s in stages {
        let n = s.n;
        let (powers, expected) = if with_divisor {
            (vec![1, n - 1, n - 1], int(-1))
        } else {
            (vec![n - 1, n - 1], int(1))
        };
        let v = s.engine.pure_exceptional_invariant(n, 1, &powers)?;
        let raw: Vec<usize> = powers
            .iter()
            .map(|&k| s.blown_up.exceptional_index(0, k))
            .collect();
        let stored = s.table.invariant(&CurveClass::exceptional(2, 0, 1), &raw)?;
        if v != expected || stored != expected {
            bad.push(format!(
                "n={n}: {} and {} in the table",
                format_rational(&v),
                format_rational(&stored)
            ));
        }
    }
    Ok(bad)
}

fn exceptional_powers(g: &Geometry, insertions: &[usize]) -> Vec<usize> {
    insertions
        .iter()
        .filter_map(|&i| g.basis()[i].exceptional_power())
        .collect()
}

fn mixed_vanishing_checks(ctx: &Context, stages: &[Stage], small: usize) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for s in stages {
        let g = &s.blown_up;
        for (k, e) in s.table.iter() {
            if pure_blowup(&k.beta).is_some() || e.value.is_zero() {
                continue;
            }
            let d = k.beta.exceptional_multiple(0);
            if mixed_vanishing(s.n, d, &exceptional_powers(g, &k.insertions)) {
                bad.push(format!(
                    "{} = {} should vanish",
                    k.display(g),
                    format_rational(&e.value)
                ));
            }
        }
    }
    for n in 2..=small {
        let g = Geometry::blown_up_projective_space(n, 1)?;
        let mut engine = Engine::new(EngineOptions {
            window: Some(ctx.window(&g)),
            impose_mixed_vanishing: false,
            ..Default::default()
        });
        let table = engine.table(&g)?;
        let mut solved = 0;
        for (k, e) in table.iter() {
            if pure_blowup(&k.beta).is_some() {
                continue;
            }
            let d = k.beta.exceptional_multiple(0);
            let powers = exceptional_powers(&g, &k.insertions);
            if mixed_vanishing(n, d, &powers) {
                solved += 1;
                if !e.value.is_zero() {
                    bad.push(format!(
                        "solved {} = {}",
                        k.display(&g),
                        format_rational(&e.value)
                    ));
                }
            }
        }
        if solved == 0 {
            bad.push(format!("n={n}: no forced zero was solved for"));
        }
    }
    Ok(bad)
}

fn grading(stages: &[Stage]) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for s in stages {
        bad.extend(grading_audit(&s.table)?.violations);
    }
    Ok(bad)
}

fn fibre_splitting(
    stages: &[Stage],
    splits: &[(
        qblow_core::frobenius::SplitReport,
        qblow_core::frobenius::FibreAlgebra,
    )],
) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for (s, (report, fibre)) in stages.iter().zip(splits) {
        bad.extend(report.failures.iter().map(|f| format!("n={}: {f}", s.n)));
        let sym = SymbolicProduct::new(&s.table)?;
        let limit = limit_check(&sym, &s.parent_algebra.point().q, fibre)?;
        bad.extend(limit.into_iter().map(|f| format!("n={}: {f}", s.n)));
    }
    Ok(bad)
}

fn pullbacks(stages: &mut [Stage]) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for s in stages.iter_mut() {
        let g = Arc::clone(&s.blown_up);
        let parent_len = g.parent().expect("blow-up").basis_len();
        let mut keys: Vec<_> = s
            .table
            .iter()
            .map(|(k, e)| (k.clone(), e.value.clone()))
            .collect();
        keys.sort();
        for (k, v) in keys {
            if k.beta.exceptional_multiple(0) != 0 || k.insertions.iter().any(|&i| i >= parent_len)
            {
                continue;
            }
            let parent_value = s.engine.pullback_invariant(&g, &k.beta, &k.insertions)?;
            if parent_value != v {
                bad.push(format!(
                    "{} = {} but {} on the parent",
                    k.display(&g),
                    format_rational(&v),
                    format_rational(&parent_value)
                ));
            }
        }
    }
    // re-derive every non-exceptional invariant of Bl1(P2) from the line seed
    let g = Geometry::blown_up_projective_space(2, 1)?;
    let mut solve = Engine::new(EngineOptions {
        pullback: PullbackMode::Solve,
        targets: Targets::All,
        ..Default::default()
    });
    let mut import = Engine::new(EngineOptions {
        targets: Targets::All,
        ..Default::default()
    });
    let p2 = Arc::clone(g.parent().expect("blow-up"));
    let parent = import.table(&p2)?;
    let table = solve.table(&g)?;
    let mut compared = 0;
    for (k, e) in table.iter() {
        if k.beta.exceptional_multiple(0) != 0 || k.insertions.iter().any(|&i| i >= p2.basis_len())
        {
            continue;
        }
        compared += 1;
        let expected: Rational = parent
            .invariant(&k.beta.truncate_last(), &k.insertions)
            .map_err(|e| anyhow!("parent of {}: {e}", k.display(&g)))?;
        if expected != e.value {
            bad.push(format!(
                "re-derived {} = {} differs from P2",
                k.display(&g),
                format_rational(&e.value)
            ));
        }
    }
    if compared == 0 {
        bad.push("no non-exceptional invariant of Bl1(P2) was re-derived".into());
    }
    Ok(bad)
}
