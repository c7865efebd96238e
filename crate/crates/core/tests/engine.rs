use std::sync::Arc;

use num_traits::Zero;
use qblow_core::exact_algebra::int;
use qblow_core::geometry::{parse_geometry, CurveClass, Geometry};
use qblow_core::gw_engine::{
    wdvv_audit, Engine, EngineOptions, GwError, InvariantCache, Provenance, PullbackMode, Targets,
    Window,
};

fn all() -> EngineOptions {
    EngineOptions {
        targets: Targets::All,
        ..Default::default()
    }
}

#[test]
fn completed_tables_satisfy_every_associativity_equation() {
    let mut engine = Engine::new(all());
    for spec in ["P2", "P3", "Bl1(P2)", "Bl2(P2)", "Bl3(P2)", "Bl1(P3)"] {
        let g = parse_geometry(spec).unwrap();
        let table = engine.table(&g).unwrap();
        let (checked, violations) = wdvv_audit(&table).unwrap();
        assert!(checked > 0, "{spec}: no equation checked");
        assert!(violations.is_empty(), "{spec}: {violations:?}");
    }
}

#[test]
fn a_corrupted_value_breaks_associativity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let g = parse_geometry("P2").unwrap();
    Engine::new(all())
        .with_cache(&path)
        .unwrap()
        .table(&g)
        .unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let corrupted = text.replace(
        "\"beta\":[2],\"insertions\":[2,2,2,2,2],\"value\":\"1/1\"",
        "\"beta\":[2],\"insertions\":[2,2,2,2,2],\"value\":\"2/1\"",
    );
    assert_ne!(text, corrupted);
    std::fs::write(&path, corrupted).unwrap();
    let table = Engine::new(all())
        .with_cache(&path)
        .unwrap()
        .table(&g)
        .unwrap();
    let (_, violations) = wdvv_audit(&table).unwrap();
    assert!(!violations.is_empty());
}

#[test]
fn solving_the_pullback_agrees_with_importing_it() {
    let g = parse_geometry("Bl2(P2)").unwrap();
    let imported = Engine::new(all()).table(&g).unwrap();
    let solved = Engine::new(EngineOptions {
        pullback: PullbackMode::Solve,
        ..all()
    })
    .table(&g)
    .unwrap();
    assert_eq!(imported.len(), solved.len());
    for (k, e) in imported.iter() {
        assert_eq!(solved.value(k), Some(&e.value), "{}", k.display(&g));
    }
    assert!(solved
        .iter()
        .all(|(_, e)| e.provenance != Provenance::Imported));
    assert!(imported
        .iter()
        .any(|(_, e)| e.provenance == Provenance::Imported));
}

#[test]
fn solved_forced_zeros_vanish() {
    for spec in ["Bl1(P2)", "Bl1(P3)"] {
        let g = parse_geometry(spec).unwrap();
        let imposed = Engine::new(all()).table(&g).unwrap();
        let solved = Engine::new(EngineOptions {
            impose_mixed_vanishing: false,
            ..all()
        })
        .table(&g)
        .unwrap();
        let mut zeros = 0;
        for (k, e) in imposed.iter() {
            if e.provenance == Provenance::AxiomZero {
                zeros += 1;
                assert!(
                    solved.value(k).is_some_and(Zero::is_zero),
                    "{}",
                    k.display(&g)
                );
            } else {
                assert_eq!(solved.value(k), Some(&e.value));
            }
        }
        assert!(zeros > 0, "{spec}");
    }
}

#[test]
fn cache_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("cache.jsonl");
    let specs = ["P2", "Bl1(P2)", "Bl1(P3)"];
    let mut cold = Engine::new(EngineOptions::default())
        .with_cache(&path)
        .unwrap();
    let cold_tables: Vec<_> = specs
        .iter()
        .map(|s| {
            let g = parse_geometry(s).unwrap();
            let t = cold.table(&g).unwrap();
            assert!(!cold.report(&g).unwrap().from_cache);
            t
        })
        .collect();
    let bytes = std::fs::read(&path).unwrap();

    let mut warm = Engine::new(EngineOptions::default())
        .with_cache(&path)
        .unwrap();
    for (s, cold_table) in specs.iter().zip(&cold_tables) {
        let g = parse_geometry(s).unwrap();
        let t = warm.table(&g).unwrap();
        assert!(warm.report(&g).unwrap().from_cache, "{s} was recomputed");
        assert_eq!(t.len(), cold_table.len());
        for (k, e) in cold_table.iter() {
            assert_eq!(t.get(k), Some(e), "{s}: {}", k.display(&g));
        }
    }
    assert_eq!(
        std::fs::read(&path).unwrap(),
        bytes,
        "a warm run rewrote the cache"
    );

    let cache = InvariantCache::open(path).unwrap();
    // P2 is stored twice: for its own request and as the parent of Bl1(P2)
    assert_eq!(cache.tables("P2").count(), 2);
    let bl1: Vec<_> = cache.tables("Bl1(P2)").collect();
    assert_eq!(bl1.len(), 1);
    assert!(bl1[0].header.complete);
    assert!(bl1[0]
        .records
        .iter()
        .any(|r| r.provenance == Provenance::Seed));
}

#[test]
fn a_different_request_is_not_served_from_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let g = parse_geometry("P2").unwrap();
    Engine::new(EngineOptions::default())
        .with_cache(&path)
        .unwrap()
        .table(&g)
        .unwrap();
    let mut wider = Engine::new(EngineOptions {
        window: Some(Window {
            c1_bound: 12,
            max_insertions: None,
        }),
        ..all()
    })
    .with_cache(&path)
    .unwrap();
    let t = wider.table(&g).unwrap();
    assert!(!wider.report(&g).unwrap().from_cache);
    assert_eq!(
        t.invariant(&CurveClass::line(1, 4), &[2; 11]).unwrap(),
        int(620)
    );
}

#[test]
fn windows_and_supports_are_enforced() {
    let p2 = parse_geometry("P2").unwrap();
    let mut narrow = Engine::new(EngineOptions {
        window: Some(Window {
            c1_bound: 3,
            max_insertions: None,
        }),
        ..Default::default()
    });
    assert!(matches!(
        narrow.table(&p2),
        Err(GwError::WindowTooSmall {
            needed: 4,
            bound: 3
        })
    ));

    let mut engine = Engine::new(all());
    let table = engine.table(&p2).unwrap();
    assert!(matches!(
        table.invariant(&CurveClass::line(1, 3), &[2; 8]),
        Err(GwError::OutsideWindow { .. })
    ));
    let bl2p3: Arc<Geometry> = parse_geometry("Bl2(P3)").unwrap();
    assert!(matches!(engine.table(&bl2p3), Err(GwError::Geometry(_))));
    assert!(matches!(
        engine.pullback_invariant(&p2, &CurveClass::line(1, 1), &[2, 2]),
        Err(GwError::NotABlowUp(_))
    ));
}

#[test]
fn pure_exceptional_invariants_do_not_depend_on_the_geometry() {
    let mut engine = Engine::new(all());
    let pure = engine.pure_exceptional_table(3).unwrap();
    let bl1p3 = parse_geometry("Bl1(P3)").unwrap();
    let table = engine.table(&bl1p3).unwrap();
    for (k, e) in pure.iter() {
        assert_eq!(table.value(k), Some(&e.value), "{}", k.display(&bl1p3));
    }
}
