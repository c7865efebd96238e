//! Curve counts checked against an independent implementation of Kontsevich's
//! recursion and against classical counts obtained by linear algebra on
//! plane curves.

#![allow(clippy::needless_range_loop)]

mod common;

use common::kontsevich;
use num_bigint::BigInt;
use qblow_core::exact_algebra::{int, Rational};
use qblow_core::geometry::{CurveClass, Geometry};
use qblow_core::gw_engine::{Engine, EngineOptions, Targets, Window};

fn engine(c1_bound: i64) -> Engine {
    Engine::new(EngineOptions {
        window: Some(Window {
            c1_bound,
            max_insertions: None,
        }),
        targets: Targets::All,
        ..Default::default()
    })
}

#[test]
fn oracle_reproduces_the_first_counts() {
    let n = kontsevich(6);
    let expected: Vec<BigInt> = [0i64, 1, 1, 12, 620, 87304, 26312976]
        .iter()
        .map(|&v| BigInt::from(v))
        .collect();
    assert_eq!(n, expected);
}

#[test]
fn plane_counts_match_the_oracle() {
    let max_d = 5;
    let oracle = kontsevich(max_d);
    let p2 = Geometry::blown_up_projective_space(2, 0).unwrap();
    let mut engine = engine(3 * max_d as i64);
    let table = engine.table(&p2).unwrap();
    let pt = p2.point_index();
    for d in 1..=max_d {
        let value = table
            .invariant(&CurveClass::line(1, d as i64), &vec![pt; 3 * d - 1])
            .unwrap();
        assert_eq!(value, Rational::from_integer(oracle[d].clone()), "N_{d}");
    }
}

#[test]
fn curves_through_the_blown_up_point() {
    // degree d through the centre and 3d - 2 further points: again N_d
    let oracle = kontsevich(3);
    let g = Geometry::blown_up_projective_space(2, 1).unwrap();
    let mut engine = engine(9);
    let table = engine.table(&g).unwrap();
    let pt = g.point_index();
    for d in 1..=3i64 {
        let beta = CurveClass::new(vec![d, -1]);
        let value = table
            .invariant(&beta, &vec![pt; 3 * d as usize - 2])
            .unwrap();
        assert_eq!(
            value,
            Rational::from_integer(oracle[d as usize].clone()),
            "d = {d}"
        );
    }
    // curves of degree d with a (d-1)-fold point at the centre form a
    // projective space of the right dimension: one curve through the points
    for d in 2..=3i64 {
        let beta = CurveClass::new(vec![d, -(d - 1)]);
        let points = (3 * d - (d - 1) - 1) as usize;
        assert_eq!(
            table.invariant(&beta, &vec![pt; points]).unwrap(),
            int(1),
            "d = {d}"
        );
    }
    // the strict transform of a line through the centre and one more point
    assert_eq!(
        table
            .invariant(&CurveClass::new(vec![1, -1]), &[pt])
            .unwrap(),
        int(1)
    );
}

#[test]
fn classical_counts_in_three_space() {
    let p3 = Geometry::blown_up_projective_space(3, 0).unwrap();
    let mut engine = engine(8);
    let table = engine.table(&p3).unwrap();
    let (line_class, pt) = (2, p3.point_index());
    // lines through two points, lines meeting four lines, conics meeting eight lines
    assert_eq!(
        table.invariant(&CurveClass::line(1, 1), &[pt, pt]).unwrap(),
        int(1)
    );
    assert_eq!(
        table
            .invariant(&CurveClass::line(1, 1), &[line_class; 4])
            .unwrap(),
        int(2)
    );
    assert_eq!(
        table
            .invariant(&CurveClass::line(1, 2), &[line_class; 8])
            .unwrap(),
        int(92)
    );
    // lines through a point meeting two lines
    assert_eq!(
        table
            .invariant(&CurveClass::line(1, 1), &[pt, line_class, line_class])
            .unwrap(),
        int(1)
    );
}
