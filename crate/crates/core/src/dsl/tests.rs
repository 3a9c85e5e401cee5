use super::*;
use crate::field::Session;
use crate::geom::{self, GeomObject, Point};

const MIDPOINT: &str = "construction midpoint(point A, point B) {
  let c1 = circle(A; A, B); let c2 = circle(B; A, B);
  let [P, Q] = intersect(c1, c2);
  let l = line(P, Q); let ab = line(A, B);
  let [M] = intersect(l, ab);
  return M; }";

fn pt(s: &Session, x: i64, y: i64) -> GeomObject {
    Point::from_ints(s, x, y).into()
}

#[test]
fn midpoint_parses_to_six_statements() {
    let prog = parse(MIDPOINT).unwrap();
    assert_eq!(prog.body.len(), 6);
    assert_eq!(prog.len(), 6);
    assert_eq!(prog.returns, vec!["M"]);
    assert!(!prog.has_tests());
}

#[test]
fn midpoint_runs_exactly() {
    let s = Session::new();
    let prog = parse(MIDPOINT).unwrap();
    let res = run(&prog, &[pt(&s, 0, 0), pt(&s, 2, 0)], &mut SeededOracle::new(0)).unwrap();
    assert_eq!(res.output("M"), Some(&pt(&s, 1, 0)));
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse("construction f(point A) {\n  let l = line(A);\n  return l; }").unwrap_err();
    assert_eq!((err.line, err.col), (2, 17));
    assert!(parse("").is_err());
    assert!(parse("construction f(point A) { return B; }").is_err());
    let arity = parse("construction f(point A, point B) { if between(A, B) { } return A; }").unwrap_err();
    assert!(arity.expected.contains("3 arguments"), "{arity}");
    // types
    assert!(parse("construction f(point A, line l) { let c = circle(A; A, l); return c; }").is_err());
    // single assignment
    assert!(parse("construction f(point A, point B) { let l = line(A, B); let l = line(B, A); return l; }").is_err());
}

#[test]
fn comments_and_nested_blocks() {
    let text = "# header
construction f(point A, point B) {
  let l = line(A, B); # trailing
  if equal(A, B) { let m = line(B, A); } else { let m = line(A, B); }
  return l;
}";
    let prog = parse(text).unwrap();
    assert_eq!(prog.len(), 4);
    assert!(prog.has_tests());
}

#[test]
fn exhausted_loop_budget() {
    let s = Session::new();
    let prog = parse("construction f(point A) { while equal(A, A) budget 0 { } return A; }").unwrap();
    let err = run(&prog, &[pt(&s, 0, 0)], &mut SeededOracle::new(0)).unwrap_err();
    assert_eq!(err.kind, RunErrorKind::BudgetExhausted(0));
}

#[test]
fn intersection_count_is_enforced() {
    let s = Session::new();
    let prog = parse(
        "construction f(point A, point B) { let c1 = circle(A; A, B); let c2 = circle(B; A, B);
         let [P] = intersect(c1, c2); return P; }",
    )
    .unwrap();
    let err = run(&prog, &[pt(&s, 0, 0), pt(&s, 2, 0)], &mut SeededOracle::new(0)).unwrap_err();
    assert_eq!(err.kind, RunErrorKind::IntersectionCount { expected: 1, found: 2 });
}

#[test]
fn choose_needs_exactly_one_candidate() {
    let s = Session::new();
    let prog = parse(
        "construction f(point A, point B) { let c1 = circle(A; A, B); let c2 = circle(B; A, B);
         let [P, Q] = intersect(c1, c2); let X = choose(P, Q | ccw(A, B, X)); return X; }",
    )
    .unwrap();
    let res = run(&prog, &[pt(&s, 0, 0), pt(&s, 2, 0)], &mut SeededOracle::new(0)).unwrap();
    let x = res.output("X").unwrap().as_point().unwrap();
    assert!(x.y.is_positive());

    let both = parse(
        "construction f(point A, point B) { let c1 = circle(A; A, B); let c2 = circle(B; A, B);
         let [P, Q] = intersect(c1, c2); let X = choose(P, Q | not equal(A, X)); return X; }",
    )
    .unwrap();
    let err = run(&both, &[pt(&s, 0, 0), pt(&s, 2, 0)], &mut SeededOracle::new(0)).unwrap_err();
    assert_eq!(err.kind, RunErrorKind::AmbiguousChoice(2));
}

#[test]
fn angle_bisector_is_equidistant() {
    let s = Session::new();
    let prog = parse(
        "construction bisector(line l1, line l2, point V) {
           let R = arbitrary in_cell(l1 > 0);
           let c = circle(V; V, R);
           let [P1, P1b] = intersect(c, l1);
           let [P2, P2b] = intersect(c, l2);
           let d1 = circle(P1; V, R); let d2 = circle(P2; V, R);
           let Q = other(V, d1, d2);
           let b = line(V, Q);
           return b; }",
    )
    .unwrap();
    let o = Point::from_ints(&s, 0, 0);
    let l1 = geom::line_through(&o, &Point::from_ints(&s, 1, 0)).unwrap();
    let l2 = geom::line_through(&o, &Point::from_ints(&s, 1, 1)).unwrap();
    for seed in 0..5 {
        let res = run(
            &prog,
            &[l1.clone().into(), l2.clone().into(), o.clone().into()],
            &mut SeededOracle::new(seed),
        )
        .unwrap();
        let b = res.output("b").unwrap().as_line().unwrap().clone();
        // a second point of the bisector, at unit distance from V
        let unit = geom::Circle::new(o.clone(), s.one()).unwrap();
        let pts = geom::intersect(&b.clone().into(), &unit.into()).unwrap();
        for p in pts {
            assert_eq!(geom::dist2_to_line(&p, &l1), geom::dist2_to_line(&p, &l2));
        }
        assert!(geom::on(&o, &b.into()));
    }
}

#[test]
fn replay_reproduces_bindings() {
    let s = Session::new();
    let prog = parse(
        "construction f(point A, point B) {
           let c = circle(A; A, B);
           let X = arbitrary in_cell(c < 0);
           let Y = arbitrary in_disk((1/2, sqrt(2)), 1/3);
           let l = line(X, Y);
           return l; }",
    )
    .unwrap();
    let inputs = [pt(&s, 0, 0), pt(&s, 2, 0)];
    let first = run(&prog, &inputs, &mut SeededOracle::new(7)).unwrap();
    let replay = run(&prog, &inputs, &mut ScriptedOracle::from_trace(&first.trace)).unwrap();
    assert_eq!(first.bindings, replay.bindings);
    assert_eq!(first.trace, replay.trace);
    assert_eq!(first.trace.oracle_answers().len(), 2);
}

#[test]
fn non_conforming_oracle_is_rejected() {
    let s = Session::new();
    let prog = parse("construction f(point A, point B) { let c = circle(A; A, B); let X = arbitrary in_cell(c < 0); return X; }")
        .unwrap();
    let outside = Point::from_ints(&s, 5, 5);
    let err = run(&prog, &[pt(&s, 0, 0), pt(&s, 2, 0)], &mut ScriptedOracle::new([outside])).unwrap_err();
    assert!(matches!(err.kind, RunErrorKind::OracleViolation(_)));
    let err = run(&prog, &[pt(&s, 0, 0), pt(&s, 2, 0)], &mut ScriptedOracle::default()).unwrap_err();
    assert!(matches!(err.kind, RunErrorKind::OracleFailed(_)));
}

#[test]
fn other_intersection_examples() {
    let s = Session::new();
    let c1: GeomObject = geom::Circle::new(Point::from_ints(&s, 0, 0), s.one()).unwrap().into();
    let c2: GeomObject = geom::Circle::new(Point::from_ints(&s, 1, 0), s.one()).unwrap().into();
    let h = s.parse("sqrt(3)/2").unwrap();
    let top = Point::new(s.ratio(1, 2), h.clone());
    assert_eq!(other_intersection(&top, &c1, &c2).unwrap(), Point::new(s.ratio(1, 2), -h));
    let tangent: GeomObject = geom::Circle::new(Point::from_ints(&s, 2, 0), s.one()).unwrap().into();
    assert!(other_intersection(&Point::from_ints(&s, 1, 0), &c1, &tangent).is_err());
    assert!(other_intersection(&Point::from_ints(&s, 3, 3), &c1, &c2).is_err());
}

#[test]
fn inputs_are_type_checked() {
    let s = Session::new();
    let prog = parse(MIDPOINT).unwrap();
    let err = run(&prog, &[pt(&s, 0, 0)], &mut SeededOracle::new(0)).unwrap_err();
    assert!(matches!(err.kind, RunErrorKind::InputMismatch(_)));
    let other = Session::new();
    let err = run(&prog, &[pt(&s, 0, 0), pt(&other, 1, 0)], &mut SeededOracle::new(0)).unwrap_err();
    assert!(matches!(err.kind, RunErrorKind::InputMismatch(_)));
}

fn boost() -> geom::ProjectiveMap {
    geom::ProjectiveMap::from_ratios([[(5, 4), (0, 1), (3, 4)], [(0, 1), (1, 1), (0, 1)], [(3, 4), (0, 1), (5, 4)]])
        .unwrap()
}

#[test]
fn boost_replay_flips_orientation_test() {
    let s = Session::new();
    let prog = parse(
        "construction f(point A, point B, point C) {
           let l = line(A, B);
           if ccw(A, B, C) { let m = line(B, C); } else { let m = line(A, C); }
           return l; }",
    )
    .unwrap();
    let res = run(&prog, &[pt(&s, -2, 0), pt(&s, 0, 0), pt(&s, 0, 1)], &mut SeededOracle::new(0)).unwrap();
    let report = projective_replay(&res.trace, &boost());
    assert!(report.incidences_hold());
    assert_eq!(report.incidences_checked, 4);
    assert!(matches!(
        report.breakpoint,
        Some(Breakpoint::TestFlipped { recorded: true, mapped: false, .. })
    ));
}

#[test]
fn straightedge_trace_transfers_verbatim() {
    let s = Session::new();
    let prog = parse(
        "construction f(point A, point B, point C, point D) {
           let ab = line(A, B); let cd = line(C, D);
           let [X] = intersect(ab, cd);
           let ac = line(A, C);
           return X; }",
    )
    .unwrap();
    let inputs = [pt(&s, 0, 0), pt(&s, 1, 1), pt(&s, 0, 1), pt(&s, 1, 0)];
    let res = run(&prog, &inputs, &mut SeededOracle::new(0)).unwrap();
    let report = projective_replay(&res.trace, &boost());
    assert_eq!(report.breakpoint, None);
    assert_eq!((report.incidences_checked, report.incidences_preserved), (8, 8));
}

#[test]
fn midpoint_replay_breaks_at_first_compass_step() {
    let s = Session::new();
    let prog = parse(MIDPOINT).unwrap();
    let res = run(&prog, &[pt(&s, 0, 0), pt(&s, 2, 0)], &mut SeededOracle::new(0)).unwrap();
    let report = projective_replay(&res.trace, &boost());
    match &report.breakpoint {
        Some(Breakpoint::CompassStep { name, .. }) => assert_eq!(name, "c1"),
        other => panic!("{other:?}"),
    }
    assert!(report.incidences_hold());
}
