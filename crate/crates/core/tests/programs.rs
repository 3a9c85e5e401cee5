use euclid_core::closure::{self, Configuration, Derivation};
use euclid_core::dsl::{self, Event, RunErrorKind, SeededOracle};
use euclid_core::field::Session;
use euclid_core::geom::{self, GeomObject, Point};
use euclid_core::stdlib;

fn loop_passes(trace: &dsl::Trace) -> usize {
    trace
        .events
        .iter()
        .filter(|e| matches!(e, Event::Test { test, outcome: true, .. } if test.starts_with("dist_le")))
        .count()
}

/// Cramer's rule in floats, independent of the exact line code.
fn cross_f64(p: [(f64, f64); 4]) -> (f64, f64) {
    let [(x1, y1), (x2, y2), (x3, y3), (x4, y4)] = p;
    let d = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4);
    let a = x1 * y2 - y1 * x2;
    let b = x3 * y4 - y3 * x4;
    ((a * (x3 - x4) - (x1 - x2) * b) / d, (a * (y3 - y4) - (y1 - y2) * b) / d)
}

#[test]
fn compass_line_intersection_loops_and_lands_on_both_lines() {
    let entry = stdlib::entry("compass_line_intersection").unwrap();
    let prog = entry.program();
    let mut looped = 0;
    for trial in 0..4 {
        let s = Session::new();
        let inputs = entry.sample_inputs(&s, trial);
        let pts: Vec<&Point> = inputs.iter().map(|o| o.as_point().unwrap()).collect();
        let res = dsl::run(&prog, &inputs, &mut SeededOracle::new(trial)).unwrap();
        let u = res.output("U").and_then(|o| o.as_point()).unwrap();
        let ab: GeomObject = geom::line_through(pts[0], pts[1]).unwrap().into();
        let cd: GeomObject = geom::line_through(pts[2], pts[3]).unwrap().into();
        assert!(geom::on(u, &ab) && geom::on(u, &cd), "trial {trial}: {u}");
        let f: Vec<(f64, f64)> = pts.iter().map(|p| p.to_f64()).collect();
        let (x, y) = cross_f64([f[0], f[1], f[2], f[3]]);
        let (ux, uy) = u.to_f64();
        assert!((ux - x).abs() < 1e-9 && (uy - y).abs() < 1e-9);
        looped += loop_passes(&res.trace);
    }
    assert!(looped > 0, "the doubling loop never ran");
}

#[test]
fn zero_budget_stops_the_first_loop() {
    let entry = stdlib::entry("compass_line_intersection").unwrap();
    let s = Session::new();
    let trial = (0..16)
        .find(|&t| {
            let res = dsl::run(&entry.program(), &entry.sample_inputs(&s, t), &mut SeededOracle::new(0)).unwrap();
            loop_passes(&res.trace) > 0
        })
        .expect("some input needs doubling");
    let prog = dsl::parse(&entry.source.replace("budget 64", "budget 0")).unwrap();
    let err = dsl::run(&prog, &entry.sample_inputs(&s, trial), &mut SeededOracle::new(0)).unwrap_err();
    assert_eq!(err.kind, RunErrorKind::BudgetExhausted(0));
}

#[test]
fn straight_line_programs_agree_with_closure() {
    for entry in stdlib::corpus() {
        let prog = entry.program();
        if prog.has_loops() || prog.has_arbitrary() {
            continue;
        }
        for trial in 0..3 {
            let s = Session::with_height_cap(8);
            let inputs = entry.sample_inputs(&s, trial);
            let res = dsl::run(&prog, &inputs, &mut SeededOracle::new(trial)).unwrap();
            let mut e = Configuration::new();
            for o in &inputs {
                e.insert(o.clone());
            }
            let hints = res.trace.objects();
            for (name, o) in &res.outputs {
                let d = closure::derivable_guided(&e, o, &hints, prog.len());
                assert!(matches!(d, Derivation::Yes(k) if k <= prog.len()), "{} {name}: {d}", entry.name);
            }
        }
    }
}
