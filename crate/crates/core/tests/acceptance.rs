//! Acceptance run: one line per criterion, then a nonzero exit if any failed.
//! Runs without the test harness so the lines always show.

use std::time::{Duration, Instant};

use euclid_core::algebra::{self, IntPoly, Verdict};
use euclid_core::closure::{self, Budget, Configuration, Derivation};
use euclid_core::dsl::{self, projective_replay, Breakpoint, SeededOracle};
use euclid_core::field::{Rational, Real, Session, Sign};
use euclid_core::game::{
    self, certificate_bob, check_certificate, densify, CertCheck, CertCondition, CertVerdict, Certificate,
    ConstructiblePlane, Ops, Outcome, ProgramAlice, RandomAlice, RationalPlane, Scaffold,
};
use euclid_core::geom::{self, Circle, GeomObject, Point, ProjectiveMap};
use euclid_core::stdlib::{self, VerifyOptions};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn start(objs: &[GeomObject]) -> Configuration {
    let mut e = Configuration::new();
    for o in objs {
        e.insert(o.clone());
    }
    e
}

// 1. exact arithmetic

/// Random element of Q(sqrt2, sqrt3, sqrt(1 + sqrt2), sqrt5), height 4.
fn tower_sample(basis: &[Real], rng: &mut ChaCha8Rng) -> Real {
    let s = basis[0].session();
    let mut x = s.zero();
    for b in basis {
        if rng.gen_bool(0.5) {
            x = x + b.scale(&q(rng.gen_range(-9..=9), rng.gen_range(1..=5)));
        }
    }
    x
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

fn exact_arithmetic() -> Check {
    let s = Session::new();
    let roots = [
        s.integer(2).sqrt().unwrap(),
        s.integer(3).sqrt().unwrap(),
        (s.one() + s.integer(2).sqrt().unwrap()).sqrt().unwrap(),
        s.integer(5).sqrt().unwrap(),
    ];
    // the 16 monomials span the tower
    let mut basis = vec![s.one()];
    for r in &roots {
        let more: Vec<Real> = basis.iter().map(|b| b * r).collect();
        basis.extend(more);
    }
    ensure(s.height() == 4, || format!("tower height {}", s.height()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs: Vec<Real> = (0..1000).map(|_| tower_sample(&basis, &mut rng)).collect();
    ensure(xs.iter().all(|x| x.level() <= 4), || "element above height 4".into())?;
    for w in xs.chunks(3) {
        let [x, y, z] = w else { continue };
        ensure(((x + y) + z - (x + &(y + z))).is_zero(), || "addition not associative".into())?;
        ensure(((x * y) * z - x * &(y * z)).is_zero(), || "multiplication not associative".into())?;
        ensure((x * &(y + z) - (x * y + x * z)).is_zero(), || "not distributive".into())?;
        ensure((x * y - y * x).is_zero(), || "not commutative".into())?;
        if !y.is_zero() {
            let back = x.checked_div(y).map_err(|e| e.to_string())? * y;
            ensure((back - x).is_zero(), || "division does not invert".into())?;
        }
        // floating point as an independent witness
        ensure(close((x * y).to_f64(), x.to_f64() * y.to_f64()), || "product disagrees with floats".into())?;
        ensure(close((x + y).to_f64(), x.to_f64() + y.to_f64()), || "sum disagrees with floats".into())?;
    }
    let s = Session::new();
    let e = s.parse("sqrt(2) + sqrt(3) - sqrt(5 + 2*sqrt(6))").map_err(|e| e.to_string())?;
    ensure(e.sign() == Sign::Zero, || format!("sign is {}", e.sign()))?;
    let r = s.parse("sqrt(2) + sqrt(3)").unwrap();
    let poly = r.char_poly().map_err(|e| e.to_string())?;
    let want: Vec<BigInt> = [1, 0, -10, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
    ensure(poly == want, || format!("char poly {poly:?}"))?;
    Ok("1000 elements of height <= 4; sign 0; X^4 - 10X^2 + 1".into())
}

// 2. sqrt 3 without tests

fn tietze_sqrt3() -> Check {
    let s = Session::new();
    let a = Point::from_ints(&s, 0, 0);
    let b = Point::from_ints(&s, 1, 0);
    let c1: GeomObject = geom::circle_centered(&a, &a, &b).unwrap().into();
    let c2: GeomObject = geom::circle_centered(&b, &a, &b).unwrap().into();
    let chord = geom::intersect(&c1, &c2).map_err(|e| e.to_string())?;
    ensure(chord.len() == 2, || "circles do not meet twice".into())?;
    let d2 = geom::dist2(&chord[0], &chord[1]);
    ensure(d2 == s.integer(3), || format!("chord squared length {d2}"))?;
    let entry = stdlib::entry("sqrt3_segment").ok_or("no sqrt3 entry")?;
    let prog = entry.program();
    ensure(stdlib::test_count(&prog) == 0, || "entry uses tests".into())?;
    let res = dsl::run(&prog, &[a.clone().into(), b.clone().into()], &mut SeededOracle::new(0)).map_err(|e| e.to_string())?;
    let p = res.outputs[0].1.as_point().ok_or("P is not a point")?;
    let r = res.outputs[1].1.as_point().ok_or("Q is not a point")?;
    ensure(geom::dist2(p, r) == s.integer(3), || "segment is not sqrt 3 long".into())?;
    Ok("chord^2 = 3 exactly; 0 If/Choose/While statements".into())
}

// 3. Wantzel

fn wantzel() -> Check {
    let mut seen = vec![];
    for (name, p) in [
        ("x^3 - 2", algebra::parse_poly("x^3 - 2")),
        ("8x^3 - 6x - 1", algebra::parse_poly("8x^3 - 6x - 1")),
        ("heptagon", algebra::preset("heptagon")),
    ] {
        let p: IntPoly = p.map_err(|e| e.to_string())?;
        let v = algebra::wantzel_check(&p).map_err(|e| e.to_string())?;
        ensure(v == Verdict::NotConstructible { degree: 3 }, || format!("{name}: {v}"))?;
        seen.push(name);
    }
    let v = algebra::wantzel_check(&algebra::parse_poly("x^2 - 2").unwrap()).map_err(|e| e.to_string())?;
    ensure(v == Verdict::NecessaryConditionHolds { degree: 2 }, || format!("x^2 - 2: {v}"))?;
    Ok(format!("{} NotConstructible; x^2 - 2 NecessaryConditionHolds", seen.join(", ")))
}

// 4. closure

fn closure_rounds() -> Check {
    let s = Session::new();
    let circle: GeomObject = Circle::new(Point::from_ints(&s, 0, 0), s.one()).unwrap().into();
    let e = start(&[circle]);
    let next = closure::expand_once(&e, 5000).map_err(|e| e.to_string())?;
    ensure(next.same_set(&e), || format!("one circle grew to {} objects", next.len()))?;

    let e = start(&[Point::from_ints(&s, 0, 0).into(), Point::from_ints(&s, 2, 0).into()]);
    let m: GeomObject = Point::from_ints(&s, 1, 0).into();
    let budget = Budget::new(3, 5000).unwrap();
    let d = closure::derivable(&e, &m, budget).map_err(|e| e.to_string())?;
    let k = match d {
        Derivation::Yes(k) if k <= 3 => k,
        other => return Err(format!("midpoint: {other}")),
    };
    // the full second round exceeds the height cap; its partial trace still counts
    let trace = match closure::closure_trace(&e, Budget::new(2, 5000).unwrap()) {
        Ok(t) => t,
        Err(err) if err.is_resource() => err.partial().cloned().ok_or("no partial trace")?,
        Err(err) => return Err(err.to_string()),
    };
    let mut checked = 0;
    for (o, p) in trace.objects.iter().zip(&trace.provenance) {
        if o.as_point().is_some() {
            checked += 1;
            ensure(p.height <= p.generation, || format!("{o}: height {} > generation {}", p.height, p.generation))?;
        }
    }
    Ok(format!("one circle is a fixed point; midpoint Yes({k}); {checked} points obey height <= generation"))
}

// 5. DSL and closure agree

fn coherence() -> Check {
    let mut n = 0;
    for entry in stdlib::corpus() {
        let prog = entry.program();
        if prog.has_loops() || prog.has_arbitrary() {
            continue;
        }
        let s = Session::with_height_cap(8);
        let inputs = entry.sample_inputs(&s, 0);
        let res = dsl::run(&prog, &inputs, &mut SeededOracle::new(0)).map_err(|e| format!("{}: {e}", entry.name))?;
        let e = start(&inputs);
        let hints = res.trace.objects();
        for (name, o) in &res.outputs {
            let d = closure::derivable_guided(&e, o, &hints, prog.len());
            ensure(matches!(d, Derivation::Yes(_)), || format!("{}: output {name} gave {d}", entry.name))?;
        }
        n += 1;
    }
    ensure(n >= 5, || format!("only {n} programs checked"))?;
    Ok(format!("{n} loop-free programs, every output derivable within program length"))
}

// 6. corpus

fn corpus() -> Check {
    let opts = VerifyOptions::default();
    ensure(opts.trials >= 20 && opts.seeds >= 5, || "too few runs".into())?;
    let mut passed = 0;
    for entry in stdlib::corpus() {
        let r = stdlib::verify(entry, opts);
        if entry.expect_pass {
            ensure(r.passed(), || format!("{}: {}", entry.name, r.verdict()))?;
            passed += 1;
        } else {
            let f = r.failure.as_ref().ok_or_else(|| format!("{} did not fail", entry.name))?;
            ensure(!f.trace.events.is_empty(), || "failure has no witness trace".into())?;
        }
    }
    Ok(format!("{passed} entries PASS 20 x 5; broken incenter FAILs with a witness trace"))
}

// 7. game

fn game_suite() -> Check {
    let s = Session::new();
    let (a, b) = (Point::from_ints(&s, 0, 0), Point::from_ints(&s, 2, 1));
    let m: GeomObject = Point::from_ratios(&s, (1, 1), (1, 2)).into();
    let ab: Vec<GeomObject> = vec![a.into(), b.into()];
    let midpoint = stdlib::entry("midpoint").unwrap().program();
    let certs: [&dyn Certificate; 2] = [&RationalPlane, &ConstructiblePlane];
    let mut bobs: Vec<Box<dyn game::BobPolicy + '_>> = vec![Box::new(game::sampling_bob(0))];
    bobs.extend(certs.iter().map(|c| Box::new(certificate_bob(*c)) as Box<dyn game::BobPolicy>));
    for bob in bobs.iter_mut() {
        let mut alice = ProgramAlice::new(midpoint.clone(), ab.clone());
        let r = game::play(&start(&ab), &m, &mut alice, bob.as_mut(), 20);
        ensure(r.outcome.alice_wins(), || format!("midpoint game: {}", r.outcome))?;
    }

    let entry = stdlib::entry("circle_center").unwrap();
    for trial in 0..10 {
        let s = Session::with_height_cap(8);
        let inputs = entry.sample_inputs(&s, trial);
        let center: GeomObject = inputs[0].as_circle().unwrap().center().clone().into();
        let mut alice = ProgramAlice::new(entry.program(), inputs.clone());
        let r = game::play(&start(&inputs), &center, &mut alice, &mut game::sampling_bob(trial), 40);
        ensure(r.outcome.alice_wins(), || format!("circle {trial}: {}", r.outcome))?;
    }

    let s = Session::new();
    let e = start(&[Point::from_ints(&s, 0, 0).into(), Point::from_ints(&s, 1, 0).into()]);
    let target: GeomObject = Point::new(s.parse("sqrt(2)").unwrap(), s.zero()).into();
    let v = check_certificate(&RationalPlane, &e, &target, CertCheck::new(Ops::STRAIGHTEDGE));
    ensure(v.passed(), || format!("straightedge certificate: {v}"))?;
    for seed in 0..5 {
        let r = game::play(
            &e,
            &target,
            &mut RandomAlice::new(seed, Ops::STRAIGHTEDGE),
            &mut certificate_bob(&RationalPlane),
            30,
        );
        ensure(r.outcome == Outcome::Timeout(30), || format!("seed {seed}: {}", r.outcome))?;
        ensure(
            r.position.iter().all(|o| o.reals().iter().all(|x| x.level() == 0)),
            || "a position coordinate left height 0".into(),
        )?;
    }
    let v = check_certificate(&RationalPlane, &e, &target, CertCheck::new(Ops::ALL));
    let h = s.parse("sqrt(3)/2").unwrap();
    let want: [GeomObject; 2] = [Point::new(s.ratio(1, 2), h.clone()).into(), Point::new(s.ratio(1, 2), -h).into()];
    match &v {
        CertVerdict::Fail {
            condition: CertCondition::Closed,
            witness,
        } if want.iter().all(|w| witness.contains(w)) => {}
        other => return Err(format!("compass certificate: {other}")),
    }
    Ok("midpoint wins vs 3 Bobs; 10/10 circles; rational plane PASS then Timeout at height 0; compass FAIL at (1/2, +-sqrt3/2)".into())
}

// 8. densification

fn sample_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(-16..=16), 4)
}

fn densification() -> Check {
    let s = Session::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (a, b, c) = loop {
        let pts: Vec<Point> = (0..3)
            .map(|_| Point::from_rationals(&s, sample_rational(&mut rng), sample_rational(&mut rng)))
            .collect();
        // keep triangles of area at least 1
        let area2 = (&pts[1].x - &pts[0].x) * (&pts[2].y - &pts[0].y) - (&pts[1].y - &pts[0].y) * (&pts[2].x - &pts[0].x);
        if area2.to_f64().abs() >= 2.0 {
            break (pts[0].clone(), pts[1].clone(), pts[2].clone());
        }
    };
    let w: [i64; 3] = [rng.gen_range(1..=5), rng.gen_range(1..=5), rng.gen_range(1..=5)];
    let total = q(w.iter().sum(), 1);
    let bary = |f: fn(&Point) -> &Real| {
        (f(&a).scale(&q(w[0], 1)) + f(&b).scale(&q(w[1], 1)) + f(&c).scale(&q(w[2], 1))).scale(&(Rational::one() / &total))
    };
    let d = Point::new(bary(|p| &p.x), bary(|p| &p.y));
    let eps = q(1, 64);
    let eps_f = eps.to_f64().unwrap();
    let mut reached = 0;
    let mut iters = vec![];
    while reached < 10 {
        let t = Point::from_rationals(&s, q(rng.gen_range(-64..=64), 16), q(rng.gen_range(-64..=64), 16));
        if geom::orientation(&b, &c, &t) == Sign::Zero {
            continue;
        }
        let r = densify(&a, &b, &c, &d, &t, &eps, 200).map_err(|e| format!("target {t}: {e}"))?;
        let k = &r.scaffold.construction;
        ensure(k.straightedge_only() && k.replay_ok(), || "non-straightedge provenance".into())?;
        let anc = k.ancestors(r.index);
        ensure(
            anc.iter().all(|&i| !matches!(k.step(i), closure::Step::Circle { .. })),
            || "circle among the ancestors".into(),
        )?;
        let ((px, py), (tx, ty)) = (r.point.to_f64(), t.to_f64());
        ensure(((px - tx).powi(2) + (py - ty).powi(2)).sqrt() <= eps_f + 1e-12, || format!("target {t} missed"))?;
        ensure(
            r.cell_gaps.windows(2).all(|g| g[1].cmp_exact(&g[0]).is_le()),
            || format!("target {t}: cell gap grew"),
        )?;
        iters.push(r.iterations);
        reached += 1;
    }
    // the uniform grid gap shrinks with every refinement
    let mut sc = Scaffold::new(&a, &b, &c, &d).map_err(|e| e.to_string())?;
    let mut gaps = vec![sc.max_gap2().map_err(|e| e.to_string())?];
    for _ in 0..4 {
        sc.refine().map_err(|e| e.to_string())?;
        gaps.push(sc.max_gap2().map_err(|e| e.to_string())?);
    }
    ensure(gaps.windows(2).all(|g| g[1].cmp_exact(&g[0]).is_le()), || "uniform gap grew".into())?;
    Ok(format!(
        "10/10 targets within 1/64 (iterations {:?}); gaps nonincreasing; straightedge only",
        iters
    ))
}

// 9. the projective gap

fn gap_demo() -> Check {
    let t = ProjectiveMap::from_ratios([[(5, 4), (0, 1), (3, 4)], [(0, 1), (1, 1), (0, 1)], [(3, 4), (0, 1), (5, 4)]])
        .map_err(|e| e.to_string())?;
    let s = Session::new();
    let origin = Point::from_ints(&s, 0, 0);
    let unit = Circle::new(origin.clone(), s.one()).unwrap();
    ensure(t.preserves_circle(&unit), || "unit circle not preserved".into())?;
    let image = t.apply_point(&origin).map_err(|e| e.to_string())?;
    ensure(image == Point::from_ratios(&s, (3, 5), (0, 1)), || format!("T(origin) = {image}"))?;

    let entry = stdlib::entry("circle_center").unwrap();
    let res = dsl::run(&entry.program(), &[unit.clone().into()], &mut SeededOracle::new(0)).map_err(|e| e.to_string())?;
    let report = projective_replay(&res.trace, &t);
    ensure(report.incidences_checked > 0 && report.incidences_hold(), || {
        format!("{}/{} incidences", report.incidences_preserved, report.incidences_checked)
    })?;
    let at = match &report.breakpoint {
        Some(Breakpoint::CompassStep { name, .. }) => format!("compass step {name}"),
        Some(Breakpoint::TestFlipped { test, .. }) => format!("test {test}"),
        other => return Err(format!("no breakpoint located: {other:?}")),
    };
    // T(c) is c again, so rerunning the kernel there finds (0, 0), not T(O)
    let again = dsl::run(&entry.program(), &[t.image_circle(&unit).ok_or("T(c) is not a circle")?.into()], &mut SeededOracle::new(5)).map_err(|e| e.to_string())?;
    let o = again.output("O").and_then(|o| o.as_point()).ok_or("no center")?;
    ensure(*o == origin && image != origin, || "kernel result moved".into())?;
    Ok(format!(
        "T(unit circle) = unit circle, T(0,0) = (3/5, 0); {}/{} incidences kept, breaks at {at}",
        report.incidences_preserved, report.incidences_checked
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 9] = [
        ("exact arithmetic", exact_arithmetic, 10),
        ("sqrt 3 without tests", tietze_sqrt3, 10),
        ("Wantzel degree test", wantzel, 1),
        ("closure rounds", closure_rounds, 30),
        ("DSL and closure coherence", coherence, 60),
        ("corpus verification", corpus, 120),
        ("game suite", game_suite, 120),
        ("straightedge densification", densification, 60),
        ("projective gap", gap_demo, 10),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = f();
        let took = t0.elapsed();
        let over = took > Duration::from_secs(*limit);
        let (verdict, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over the {limit} s limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {verdict} ({:.2} s of {limit} s) {detail}",
            i + 1,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
