//! The shipped construction corpus and its exact verifier.
//!
//! Each entry pairs a program with an input generator and an exact
//! postcondition. `verify` runs every (input, oracle seed) pair in its own
//! session and reports the first failure with its trace.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dsl::{self, Program, RunOptions, RunResult, SeededOracle, Stmt, Trace};
use crate::field::{Rational, Session, Sign};
use crate::geom::{self, Circle, GeomObject, Line, Point};

type InputGen = fn(&Session, &mut ChaCha8Rng) -> Vec<GeomObject>;
type PostCheck = fn(&[GeomObject], &RunResult) -> Result<(), String>;

pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
    /// Uses no straightedge steps.
    pub compass_only: bool,
    /// The postcondition is expected to hold on every trial.
    pub expect_pass: bool,
    inputs: InputGen,
    post: PostCheck,
}

impl CorpusEntry {
    pub fn program(&self) -> Program {
        dsl::parse(self.source).unwrap_or_else(|e| panic!("corpus entry {} does not parse: {e}", self.name))
    }

    /// Deterministic inputs for trial `trial`.
    pub fn sample_inputs(&self, session: &Session, trial: u64) -> Vec<GeomObject> {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        (self.inputs)(session, &mut rng)
    }

    pub fn check(&self, inputs: &[GeomObject], result: &RunResult) -> Result<(), String> {
        (self.post)(inputs, result)
    }
}

macro_rules! entry {
    ($name:literal, $file:literal, $compass:expr, $pass:expr, $inputs:expr, $post:expr) => {
        CorpusEntry {
            name: $name,
            source: include_str!(concat!("../../../corpus/", $file)),
            compass_only: $compass,
            expect_pass: $pass,
            inputs: $inputs,
            post: $post,
        }
    };
}

static CORPUS: [CorpusEntry; 11] = [
    entry!("midpoint", "midpoint.construct", false, true, two_points, post_midpoint),
    entry!("perpendicular_bisector", "perpendicular_bisector.construct", false, true, two_points, post_perp_bisector),
    entry!("perpendicular", "perpendicular.construct", false, true, point_off_line, post_perpendicular),
    entry!("angle_bisector", "angle_bisector.construct", false, true, lines_at_vertex, post_angle_bisector),
    entry!("incenter", "incenter.construct", false, true, triangle, post_incenter),
    entry!("incenter_broken", "incenter_broken.construct", false, false, triangle, post_incenter),
    entry!("circle_center", "circle_center.construct", false, true, one_circle, post_circle_center),
    entry!("compass_reflection", "compass_reflection.construct", true, true, point_off_line, post_reflection),
    entry!("compass_midpoint", "compass_midpoint.construct", true, true, two_points, post_compass_midpoint),
    entry!(
        "compass_line_intersection",
        "compass_line_intersection.construct",
        true,
        true,
        two_lines,
        post_line_intersection
    ),
    entry!("sqrt3_segment", "sqrt3_segment.construct", true, true, two_points, post_sqrt3),
];

pub fn corpus() -> &'static [CorpusEntry] {
    &CORPUS
}

pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}

/// Whether any statement of the program, nested ones included, is a line step.
pub fn has_line_steps(prog: &Program) -> bool {
    prog.statements().iter().any(|s| matches!(s, Stmt::Line { .. }))
}

/// Number of tests (`if`, `while`, `choose`) in the program.
pub fn test_count(prog: &Program) -> usize {
    prog.statements()
        .iter()
        .filter(|s| matches!(s, Stmt::If { .. } | Stmt::While { .. } | Stmt::Choose { .. }))
        .count()
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub trials: u64,
    pub seeds: u64,
    pub height_cap: usize,
    pub max_steps: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 20,
            seeds: 5,
            height_cap: 8,
            max_steps: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub trial: u64,
    pub seed: u64,
    pub inputs: Vec<GeomObject>,
    pub reason: String,
    pub trace: Trace,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub name: String,
    pub runs: usize,
    pub failure: Option<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn verdict(&self) -> String {
        match &self.failure {
            None => format!("PASS ({} runs)", self.runs),
            Some(f) => format!("FAIL (trial {}, seed {}): {}", f.trial, f.seed, f.reason),
        }
    }
}

pub fn verify(entry: &CorpusEntry, options: VerifyOptions) -> VerifyReport {
    let prog = entry.program();
    let pairs: Vec<(u64, u64)> = (0..options.trials)
        .flat_map(|t| (0..options.seeds).map(move |s| (t, s)))
        .collect();
    let failures: Vec<Option<Failure>> = pairs
        .par_iter()
        .map(|&(trial, seed)| {
            let session = Session::with_height_cap(options.height_cap);
            let inputs = entry.sample_inputs(&session, trial);
            let mut oracle = SeededOracle::new(seed);
            let run_options = RunOptions {
                max_steps: options.max_steps,
            };
            let fail = |reason: String, trace: Trace| Failure {
                trial,
                seed,
                inputs: inputs.clone(),
                reason,
                trace,
            };
            match dsl::run_with(&prog, &inputs, &mut oracle, run_options) {
                Err(e) => Some(fail(format!("run error at {e}"), *e.trace)),
                Ok(res) => entry.check(&inputs, &res).err().map(|r| fail(r, res.trace)),
            }
        })
        .collect();
    VerifyReport {
        name: entry.name.to_string(),
        runs: pairs.len(),
        failure: failures.into_iter().flatten().next(),
    }
}

// input generators

fn coord(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(-8..=8);
    let d: i64 = [1, 2, 4][rng.gen_range(0..3)];
    Rational::new(BigInt::from(n), BigInt::from(d))
}

type RPoint = (Rational, Rational);

fn rpoint(rng: &mut ChaCha8Rng) -> RPoint {
    (coord(rng), coord(rng))
}

fn sub(p: &RPoint, q: &RPoint) -> RPoint {
    (&p.0 - &q.0, &p.1 - &q.1)
}

fn cross(u: &RPoint, v: &RPoint) -> Rational {
    &u.0 * &v.1 - &u.1 * &v.0
}

fn dot(u: &RPoint, v: &RPoint) -> Rational {
    &u.0 * &v.0 + &u.1 * &v.1
}

fn to_point(s: &Session, p: &RPoint) -> Point {
    Point::from_rationals(s, p.0.clone(), p.1.clone())
}

fn zero() -> Rational {
    Rational::from_integer(BigInt::from(0))
}

fn two_points(s: &Session, rng: &mut ChaCha8Rng) -> Vec<GeomObject> {
    let a = rpoint(rng);
    let b = loop {
        let b = rpoint(rng);
        if b != a {
            break b;
        }
    };
    vec![to_point(s, &a).into(), to_point(s, &b).into()]
}

fn triangle_points(rng: &mut ChaCha8Rng) -> [RPoint; 3] {
    loop {
        let (a, b, c) = (rpoint(rng), rpoint(rng), rpoint(rng));
        if cross(&sub(&b, &a), &sub(&c, &a)) != zero() {
            return [a, b, c];
        }
    }
}

/// `P, A, B` with `P` off the line `AB`.
fn point_off_line(s: &Session, rng: &mut ChaCha8Rng) -> Vec<GeomObject> {
    triangle_points(rng).iter().map(|p| to_point(s, p).into()).collect()
}

fn triangle(s: &Session, rng: &mut ChaCha8Rng) -> Vec<GeomObject> {
    point_off_line(s, rng)
}

fn lines_at_vertex(s: &Session, rng: &mut ChaCha8Rng) -> Vec<GeomObject> {
    let [v, p, q] = triangle_points(rng);
    let (v, p, q) = (to_point(s, &v), to_point(s, &p), to_point(s, &q));
    let l1 = geom::line_through(&v, &p).expect("distinct");
    let l2 = geom::line_through(&v, &q).expect("distinct");
    vec![l1.into(), l2.into(), v.into()]
}

fn one_circle(s: &Session, rng: &mut ChaCha8Rng) -> Vec<GeomObject> {
    let center = to_point(s, &rpoint(rng));
    let r2 = s.ratio(rng.gen_range(1..=25), rng.gen_range(1..=4));
    vec![Circle::new(center, r2).expect("positive radius").into()]
}

/// `A, B, C, D` with `A` off `CD` and the lines neither parallel nor perpendicular.
fn two_lines(s: &Session, rng: &mut ChaCha8Rng) -> Vec<GeomObject> {
    loop {
        let (a, b, c, d) = (rpoint(rng), rpoint(rng), rpoint(rng), rpoint(rng));
        let (u, v) = (sub(&b, &a), sub(&d, &c));
        if u == (zero(), zero()) || v == (zero(), zero()) {
            continue;
        }
        if cross(&u, &v) == zero() || dot(&u, &v) == zero() || cross(&v, &sub(&a, &c)) == zero() {
            continue;
        }
        return [a, b, c, d].iter().map(|p| to_point(s, p).into()).collect();
    }
}

// postconditions

fn pt(objs: &[GeomObject], i: usize) -> &Point {
    objs[i].as_point().expect("point input")
}

fn out_point<'a>(res: &'a RunResult, name: &str) -> Result<&'a Point, String> {
    res.output(name)
        .and_then(GeomObject::as_point)
        .ok_or_else(|| format!("output {name} is not a point"))
}

fn out_line<'a>(res: &'a RunResult, name: &str) -> Result<&'a Line, String> {
    res.output(name)
        .and_then(GeomObject::as_line)
        .ok_or_else(|| format!("output {name} is not a line"))
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn midpoint_of(a: &Point, b: &Point) -> Point {
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    Point::new((&a.x + &b.x).scale(&half), (&a.y + &b.y).scale(&half))
}

/// `l` is perpendicular to the direction `b - a`.
fn perpendicular_to(l: &Line, a: &Point, b: &Point) -> bool {
    (l.a() * (&b.y - &a.y) - l.b() * (&b.x - &a.x)).is_zero()
}

fn post_midpoint(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let (a, b) = (pt(inp, 0), pt(inp, 1));
    let m = out_point(res, "M")?;
    ensure(*m == midpoint_of(a, b), || format!("M = {m} is not the midpoint of {a} and {b}"))
}

fn post_perp_bisector(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let (a, b) = (pt(inp, 0), pt(inp, 1));
    let l = out_line(res, "l")?;
    ensure(l.eval(&midpoint_of(a, b)).is_zero(), || "l misses the midpoint".into())?;
    ensure(perpendicular_to(l, a, b), || "l is not perpendicular to AB".into())
}

fn post_perpendicular(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let (p, a, b) = (pt(inp, 0), pt(inp, 1), pt(inp, 2));
    let l = out_line(res, "l")?;
    ensure(l.eval(p).is_zero(), || format!("l misses {p}"))?;
    ensure(perpendicular_to(l, a, b), || "l is not perpendicular to AB".into())
}

fn post_angle_bisector(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let l1 = inp[0].as_line().expect("line input");
    let l2 = inp[1].as_line().expect("line input");
    let v = pt(inp, 2);
    let b = out_line(res, "b")?;
    ensure(b.eval(v).is_zero(), || "bisector misses the vertex".into())?;
    // a second point on b, along its direction vector
    let w = Point::new(&v.x + b.b(), &v.y - b.a());
    ensure(geom::dist2_to_line(&w, l1) == geom::dist2_to_line(&w, l2), || {
        format!("{w} on the bisector is not equidistant from l1 and l2")
    })
}

fn post_incenter(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let (a, b, c) = (pt(inp, 0), pt(inp, 1), pt(inp, 2));
    let i = out_point(res, "I")?;
    let sides = [(a, b), (b, c), (c, a)];
    let d: Vec<_> = sides
        .iter()
        .map(|(p, q)| geom::dist2_to_line(i, &geom::line_through(p, q).expect("triangle")))
        .collect();
    ensure(d[0] == d[1] && d[1] == d[2], || format!("{i} is not equidistant from the sides"))?;
    let o = geom::orientation(a, b, c);
    ensure(
        sides.iter().all(|(p, q)| geom::orientation(p, q, i) == o),
        || format!("{i} is not strictly inside the triangle"),
    )
}

fn post_circle_center(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let c = inp[0].as_circle().expect("circle input");
    let o = out_point(res, "O")?;
    ensure(o == c.center(), || format!("O = {o}, center is {}", c.center()))
}

fn post_reflection(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let (p, a, b) = (pt(inp, 0), pt(inp, 1), pt(inp, 2));
    let r = out_point(res, "R")?;
    ensure(r != p, || "reflection equals P".into())?;
    ensure(geom::dist2(a, p) == geom::dist2(a, r) && geom::dist2(b, p) == geom::dist2(b, r), || {
        format!("{r} is not the mirror image of {p}")
    })?;
    ensure(geom::orientation(a, b, &midpoint_of(p, r)) == Sign::Zero, || "midpoint off AB".into())
}

fn post_compass_midpoint(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    post_midpoint(inp, res)
}

fn post_line_intersection(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let (a, b, c, d) = (pt(inp, 0), pt(inp, 1), pt(inp, 2), pt(inp, 3));
    let u = out_point(res, "U")?;
    let ab = geom::line_through(a, b).expect("distinct");
    let cd = geom::line_through(c, d).expect("distinct");
    let x = geom::intersect(&ab.into(), &cd.into()).map_err(|e| e.to_string())?;
    ensure(x.len() == 1 && x[0] == *u, || format!("U = {u}, lines meet at {:?}", x))
}

fn post_sqrt3(inp: &[GeomObject], res: &RunResult) -> Result<(), String> {
    let (a, b) = (pt(inp, 0), pt(inp, 1));
    let (p, q) = (out_point(res, "P")?, out_point(res, "Q")?);
    let three = a.session().integer(3);
    ensure(geom::dist2(p, q) == three * geom::dist2(a, b), || "|PQ|^2 is not 3|AB|^2".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        for e in corpus() {
            let prog = e.program();
            assert_eq!(prog.name, e.name);
        }
    }

    #[test]
    fn compass_only_entries_have_no_lines() {
        for e in corpus() {
            assert_eq!(has_line_steps(&e.program()), !e.compass_only, "{}", e.name);
        }
    }

    #[test]
    fn sqrt3_entry_has_no_tests() {
        let e = entry("sqrt3_segment").unwrap();
        assert_eq!(test_count(&e.program()), 0);
        assert!(test_count(&entry("incenter").unwrap().program()) >= 2);
    }

    #[test]
    fn inputs_are_deterministic() {
        let e = entry("compass_line_intersection").unwrap();
        let s = Session::new();
        assert_eq!(e.sample_inputs(&s, 3), e.sample_inputs(&s, 3));
    }

    #[test]
    fn midpoint_passes_small_run() {
        let opts = VerifyOptions {
            trials: 4,
            seeds: 2,
            ..Default::default()
        };
        let report = verify(entry("midpoint").unwrap(), opts);
        assert!(report.passed(), "{}", report.verdict());
        assert_eq!(report.runs, 8);
    }
}
