//! The request game: Alice asks for lines, circles, intersections and
//! points in open regions; Bob answers the point requests. A target is
//! constructible when Alice has a strategy that puts it into the position
//! whatever Bob does.
//!
//! The referee executes the deterministic requests itself and checks every
//! answer of Bob exactly.

mod certificate;
mod densify;
mod uniform;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closure::Configuration;
use crate::dsl::{self, Event, PointOracle, Program, RunOptions};
use crate::field::{Rational, Session, Sign};
use crate::geom::{self, GeomError, GeomObject, Point};
use crate::sample::{Region, Sampler};

pub use certificate::{
    certificate_bob, check_certificate, CertCheck, CertCondition, CertVerdict, Certificate, CertificateBob,
    ConstructiblePlane, Ops, RationalPlane,
};
pub use densify::{densify, Construction, DensifyError, Densified, RestrictedAlice, Scaffold};
pub use uniform::{UniformAlice, UniformRequest, UniformStrategy, UniformView};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "request", rename_all = "snake_case")]
pub enum Request {
    Line {
        p: Point,
        q: Point,
    },
    Circle {
        center: Point,
        a: Point,
        b: Point,
    },
    Intersect {
        g: GeomObject,
        h: GeomObject,
    },
    PointInDisk {
        center: Point,
        #[serde(serialize_with = "ser_rational")]
        radius: Rational,
    },
    PointInCell {
        conditions: Vec<(GeomObject, Sign)>,
    },
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl Request {
    pub fn region(&self) -> Option<Region> {
        match self {
            Request::PointInDisk { center, radius } => Some(Region::Disk {
                center: center.clone(),
                radius: radius.clone(),
            }),
            Request::PointInCell { conditions } => Some(Region::Cell {
                conditions: conditions.clone(),
            }),
            _ => None,
        }
    }

    pub fn from_region(region: Region) -> Request {
        match region {
            Region::Disk { center, radius } => Request::PointInDisk { center, radius },
            Region::Cell { conditions } => Request::PointInCell { conditions },
        }
    }

    pub fn is_point_request(&self) -> bool {
        self.region().is_some()
    }
}

impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Request::Line { p, q } => write!(f, "line {p} {q}"),
            Request::Circle { center, a, b } => write!(f, "circle center {center} radius {a}-{b}"),
            Request::Intersect { g, h } => write!(f, "intersect [{g}] [{h}]"),
            r => write!(f, "point in {}", r.region().expect("point request").describe()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Move {
    Request(Request),
    Stop,
    Resign(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoveRecord {
    pub index: usize,
    pub request: Request,
    pub answer: Option<Point>,
    pub added: Vec<GeomObject>,
}

impl fmt::Display for MoveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "move {}: ALICE {} / BOB ", self.index, self.request)?;
        match &self.answer {
            Some(p) => write!(f, "{p}")?,
            None => write!(f, "-")?,
        }
        write!(f, " / POSITION")?;
        if self.added.is_empty() {
            write!(f, " +nothing")?;
        }
        for o in &self.added {
            write!(f, " +{o}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "abort", content = "detail", rename_all = "snake_case")]
pub enum Abort {
    Malformed(String),
    BobViolation(String),
    BobFailed(String),
    AliceStopped,
    AliceResigned(String),
    Resource(String),
}

impl fmt::Display for Abort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Abort::Malformed(m) => write!(f, "malformed request: {m}"),
            Abort::BobViolation(m) => write!(f, "bob-violation: {m}"),
            Abort::BobFailed(m) => write!(f, "{m}"),
            Abort::AliceStopped => write!(f, "alice stopped"),
            Abort::AliceResigned(m) => write!(f, "alice resigned: {m}"),
            Abort::Resource(m) => write!(f, "resource limit: {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "value", rename_all = "snake_case")]
pub enum Outcome {
    AliceWins(usize),
    Timeout(usize),
    Aborted(Abort),
}

impl Outcome {
    pub fn alice_wins(&self) -> bool {
        matches!(self, Outcome::AliceWins(_))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::AliceWins(k) => write!(f, "AliceWins({k})"),
            Outcome::Timeout(n) => write!(f, "Timeout({n})"),
            Outcome::Aborted(r) => write!(f, "Aborted({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameTrace {
    pub start: Vec<GeomObject>,
    pub target: GeomObject,
    pub moves: Vec<MoveRecord>,
    pub outcome: Outcome,
}

impl GameTrace {
    /// One line per move, then the outcome.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for m in &self.moves {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out.push_str(&format!("outcome: {}\n", self.outcome));
        out
    }
}

#[derive(Clone, Debug)]
pub struct GameResult {
    pub outcome: Outcome,
    pub trace: GameTrace,
    pub position: Configuration,
}

pub trait AliceStrategy {
    fn next_move(&mut self, position: &Configuration, history: &[MoveRecord]) -> Move;
}

/// Answers the point requests. The referee checks every answer.
pub trait BobPolicy {
    fn answer(&mut self, session: &Session, position: &Configuration, region: &Region) -> Result<Point, String>;
}

fn session_of(e: &Configuration, target: &GeomObject) -> Session {
    e.iter().next().unwrap_or(target).session().clone()
}

pub fn play(
    e: &Configuration,
    target: &GeomObject,
    alice: &mut dyn AliceStrategy,
    bob: &mut dyn BobPolicy,
    max_moves: usize,
) -> GameResult {
    let session = session_of(e, target);
    let mut position = e.clone();
    let mut moves: Vec<MoveRecord> = vec![];
    let outcome = 'game: {
        if position.contains(target) {
            break 'game Outcome::AliceWins(0);
        }
        for k in 1..=max_moves {
            let request = match alice.next_move(&position, &moves) {
                Move::Request(r) => r,
                Move::Stop => break 'game Outcome::Aborted(Abort::AliceStopped),
                Move::Resign(why) => break 'game Outcome::Aborted(Abort::AliceResigned(why)),
            };
            let (answer, found) = match referee(&session, &position, &request, bob) {
                Ok(r) => r,
                Err(abort) => break 'game Outcome::Aborted(abort),
            };
            let added: Vec<GeomObject> = found.into_iter().filter(|o| position.insert(o.clone())).collect();
            moves.push(MoveRecord {
                index: k,
                request,
                answer,
                added,
            });
            if position.contains(target) {
                break 'game Outcome::AliceWins(k);
            }
        }
        Outcome::Timeout(max_moves)
    };
    GameResult {
        trace: GameTrace {
            start: e.iter().cloned().collect(),
            target: target.clone(),
            moves,
            outcome: outcome.clone(),
        },
        outcome,
        position,
    }
}

fn geom_abort(e: GeomError) -> Abort {
    if e.is_resource() {
        Abort::Resource(e.to_string())
    } else {
        Abort::Malformed(e.to_string())
    }
}

fn referee(
    session: &Session,
    position: &Configuration,
    request: &Request,
    bob: &mut dyn BobPolicy,
) -> Result<(Option<Point>, Vec<GeomObject>), Abort> {
    let have = |o: GeomObject| -> Result<(), Abort> {
        if position.contains(&o) {
            Ok(())
        } else {
            Err(Abort::Malformed(format!("{o} is not in the position")))
        }
    };
    match request {
        Request::Line { p, q } => {
            have(p.clone().into())?;
            have(q.clone().into())?;
            let l = geom::line_through(p, q).map_err(geom_abort)?;
            Ok((None, vec![l.into()]))
        }
        Request::Circle { center, a, b } => {
            for p in [center, a, b] {
                have(p.clone().into())?;
            }
            let c = geom::circle_centered(center, a, b).map_err(geom_abort)?;
            Ok((None, vec![c.into()]))
        }
        Request::Intersect { g, h } => {
            if !g.is_curve() || !h.is_curve() {
                return Err(Abort::Malformed("intersect needs two curves".into()));
            }
            have(g.clone())?;
            have(h.clone())?;
            let pts = geom::intersect(g, h).map_err(geom_abort)?;
            Ok((None, pts.into_iter().map(GeomObject::from).collect()))
        }
        Request::PointInDisk { radius, .. } => {
            if !radius.is_positive() {
                return Err(Abort::Malformed("disk radius must be positive".into()));
            }
            ask_bob(session, position, request, bob)
        }
        Request::PointInCell { conditions } => {
            for (c, s) in conditions {
                if !c.is_curve() || *s == Sign::Zero {
                    return Err(Abort::Malformed("cell conditions need curves and strict signs".into()));
                }
                have(c.clone())?;
            }
            ask_bob(session, position, request, bob)
        }
    }
}

fn ask_bob(
    session: &Session,
    position: &Configuration,
    request: &Request,
    bob: &mut dyn BobPolicy,
) -> Result<(Option<Point>, Vec<GeomObject>), Abort> {
    let region = request.region().expect("point request");
    let p = bob.answer(session, position, &region).map_err(Abort::BobFailed)?;
    if !p.session().same(session) {
        return Err(Abort::BobViolation("answer from another session".into()));
    }
    if !region.contains(&p) {
        return Err(Abort::BobViolation(format!("{p} is not in {}", region.describe())));
    }
    // a cell excludes every object of the position, points included
    if matches!(request, Request::PointInCell { .. }) && position.contains(&p.clone().into()) {
        return Err(Abort::BobViolation(format!("{p} is already in the position")));
    }
    Ok((Some(p.clone()), vec![p.into()]))
}

/// Bob answering from the seeded dyadic sampler.
#[derive(Clone, Debug)]
pub struct SamplingBob {
    sampler: Sampler,
}

pub fn sampling_bob(seed: u64) -> SamplingBob {
    SamplingBob {
        sampler: Sampler::new(seed),
    }
}

impl BobPolicy for SamplingBob {
    fn answer(&mut self, session: &Session, position: &Configuration, region: &Region) -> Result<Point, String> {
        let known: Vec<GeomObject> = position.iter().cloned().collect();
        self.sampler
            .point_in(session, region, &known)
            .ok_or_else(|| "region-scan-exhausted".to_string())
    }
}

/// Plays a construction program: each step becomes the request that adds its
/// object, and each arbitrary point becomes a point request.
#[derive(Clone, Debug)]
pub struct ProgramAlice {
    program: Program,
    inputs: Vec<GeomObject>,
    options: RunOptions,
}

impl ProgramAlice {
    pub fn new(program: Program, inputs: Vec<GeomObject>) -> ProgramAlice {
        ProgramAlice {
            program,
            inputs,
            options: RunOptions::default(),
        }
    }
}

/// Replays Bob's answers and records the first request beyond them.
struct PendingOracle {
    answers: VecDeque<Point>,
    pending: Option<Region>,
}

impl PointOracle for PendingOracle {
    fn answer(&mut self, _: &Session, region: &Region, _: &[GeomObject]) -> Option<Point> {
        let next = self.answers.pop_front();
        if next.is_none() {
            self.pending = Some(region.clone());
        }
        next
    }
}

fn request_for(step: &str, parents: &[String], env: &HashMap<String, GeomObject>) -> Option<Request> {
    let pt = |i: usize| env.get(&parents[i]).and_then(|o| o.as_point()).cloned();
    let obj = |i: usize| env.get(&parents[i]).cloned();
    if step.starts_with("line(") {
        Some(Request::Line { p: pt(0)?, q: pt(1)? })
    } else if step.starts_with("circle(") {
        Some(Request::Circle {
            center: pt(0)?,
            a: pt(1)?,
            b: pt(2)?,
        })
    } else if step.starts_with("intersect(") {
        Some(Request::Intersect { g: obj(0)?, h: obj(1)? })
    } else if step.starts_with("other(") {
        Some(Request::Intersect { g: obj(1)?, h: obj(2)? })
    } else {
        None
    }
}

impl AliceStrategy for ProgramAlice {
    fn next_move(&mut self, position: &Configuration, history: &[MoveRecord]) -> Move {
        let mut oracle = PendingOracle {
            answers: history.iter().filter_map(|m| m.answer.clone()).collect(),
            pending: None,
        };
        let (trace, error) = match dsl::run_with(&self.program, &self.inputs, &mut oracle, self.options) {
            Ok(res) => (res.trace, None),
            Err(e) => (*e.trace.clone(), Some(e)),
        };
        let mut env: HashMap<String, GeomObject> = HashMap::new();
        for ev in &trace.events {
            if let Event::Bind {
                name,
                object,
                step,
                parents,
            } = ev
            {
                if !position.contains(object) {
                    if let Some(r) = request_for(step, parents, &env) {
                        return Move::Request(r);
                    }
                }
                env.insert(name.clone(), object.clone());
            }
        }
        match (oracle.pending, error) {
            (Some(region), _) => Move::Request(Request::from_region(region)),
            (None, Some(e)) => Move::Resign(format!("program failed: {e}")),
            (None, None) => Move::Stop,
        }
    }
}

/// Repeats the same harmless request forever.
#[derive(Clone, Debug, Default)]
pub struct IdleAlice;

impl AliceStrategy for IdleAlice {
    fn next_move(&mut self, position: &Configuration, _: &[MoveRecord]) -> Move {
        let pts: Vec<&Point> = position.points().collect();
        match pts.as_slice() {
            [p, q, ..] => Move::Request(Request::Line {
                p: (*p).clone(),
                q: (*q).clone(),
            }),
            _ => Move::Request(Request::PointInCell { conditions: vec![] }),
        }
    }
}

/// Random legal requests; a noisy opponent for referee and certificate tests.
#[derive(Clone, Debug)]
pub struct RandomAlice {
    rng: ChaCha8Rng,
    ops: Ops,
}

impl RandomAlice {
    pub fn new(seed: u64, ops: Ops) -> RandomAlice {
        RandomAlice {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ops,
        }
    }
}

impl AliceStrategy for RandomAlice {
    fn next_move(&mut self, position: &Configuration, _: &[MoveRecord]) -> Move {
        let pts: Vec<&Point> = position.points().collect();
        let curves: Vec<&GeomObject> = position.curves().collect();
        let choice = self.rng.gen_range(0..4);
        let rng = &mut self.rng;
        let mut pick = |n: usize| rng.gen_range(0..n);
        match choice {
            0 if pts.len() >= 2 => {
                let (i, j) = (pick(pts.len()), pick(pts.len()));
                if i != j {
                    return Move::Request(Request::Line {
                        p: pts[i].clone(),
                        q: pts[j].clone(),
                    });
                }
            }
            1 if self.ops.compass && pts.len() >= 2 => {
                let (i, j, k) = (pick(pts.len()), pick(pts.len()), pick(pts.len()));
                if j != k {
                    return Move::Request(Request::Circle {
                        center: pts[i].clone(),
                        a: pts[j].clone(),
                        b: pts[k].clone(),
                    });
                }
            }
            2 if curves.len() >= 2 => {
                let (i, j) = (pick(curves.len()), pick(curves.len()));
                if i != j {
                    return Move::Request(Request::Intersect {
                        g: curves[i].clone(),
                        h: curves[j].clone(),
                    });
                }
            }
            _ => {}
        }
        let conditions = curves
            .iter()
            .take(2)
            .map(|c| (GeomObject::clone(c), if pick(2) == 0 { Sign::Negative } else { Sign::Positive }))
            .collect();
        Move::Request(Request::PointInCell { conditions })
    }
}

/// Plays one game per seed in parallel; results come back in seed order.
pub fn tournament<T, F>(seeds: &[u64], game: F) -> Vec<(u64, T)>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    seeds.par_iter().map(|&s| (s, game(s))).collect()
}
