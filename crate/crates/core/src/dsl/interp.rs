use std::collections::{HashMap, VecDeque};

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use super::{PointExpr, Pos, Pred, Program, RegionSpec, Stmt, Test, Type};
use crate::field::{Session, Sign};
use crate::geom::{self, GeomError, GeomObject, Point};
use crate::sample::{Region, Sampler};

/// Answers arbitrary-point requests. Answers are checked by the interpreter.
pub trait PointOracle {
    fn answer(&mut self, session: &Session, region: &Region, known: &[GeomObject]) -> Option<Point>;
}

/// Oracle backed by the seeded dyadic sampler.
#[derive(Clone, Debug)]
pub struct SeededOracle {
    sampler: Sampler,
}

impl SeededOracle {
    pub fn new(seed: u64) -> SeededOracle {
        SeededOracle { sampler: Sampler::new(seed) }
    }
}

impl PointOracle for SeededOracle {
    fn answer(&mut self, session: &Session, region: &Region, known: &[GeomObject]) -> Option<Point> {
        self.sampler.point_in(session, region, known)
    }
}

/// Oracle replaying fixed answers in order.
#[derive(Clone, Debug, Default)]
pub struct ScriptedOracle {
    answers: VecDeque<Point>,
}

impl ScriptedOracle {
    pub fn new(answers: impl IntoIterator<Item = Point>) -> ScriptedOracle {
        ScriptedOracle {
            answers: answers.into_iter().collect(),
        }
    }

    pub fn from_trace(trace: &Trace) -> ScriptedOracle {
        ScriptedOracle::new(trace.oracle_answers())
    }
}

impl PointOracle for ScriptedOracle {
    fn answer(&mut self, _: &Session, _: &Region, _: &[GeomObject]) -> Option<Point> {
        self.answers.pop_front()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Bind {
        name: String,
        object: GeomObject,
        step: String,
        parents: Vec<String>,
    },
    Test {
        test: String,
        outcome: bool,
        #[serde(skip)]
        expr: Test,
    },
    Choose { name: String, candidate: String },
    Oracle { name: String, region: Region, answer: Point },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trace {
    pub program: String,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn oracle_answers(&self) -> Vec<Point> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Oracle { answer, .. } => Some(answer.clone()),
                _ => None,
            })
            .collect()
    }

    /// Objects bound during the run, first occurrence order, no repeats.
    pub fn objects(&self) -> Vec<GeomObject> {
        let mut seen = indexmap::IndexSet::new();
        for e in &self.events {
            if let Event::Bind { object, .. } = e {
                seen.insert(object.clone());
            }
        }
        seen.into_iter().collect()
    }

    pub fn test_outcomes(&self) -> Vec<(String, bool)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Test { test, outcome, .. } => Some((test.clone(), *outcome)),
                _ => None,
            })
            .collect()
    }
}

pub type Bindings = IndexMap<String, GeomObject>;

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outputs: Vec<(String, GeomObject)>,
    pub bindings: Bindings,
    pub trace: Trace,
}

impl RunResult {
    pub fn output(&self, name: &str) -> Option<&GeomObject> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Upper bound on executed statements, loops included.
    pub max_steps: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_steps: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RunErrorKind {
    #[error("inputs do not match the parameters: {0}")]
    InputMismatch(String),
    #[error("choice selected {0} candidates, expected exactly one")]
    AmbiguousChoice(usize),
    #[error("intersection has {found} points, {expected} names requested")]
    IntersectionCount { expected: usize, found: usize },
    #[error("loop budget {0} exhausted")]
    BudgetExhausted(usize),
    #[error("oracle answer {0} is not inside the requested region")]
    OracleViolation(String),
    #[error("oracle found no point in {0}")]
    OracleFailed(String),
    #[error("step limit {0} reached")]
    StepLimit(usize),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Clone, Debug, Error)]
#[error("{pos}: {kind}")]
pub struct RunError {
    pub kind: RunErrorKind,
    pub pos: Pos,
    pub trace: Box<Trace>,
}

impl RunError {
    pub fn is_resource(&self) -> bool {
        matches!(&self.kind, RunErrorKind::Geometry(e) if e.is_resource())
    }
}

pub fn run(prog: &Program, inputs: &[GeomObject], oracle: &mut dyn PointOracle) -> Result<RunResult, RunError> {
    run_with(prog, inputs, oracle, RunOptions::default())
}

pub fn run_with(
    prog: &Program,
    inputs: &[GeomObject],
    oracle: &mut dyn PointOracle,
    options: RunOptions,
) -> Result<RunResult, RunError> {
    let session = inputs.first().map(|o| o.session().clone()).unwrap_or_default();
    let mut m = Machine {
        session,
        env: HashMap::new(),
        bindings: IndexMap::new(),
        trace: Trace {
            program: prog.name.clone(),
            events: vec![],
        },
        oracle,
        steps: 0,
        max_steps: options.max_steps,
    };
    let start = Pos { line: 1, col: 1 };
    if inputs.len() != prog.params.len() {
        return Err(m.error(
            RunErrorKind::InputMismatch(format!("{} inputs for {} parameters", inputs.len(), prog.params.len())),
            start,
        ));
    }
    for (param, obj) in prog.params.iter().zip(inputs) {
        let ok = match param.ty {
            Type::Point => obj.as_point().is_some(),
            Type::Line => obj.as_line().is_some(),
            Type::Circle => obj.as_circle().is_some(),
        };
        if !ok || !obj.session().same(&m.session) {
            return Err(m.error(
                RunErrorKind::InputMismatch(format!("'{}' needs a {} of the shared session", param.name, param.ty)),
                start,
            ));
        }
        m.bind(&param.name, obj.clone(), "input".into(), vec![]);
    }
    m.block(&prog.body)?;
    let outputs = prog
        .returns
        .iter()
        .map(|n| (n.clone(), m.env[n].clone()))
        .collect();
    Ok(RunResult {
        outputs,
        bindings: m.bindings,
        trace: m.trace,
    })
}

struct Machine<'o> {
    session: Session,
    env: HashMap<String, GeomObject>,
    bindings: Bindings,
    trace: Trace,
    oracle: &'o mut dyn PointOracle,
    steps: usize,
    max_steps: usize,
}

impl Machine<'_> {
    fn error(&self, kind: RunErrorKind, pos: Pos) -> RunError {
        RunError {
            kind,
            pos,
            trace: Box::new(self.trace.clone()),
        }
    }

    fn bind(&mut self, name: &str, object: GeomObject, step: String, parents: Vec<String>) {
        self.trace.events.push(Event::Bind {
            name: name.to_string(),
            object: object.clone(),
            step,
            parents,
        });
        self.env.insert(name.to_string(), object.clone());
        self.bindings.insert(name.to_string(), object);
    }

    fn get(&self, name: &str) -> &GeomObject {
        // the checker guarantees every use is defined
        &self.env[name]
    }

    fn point(&self, name: &str) -> &Point {
        self.get(name).as_point().expect("checked point")
    }

    fn block(&mut self, body: &[Stmt]) -> Result<(), RunError> {
        for s in body {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn geom<T>(&self, r: Result<T, GeomError>, pos: Pos) -> Result<T, RunError> {
        r.map_err(|e| self.error(e.into(), pos))
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), RunError> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(self.error(RunErrorKind::StepLimit(self.max_steps), s.pos()));
        }
        match s {
            Stmt::Line { name, p, q, pos } => {
                let l = self.geom(geom::line_through(self.point(p), self.point(q)), *pos)?;
                self.bind(name, l.into(), format!("line({p}, {q})"), vec![p.clone(), q.clone()]);
            }
            Stmt::Circle { name, center, a, b, pos } => {
                let c = self.geom(
                    geom::circle_centered(self.point(center), self.point(a), self.point(b)),
                    *pos,
                )?;
                self.bind(
                    name,
                    c.into(),
                    format!("circle({center}; {a}, {b})"),
                    vec![center.clone(), a.clone(), b.clone()],
                );
            }
            Stmt::Intersect { names, g, h, pos } => {
                let pts = self.geom(geom::intersect(self.get(g), self.get(h)), *pos)?;
                if pts.len() != names.len() {
                    return Err(self.error(
                        RunErrorKind::IntersectionCount {
                            expected: names.len(),
                            found: pts.len(),
                        },
                        *pos,
                    ));
                }
                for (n, p) in names.iter().zip(pts) {
                    self.bind(n, p.into(), format!("intersect({g}, {h})"), vec![g.clone(), h.clone()]);
                }
            }
            Stmt::Other { name, p, g, h, pos } => {
                let q = self.geom(geom::other_intersection(self.point(p), self.get(g), self.get(h)), *pos)?;
                self.bind(
                    name,
                    q.into(),
                    format!("other({p}, {g}, {h})"),
                    vec![p.clone(), g.clone(), h.clone()],
                );
            }
            Stmt::Choose { name, candidates, test, pos } => {
                let saved = self.env.get(name).cloned();
                let mut chosen: Vec<(&String, GeomObject)> = vec![];
                for c in candidates {
                    let value = self.get(c).clone();
                    self.env.insert(name.clone(), value.clone());
                    let pass = self.eval(test)?;
                    if pass && !chosen.iter().any(|(_, v)| *v == value) {
                        chosen.push((c, value));
                    }
                }
                match saved {
                    Some(v) => self.env.insert(name.clone(), v),
                    None => self.env.remove(name),
                };
                if chosen.len() != 1 {
                    return Err(self.error(RunErrorKind::AmbiguousChoice(chosen.len()), *pos));
                }
                let (c, value) = chosen.pop().expect("one candidate");
                self.trace.events.push(Event::Choose {
                    name: name.clone(),
                    candidate: c.clone(),
                });
                self.bind(name, value, format!("choose({} | {test})", candidates.join(", ")), vec![c.clone()]);
            }
            Stmt::Arbitrary { name, region, pos } => {
                let region = self.region(region, *pos)?;
                let known: Vec<GeomObject> = self.bindings.values().cloned().collect();
                let Some(answer) = self.oracle.answer(&self.session, &region, &known) else {
                    return Err(self.error(RunErrorKind::OracleFailed(region.describe()), *pos));
                };
                if !answer.session().same(&self.session) || !region.contains(&answer) {
                    return Err(self.error(RunErrorKind::OracleViolation(answer.to_string()), *pos));
                }
                self.trace.events.push(Event::Oracle {
                    name: name.clone(),
                    region: region.clone(),
                    answer: answer.clone(),
                });
                self.bind(name, answer.into(), format!("arbitrary {}", region.describe()), vec![]);
            }
            Stmt::If { test, then, otherwise, .. } => {
                if self.eval_logged(test)? {
                    self.block(then)?;
                } else {
                    self.block(otherwise)?;
                }
            }
            Stmt::While { test, budget, body, pos } => {
                let mut count = 0;
                while self.eval_logged(test)? {
                    if count == *budget {
                        return Err(self.error(RunErrorKind::BudgetExhausted(*budget), *pos));
                    }
                    self.block(body)?;
                    count += 1;
                }
            }
        }
        Ok(())
    }

    fn region(&self, spec: &RegionSpec, pos: Pos) -> Result<Region, RunError> {
        Ok(match spec {
            RegionSpec::Disk { center, radius } => {
                let center = match center {
                    PointExpr::Name(n) => self.point(n).clone(),
                    PointExpr::Coords(x, y) => {
                        let eval = |e: &crate::field::RealExpr| {
                            e.eval(&self.session).map_err(|err| {
                                let geom_err = match err {
                                    crate::field::LiteralError::Field { source, .. } => GeomError::Field(source),
                                    crate::field::LiteralError::Syntax { .. } => GeomError::Degenerate("literal"),
                                };
                                self.error(geom_err.into(), pos)
                            })
                        };
                        Point::new(eval(x)?, eval(y)?)
                    }
                };
                Region::Disk {
                    center,
                    radius: radius.clone(),
                }
            }
            RegionSpec::Cell(conds) => Region::Cell {
                conditions: conds.iter().map(|(n, s)| (self.get(n).clone(), *s)).collect(),
            },
        })
    }

    fn eval_logged(&mut self, t: &Test) -> Result<bool, RunError> {
        let outcome = self.eval(t)?;
        self.trace.events.push(Event::Test {
            test: t.to_string(),
            outcome,
            expr: t.clone(),
        });
        Ok(outcome)
    }

    fn eval(&self, t: &Test) -> Result<bool, RunError> {
        eval_test(t, &self.env).map_err(|e| self.error(e.into(), t.pos()))
    }
}

/// Evaluates a test against named objects. Names must be bound with the
/// types the checker expects.
pub fn eval_test(t: &Test, env: &HashMap<String, GeomObject>) -> Result<bool, GeomError> {
    let (pred, args) = match t {
        Test::Not(inner) => return Ok(!eval_test(inner, env)?),
        Test::Pred { pred, args, .. } => (*pred, args),
    };
    let get = |i: usize| env.get(&args[i]).ok_or(GeomError::Degenerate("unbound name in test"));
    let p = |i: usize| get(i)?.as_point().ok_or(GeomError::NotACurve("test expects a point"));
    Ok(match pred {
        Pred::Equal => get(0)? == get(1)?,
        Pred::On => geom::on(p(0)?, get(1)?),
        Pred::Intersects => geom::intersects(get(0)?, get(1)?)?,
        Pred::Between => geom::between(p(0)?, p(1)?, p(2)?)?,
        Pred::DistLe => geom::dist_compare(p(0)?, p(1)?, p(2)?, p(3)?) != Sign::Positive,
        Pred::DistEq => geom::dist_compare(p(0)?, p(1)?, p(2)?, p(3)?) == Sign::Zero,
        Pred::Ccw => geom::orientation(p(0)?, p(1)?, p(2)?) == Sign::Positive,
    })
}
