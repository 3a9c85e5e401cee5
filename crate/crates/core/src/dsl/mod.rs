//! Construction programs: straight-line steps, explicit intersection choice,
//! ordering tests, arbitrary points and budgeted loops.
//!
//! ```text
//! construction midpoint(point A, point B) {
//!   let c1 = circle(A; A, B); let c2 = circle(B; A, B);
//!   let [P, Q] = intersect(c1, c2);
//!   let l = line(P, Q); let ab = line(A, B);
//!   let [M] = intersect(l, ab);
//!   return M; }
//! ```

mod interp;
mod parse;
mod transfer;

use std::fmt;

use serde::Serialize;

use crate::field::{RealExpr, Sign};

pub use crate::geom::other_intersection;
pub use interp::{
    eval_test, run, run_with, Bindings, Event, PointOracle, RunError, RunErrorKind, RunOptions, RunResult, ScriptedOracle,
    SeededOracle, Trace,
};
pub use parse::{parse, ParseError};
pub use transfer::{projective_replay, Breakpoint, TransferReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Type {
    Point,
    Line,
    Circle,
}

impl Type {
    pub fn is_curve(self) -> bool {
        self != Type::Point
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Point => "point",
            Type::Line => "line",
            Type::Circle => "circle",
        })
    }
}

/// Line and column, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub ty: Type,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub returns: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pred {
    Equal,
    On,
    Intersects,
    Between,
    DistLe,
    DistEq,
    Ccw,
}

impl Pred {
    pub fn keyword(self) -> &'static str {
        match self {
            Pred::Equal => "equal",
            Pred::On => "on",
            Pred::Intersects => "intersects",
            Pred::Between => "between",
            Pred::DistLe => "dist_le",
            Pred::DistEq => "dist_eq",
            Pred::Ccw => "ccw",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Pred> {
        Some(match word {
            "equal" => Pred::Equal,
            "on" => Pred::On,
            "intersects" => Pred::Intersects,
            "between" => Pred::Between,
            "dist_le" => Pred::DistLe,
            "dist_eq" => Pred::DistEq,
            "ccw" => Pred::Ccw,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Test {
    Pred { pred: Pred, args: Vec<String>, pos: Pos },
    Not(Box<Test>),
}

impl Test {
    pub fn pos(&self) -> Pos {
        match self {
            Test::Pred { pos, .. } => *pos,
            Test::Not(inner) => inner.pos(),
        }
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Test::Pred { pred, args, .. } => write!(f, "{}({})", pred.keyword(), args.join(", ")),
            Test::Not(t) => write!(f, "not {t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointExpr {
    Name(String),
    Coords(RealExpr, RealExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegionSpec {
    Disk { center: PointExpr, radius: crate::field::Rational },
    Cell(Vec<(String, Sign)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Line { name: String, p: String, q: String, pos: Pos },
    Circle { name: String, center: String, a: String, b: String, pos: Pos },
    Intersect { names: Vec<String>, g: String, h: String, pos: Pos },
    Other { name: String, p: String, g: String, h: String, pos: Pos },
    Choose { name: String, candidates: Vec<String>, test: Test, pos: Pos },
    Arbitrary { name: String, region: RegionSpec, pos: Pos },
    If { test: Test, then: Vec<Stmt>, otherwise: Vec<Stmt>, pos: Pos },
    While { test: Test, budget: usize, body: Vec<Stmt>, pos: Pos },
}

impl Stmt {
    pub fn pos(&self) -> Pos {
        match self {
            Stmt::Line { pos, .. }
            | Stmt::Circle { pos, .. }
            | Stmt::Intersect { pos, .. }
            | Stmt::Other { pos, .. }
            | Stmt::Choose { pos, .. }
            | Stmt::Arbitrary { pos, .. }
            | Stmt::If { pos, .. }
            | Stmt::While { pos, .. } => *pos,
        }
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a Stmt>) {
        out.push(self);
        match self {
            Stmt::If { then, otherwise, .. } => {
                then.iter().chain(otherwise).for_each(|s| s.walk(out));
            }
            Stmt::While { body, .. } => body.iter().for_each(|s| s.walk(out)),
            _ => {}
        }
    }
}

impl Program {
    /// Every statement, nested ones included, in source order.
    pub fn statements(&self) -> Vec<&Stmt> {
        let mut out = vec![];
        for s in &self.body {
            s.walk(&mut out);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.statements().len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    pub fn has_loops(&self) -> bool {
        self.statements().iter().any(|s| matches!(s, Stmt::While { .. }))
    }

    pub fn has_arbitrary(&self) -> bool {
        self.statements().iter().any(|s| matches!(s, Stmt::Arbitrary { .. }))
    }

    /// Whether any statement branches on a test (`if`, `while`, `choose`).
    pub fn has_tests(&self) -> bool {
        self.statements()
            .iter()
            .any(|s| matches!(s, Stmt::If { .. } | Stmt::While { .. } | Stmt::Choose { .. }))
    }

    pub fn uses_straightedge(&self) -> bool {
        self.statements().iter().any(|s| matches!(s, Stmt::Line { .. }))
    }
}

#[cfg(test)]
mod tests;
