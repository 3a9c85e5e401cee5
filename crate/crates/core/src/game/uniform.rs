//! Uniform strategies see names and test answers, never coordinates.
//!
//! Objects are named by their position in the configuration, in the order
//! they entered it. Point requests are cells given by sign conditions on
//! named curves; disks would need coordinates.

use std::collections::HashMap;

use super::{AliceStrategy, Move, MoveRecord, Request};
use crate::closure::Configuration;
use crate::dsl::{eval_test, Pos, Pred, Test, Type};
use crate::field::Sign;
use crate::geom::{self, GeomError, GeomObject};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniformRequest {
    Line(usize, usize),
    Circle { center: usize, a: usize, b: usize },
    Intersect(usize, usize),
    PointInCell(Vec<(usize, Sign)>),
}

/// What a uniform strategy may ask about the position.
pub struct UniformView<'a> {
    position: &'a Configuration,
}

impl<'a> UniformView<'a> {
    pub fn new(position: &'a Configuration) -> UniformView<'a> {
        UniformView { position }
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn kind(&self, i: usize) -> Option<Type> {
        Some(match self.position.get(i)? {
            GeomObject::Point(_) => Type::Point,
            GeomObject::Line(_) => Type::Line,
            GeomObject::Circle(_) => Type::Circle,
        })
    }

    /// Indices of every object of one kind.
    pub fn all(&self, ty: Type) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.kind(i) == Some(ty)).collect()
    }

    /// Evaluates a test predicate on named objects.
    pub fn test(&self, pred: Pred, args: &[usize]) -> Result<bool, GeomError> {
        let mut env = HashMap::new();
        let mut names = vec![];
        for &i in args {
            let o = self.position.get(i).ok_or(GeomError::Degenerate("no such object"))?;
            let n = format!("o{i}");
            env.insert(n.clone(), o.clone());
            names.push(n);
        }
        let t = Test::Pred {
            pred,
            args: names,
            pos: Pos::default(),
        };
        eval_test(&t, &env)
    }

    /// Side of point `p` with respect to curve `c`.
    pub fn side(&self, p: usize, c: usize) -> Option<Sign> {
        let p = self.position.get(p)?.as_point()?;
        geom::side(p, self.position.get(c)?)
    }
}

pub trait UniformStrategy {
    /// `None` stops the game.
    fn next(&mut self, view: &UniformView<'_>) -> Option<UniformRequest>;
}

/// Plays a uniform strategy in the ordinary game.
pub struct UniformAlice<S>(pub S);

impl<S: UniformStrategy> AliceStrategy for UniformAlice<S> {
    fn next_move(&mut self, position: &Configuration, _: &[MoveRecord]) -> Move {
        let Some(req) = self.0.next(&UniformView::new(position)) else {
            return Move::Stop;
        };
        let get = |i: usize| position.get(i).cloned();
        let pt = |i: usize| get(i).and_then(|o| o.as_point().cloned());
        let r = match req {
            UniformRequest::Line(p, q) => pt(p).zip(pt(q)).map(|(p, q)| Request::Line { p, q }),
            UniformRequest::Circle { center, a, b } => match (pt(center), pt(a), pt(b)) {
                (Some(center), Some(a), Some(b)) => Some(Request::Circle { center, a, b }),
                _ => None,
            },
            UniformRequest::Intersect(g, h) => get(g).zip(get(h)).map(|(g, h)| Request::Intersect { g, h }),
            UniformRequest::PointInCell(conds) => conds
                .into_iter()
                .map(|(i, s)| get(i).map(|c| (c, s)))
                .collect::<Option<Vec<_>>>()
                .map(|conditions| Request::PointInCell { conditions }),
        };
        match r {
            Some(r) => Move::Request(r),
            None => Move::Resign("request names a missing object or a point of the wrong kind".into()),
        }
    }
}
