//! Derivable objects: the closure of a configuration under the straightedge,
//! compass and intersection steps, computed breadth first within budgets.

use std::collections::HashSet;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::Real;
use crate::geom::{self, circle_centered, dist2, line_through, GeomError, GeomObject, Point};

/// Finite ordered set of objects; insertion order is the canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Configuration {
    objects: IndexSet<GeomObject>,
}

impl Configuration {
    pub fn new() -> Configuration {
        Configuration::default()
    }

    /// Returns whether the object was new.
    pub fn insert(&mut self, obj: GeomObject) -> bool {
        self.objects.insert(obj)
    }

    pub fn contains(&self, obj: &GeomObject) -> bool {
        self.objects.contains(obj)
    }

    pub fn index_of(&self, obj: &GeomObject) -> Option<usize> {
        self.objects.get_index_of(obj)
    }

    pub fn get(&self, i: usize) -> Option<&GeomObject> {
        self.objects.get_index(i)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GeomObject> {
        self.objects.iter()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.objects.iter().filter_map(GeomObject::as_point)
    }

    pub fn curves(&self) -> impl Iterator<Item = &GeomObject> {
        self.objects.iter().filter(|o| o.is_curve())
    }

    /// The first `n` objects.
    pub fn prefix(&self, n: usize) -> Configuration {
        self.objects.iter().take(n).cloned().collect()
    }

    pub fn is_subset(&self, other: &Configuration) -> bool {
        self.objects.iter().all(|o| other.contains(o))
    }

    pub fn same_set(&self, other: &Configuration) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }
}

impl FromIterator<GeomObject> for Configuration {
    fn from_iter<I: IntoIterator<Item = GeomObject>>(iter: I) -> Self {
        Configuration {
            objects: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Configuration {
    type Item = &'a GeomObject;
    type IntoIter = indexmap::set::Iter<'a, GeomObject>;
    fn into_iter(self) -> Self::IntoIter {
        self.objects.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_rounds: usize,
    pub max_objects: usize,
}

impl Budget {
    pub fn new(max_rounds: usize, max_objects: usize) -> Result<Budget, ClosureError> {
        if max_rounds == 0 || max_objects == 0 {
            return Err(ClosureError::InvalidBudget);
        }
        Ok(Budget { max_rounds, max_objects })
    }

    pub fn rounds(max_rounds: usize) -> Budget {
        Budget {
            max_rounds,
            max_objects: 5000,
        }
    }
}

/// How an object entered the closure. Indices refer to the trace's objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Given,
    Line { through: [usize; 2] },
    Circle { center: usize, radius: [usize; 2] },
    Meet { curves: [usize; 2] },
}

impl Step {
    pub fn parents(&self) -> Vec<usize> {
        match *self {
            Step::Given => vec![],
            Step::Line { through } => through.to_vec(),
            Step::Circle { center, radius } => vec![center, radius[0], radius[1]],
            Step::Meet { curves } => curves.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub step: Step,
    pub generation: usize,
    /// Largest nesting depth of square roots among the object's coordinates.
    pub height: usize,
    /// Most intersection steps involving a circle along any ancestry chain.
    pub circle_steps: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ClosureTrace {
    pub objects: Configuration,
    pub provenance: Vec<Provenance>,
    /// `generation_ends[g]` is the size of generation `g`; a partial trace
    /// may hold objects past the last entry.
    pub generation_ends: Vec<usize>,
}

impl ClosureTrace {
    fn start(e: &Configuration) -> ClosureTrace {
        let provenance = e
            .iter()
            .map(|o| Provenance {
                step: Step::Given,
                generation: 0,
                height: object_height(o),
                circle_steps: 0,
            })
            .collect();
        ClosureTrace {
            objects: e.clone(),
            provenance,
            generation_ends: vec![e.len()],
        }
    }

    pub fn generations(&self) -> Vec<Configuration> {
        self.generation_ends.iter().map(|&n| self.objects.prefix(n)).collect()
    }

    pub fn generation(&self, g: usize) -> Option<Configuration> {
        self.generation_ends.get(g).map(|&n| self.objects.prefix(n))
    }

    pub fn last_generation(&self) -> usize {
        self.generation_ends.len() - 1
    }

    pub fn provenance_of(&self, obj: &GeomObject) -> Option<&Provenance> {
        self.objects.index_of(obj).map(|i| &self.provenance[i])
    }

    fn push(&mut self, obj: GeomObject, step: Step, generation: usize) -> bool {
        if self.objects.contains(&obj) {
            return false;
        }
        let parents = step.parents();
        let inherited = parents
            .iter()
            .map(|&p| self.provenance[p].circle_steps)
            .max()
            .unwrap_or(0);
        let bump = match step {
            Step::Meet { curves } => curves
                .iter()
                .any(|&c| matches!(self.objects.get(c), Some(GeomObject::Circle(_))))
                as usize,
            _ => 0,
        };
        self.provenance.push(Provenance {
            step,
            generation,
            height: object_height(&obj),
            circle_steps: inherited + bump,
        });
        self.objects.insert(obj);
        true
    }
}

pub fn object_height(obj: &GeomObject) -> usize {
    obj.reals().into_iter().map(Real::radical_depth).max().unwrap_or(0)
}

#[derive(Debug, Clone, Error)]
pub enum ClosureError {
    #[error("object limit {limit} exceeded")]
    ObjectLimit { limit: usize, partial: Box<ClosureTrace> },
    #[error("{source}")]
    Geometry {
        source: GeomError,
        partial: Box<ClosureTrace>,
    },
    #[error("budget rounds and objects must be positive")]
    InvalidBudget,
}

impl ClosureError {
    pub fn partial(&self) -> Option<&ClosureTrace> {
        match self {
            ClosureError::ObjectLimit { partial, .. } | ClosureError::Geometry { partial, .. } => Some(partial),
            ClosureError::InvalidBudget => None,
        }
    }

    pub fn is_resource(&self) -> bool {
        match self {
            ClosureError::ObjectLimit { .. } => true,
            ClosureError::Geometry { source, .. } => source.is_resource(),
            ClosureError::InvalidBudget => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Derivation {
    Yes(usize),
    /// Not found within the budget. When the closure stopped growing the
    /// round of the fixed point is recorded.
    NoWithinBudget { fixed_point_at: Option<usize> },
}

impl std::fmt::Display for Derivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Derivation::Yes(k) => write!(f, "Yes({k})"),
            Derivation::NoWithinBudget { fixed_point_at: Some(k) } => {
                write!(f, "NoWithinBudget (fixed point at round {k})")
            }
            Derivation::NoWithinBudget { fixed_point_at: None } => write!(f, "NoWithinBudget"),
        }
    }
}

/// Indices of points and curves in canonical order.
fn split_indices(c: &Configuration) -> (Vec<usize>, Vec<usize>) {
    let mut points = vec![];
    let mut curves = vec![];
    for (i, o) in c.iter().enumerate() {
        if o.is_curve() {
            curves.push(i);
        } else {
            points.push(i);
        }
    }
    (points, curves)
}

fn curve_rank(obj: &GeomObject) -> u8 {
    match obj {
        GeomObject::Line(_) => 0,
        _ => 1,
    }
}

/// One round on the trace's objects. `done_points` and `done_curves` count
/// the leading points/curves whose combinations were already expanded.
fn expand_round(
    trace: &mut ClosureTrace,
    done_points: usize,
    done_curves: usize,
    max_objects: usize,
) -> Result<(), ClosureError> {
    let generation = trace.generation_ends.len();
    let (pts, curves) = split_indices(&trace.objects);
    let point = |i: usize| trace.objects.get(i).and_then(GeomObject::as_point).expect("point index");

    // Straightedge and compass steps; none of them extends the tower, so they
    // are built in parallel and merged in canonical order.
    let mut pairs = vec![];
    for j in 0..pts.len() {
        for i in 0..j {
            if j >= done_points {
                pairs.push((pts[i], pts[j]));
            }
        }
    }
    let lines: Vec<(GeomObject, Step)> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            line_through(point(i), point(j))
                .ok()
                .map(|l| (l.into(), Step::Line { through: [i, j] }))
        })
        .collect();
    let mut triples = vec![];
    for (oi, &o) in pts.iter().enumerate() {
        for j in 0..pts.len() {
            for i in 0..j {
                if oi >= done_points || j >= done_points {
                    triples.push((o, pts[i], pts[j]));
                }
            }
        }
    }
    let circles: Vec<(GeomObject, Step)> = triples
        .par_iter()
        .filter_map(|&(o, a, b)| {
            circle_centered(point(o), point(a), point(b))
                .ok()
                .map(|c| (c.into(), Step::Circle { center: o, radius: [a, b] }))
        })
        .collect();
    let mut new_curves = vec![];
    for (obj, step) in lines.into_iter().chain(circles) {
        let idx = trace.objects.len();
        if trace.push(obj, step, generation) {
            new_curves.push(idx);
            if trace.objects.len() > max_objects {
                return Err(ClosureError::ObjectLimit {
                    limit: max_objects,
                    partial: Box::new(trace.clone()),
                });
            }
        }
    }

    // Intersections of every pair of distinct curves not both already done,
    // lines with lines first, then lines with circles, then circles.
    let all_curves: Vec<usize> = curves.iter().copied().chain(new_curves).collect();
    let mut meet_pairs = vec![];
    for j in 0..all_curves.len() {
        for i in 0..j {
            if j >= done_curves {
                meet_pairs.push((all_curves[i], all_curves[j]));
            }
        }
    }
    let rank = |i: usize| curve_rank(trace.objects.get(i).expect("curve index"));
    meet_pairs.sort_by_key(|&(i, j)| rank(i) + rank(j));
    for (i, j) in meet_pairs {
        let g = trace.objects.get(i).expect("curve").clone();
        let h = trace.objects.get(j).expect("curve").clone();
        let found = geom::intersect(&g, &h).map_err(|source| ClosureError::Geometry {
            source,
            partial: Box::new(trace.clone()),
        })?;
        for p in found {
            if trace.push(p.into(), Step::Meet { curves: [i, j] }, generation)
                && trace.objects.len() > max_objects
            {
                return Err(ClosureError::ObjectLimit {
                    limit: max_objects,
                    partial: Box::new(trace.clone()),
                });
            }
        }
    }
    trace.generation_ends.push(trace.objects.len());
    Ok(())
}

/// Grows `trace` by one generation, reusing the work of the previous one.
fn next_generation(trace: &mut ClosureTrace, max_objects: usize) -> Result<(), ClosureError> {
    let (done_points, done_curves) = if trace.generation_ends.len() >= 2 {
        let prev = trace.objects.prefix(trace.generation_ends[trace.generation_ends.len() - 2]);
        (prev.points().count(), prev.curves().count())
    } else {
        (0, 0)
    };
    expand_round(trace, done_points, done_curves, max_objects)
}

/// `E` plus every object one construction step away from it.
pub fn expand_once(e: &Configuration, max_objects: usize) -> Result<Configuration, ClosureError> {
    let mut trace = ClosureTrace::start(e);
    expand_round(&mut trace, 0, 0, max_objects)?;
    Ok(trace.objects)
}

/// Generations `0..=max_rounds` with provenance, stopping early at a fixed point.
pub fn closure_trace(e: &Configuration, budget: Budget) -> Result<ClosureTrace, ClosureError> {
    let mut trace = ClosureTrace::start(e);
    for _ in 0..budget.max_rounds {
        let before = trace.objects.len();
        next_generation(&mut trace, budget.max_objects)?;
        if trace.objects.len() == before {
            break;
        }
    }
    Ok(trace)
}

/// Whether `x` is one construction step away from `gen`. Works by incidence
/// alone, so it never extends the tower.
pub fn one_step(gen: &Configuration, x: &GeomObject) -> bool {
    let points: Vec<&Point> = gen.points().collect();
    match x {
        GeomObject::Point(p) => {
            let mut through: HashSet<GeomObject> = HashSet::new();
            for c in gen.curves() {
                if geom::on(p, c) {
                    through.insert(c.clone());
                }
            }
            if through.len() >= 2 {
                return true;
            }
            // lines spanned by two configuration points that pass through p
            let mut seen: HashSet<GeomObject> = HashSet::new();
            for a in &points {
                if *a == p {
                    continue;
                }
                let l: GeomObject = line_through(a, p).expect("distinct points").into();
                if !seen.insert(l.clone()) {
                    through.insert(l);
                    if through.len() >= 2 {
                        return true;
                    }
                }
            }
            // circles centered at configuration points with a configuration radius
            let radii = pair_distances(&points);
            for o in &points {
                if *o == p {
                    continue;
                }
                let r2 = dist2(o, p);
                if radii.contains(&r2) {
                    through.insert(geom::Circle::new((*o).clone(), r2).expect("positive radius").into());
                    if through.len() >= 2 {
                        return true;
                    }
                }
            }
            false
        }
        GeomObject::Line(_) => points.iter().filter(|p| geom::on(p, x)).take(2).count() == 2,
        GeomObject::Circle(c) => {
            points.contains(&c.center()) && pair_distances(&points).contains(c.r2())
        }
    }
}

fn pair_distances(points: &[&Point]) -> HashSet<Real> {
    let mut out = HashSet::new();
    for j in 0..points.len() {
        for i in 0..j {
            out.insert(dist2(points[i], points[j]));
        }
    }
    out
}

/// Smallest `k <= max_rounds` with `x` in `expand_once^k(E)`.
pub fn derivable(e: &Configuration, x: &GeomObject, budget: Budget) -> Result<Derivation, ClosureError> {
    if e.contains(x) {
        return Ok(Derivation::Yes(0));
    }
    let mut trace = ClosureTrace::start(e);
    for k in 1..=budget.max_rounds {
        let gen = &trace.objects;
        if one_step(gen, x) {
            return Ok(Derivation::Yes(k));
        }
        if k == budget.max_rounds {
            break;
        }
        let before = gen.len();
        next_generation(&mut trace, budget.max_objects)?;
        if trace.objects.len() == before {
            return Ok(Derivation::NoWithinBudget {
                fixed_point_at: Some(k - 1),
            });
        }
    }
    // the last generation may itself be a fixed point
    let before = trace.objects.len();
    if next_generation(&mut trace, budget.max_objects).is_ok() && trace.objects.len() == before {
        return Ok(Derivation::NoWithinBudget {
            fixed_point_at: Some(budget.max_rounds - 1),
        });
    }
    Ok(Derivation::NoWithinBudget { fixed_point_at: None })
}

/// Closure restricted to the objects in `hints`: each round adds only hinted
/// objects reachable in one step. A `Yes(k)` is therefore a genuine
/// derivation in at most `k` rounds; a negative answer says nothing beyond
/// the hints.
pub fn derivable_guided(
    e: &Configuration,
    x: &GeomObject,
    hints: &[GeomObject],
    max_rounds: usize,
) -> Derivation {
    if e.contains(x) {
        return Derivation::Yes(0);
    }
    let mut gen = e.clone();
    for k in 1..=max_rounds {
        if one_step(&gen, x) {
            return Derivation::Yes(k);
        }
        let fresh: Vec<GeomObject> = hints
            .iter()
            .filter(|h| !gen.contains(h) && one_step(&gen, h))
            .cloned()
            .collect();
        if fresh.is_empty() {
            break;
        }
        for h in fresh {
            gen.insert(h);
        }
    }
    Derivation::NoWithinBudget { fixed_point_at: None }
}
