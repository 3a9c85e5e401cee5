//! Straightedge densification from a triangle ABC and a point D inside it.
//!
//! Send B and C to infinity by a projective map. Lines through B become
//! vertical, lines through C horizontal, and with X = AB.DC, Y = AC.DB the
//! quadrilateral AXDY becomes the unit square (A at the origin, D at (1, 1)).
//! The diagonals of a grid cell meet at its center, and joining the center
//! to B or C adds the middle grid line. Halving cells, and extending the grid
//! outward through half-height points, gives a derivable grid that is dense
//! in the plane minus the line BC. Only lines and line meets are used.
//!
//! Image coordinates are bookkeeping: grid line `x = t` is the line through
//! B labelled `t`. Every object is built by a recorded straightedge step.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{AliceStrategy, Move, MoveRecord, Request};
use crate::closure::{Configuration, Step};
use crate::field::{Rational, Real, Sign};
use crate::geom::{self, GeomError, GeomObject, Point};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DensifyError {
    #[error("A, B, C must form a triangle with D strictly inside")]
    Degenerate,
    #[error("eps must be positive")]
    BadEps,
    #[error("target lies on line BC, which the grid never reaches")]
    OnVanishingLine,
    #[error("iteration cap {0} reached before eps")]
    IterationCap(usize),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

impl DensifyError {
    pub fn is_resource(&self) -> bool {
        match self {
            DensifyError::IterationCap(_) => true,
            DensifyError::Geometry(e) => e.is_resource(),
            _ => false,
        }
    }
}

/// Objects with the step that produced each; parents come first.
#[derive(Clone, Debug, Default)]
pub struct Construction {
    objects: Vec<GeomObject>,
    steps: Vec<Step>,
    index: HashMap<GeomObject, usize>,
}

impl Construction {
    fn given(&mut self, o: GeomObject) -> usize {
        self.push(o, Step::Given)
    }

    fn push(&mut self, o: GeomObject, step: Step) -> usize {
        if let Some(&i) = self.index.get(&o) {
            return i;
        }
        self.objects.push(o.clone());
        self.steps.push(step);
        self.index.insert(o, self.objects.len() - 1);
        self.objects.len() - 1
    }

    fn point(&self, i: usize) -> &Point {
        self.objects[i].as_point().expect("point index")
    }

    fn line(&mut self, p: usize, q: usize) -> Result<usize, GeomError> {
        let l = geom::line_through(self.point(p), self.point(q))?;
        Ok(self.push(l.into(), Step::Line { through: [p, q] }))
    }

    fn meet(&mut self, g: usize, h: usize) -> Result<usize, GeomError> {
        let pts = geom::intersect(&self.objects[g], &self.objects[h])?;
        match pts.as_slice() {
            [p] => Ok(self.push(p.clone().into(), Step::Meet { curves: [g, h] })),
            _ => Err(GeomError::Degenerate("grid lines do not meet in one point")),
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn object(&self, i: usize) -> &GeomObject {
        &self.objects[i]
    }

    pub fn step(&self, i: usize) -> &Step {
        &self.steps[i]
    }

    pub fn index_of(&self, o: &GeomObject) -> Option<usize> {
        self.index.get(o).copied()
    }

    /// Whether no object was made with the compass.
    pub fn straightedge_only(&self) -> bool {
        !self.steps.iter().any(|s| matches!(s, Step::Circle { .. }))
    }

    /// Indices of `i` and everything it depends on, parents first.
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        let mut keep = vec![false; i + 1];
        keep[i] = true;
        for j in (0..=i).rev() {
            if keep[j] {
                for p in self.steps[j].parents() {
                    keep[p] = true;
                }
            }
        }
        (0..=i).filter(|&j| keep[j]).collect()
    }

    /// Recomputes every object from its parents and compares.
    pub fn replay_ok(&self) -> bool {
        self.steps.iter().enumerate().all(|(i, s)| {
            let again: Option<GeomObject> = match *s {
                Step::Given => Some(self.objects[i].clone()),
                Step::Line { through: [p, q] } => geom::line_through(self.point(p), self.point(q)).ok().map(Into::into),
                Step::Meet { curves: [g, h] } => geom::intersect(&self.objects[g], &self.objects[h])
                    .ok()
                    .and_then(|v| (v.len() == 1).then(|| v[0].clone().into())),
                Step::Circle { .. } => None,
            };
            s.parents().iter().all(|&p| p < i) && again.as_ref() == Some(&self.objects[i])
        })
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The projective grid over the quadrilateral AXDY.
#[derive(Clone, Debug)]
pub struct Scaffold {
    pub construction: Construction,
    corners: [usize; 4],
    /// lines through B, by image x
    blines: BTreeMap<Rational, usize>,
    /// lines through C, by image y
    clines: BTreeMap<Rational, usize>,
    grid: HashMap<(Rational, Rational), usize>,
}

impl Scaffold {
    pub fn new(a: &Point, b: &Point, c: &Point, d: &Point) -> Result<Scaffold, DensifyError> {
        let o = geom::orientation(a, b, c);
        if o == Sign::Zero
            || geom::orientation(a, b, d) != o
            || geom::orientation(b, c, d) != o
            || geom::orientation(c, a, d) != o
        {
            return Err(DensifyError::Degenerate);
        }
        let mut k = Construction::default();
        let corners = [a, b, c, d].map(|p| k.given(p.clone().into()));
        let [ia, ib, ic, id] = corners;
        let mut s = Scaffold {
            blines: BTreeMap::from([(q(0, 1), k.line(ia, ib)?), (q(1, 1), k.line(id, ib)?)]),
            clines: BTreeMap::from([(q(0, 1), k.line(ia, ic)?), (q(1, 1), k.line(id, ic)?)]),
            construction: k,
            corners,
            grid: HashMap::new(),
        };
        // the center of AXDY gives the middle lines of both families
        s.bisect_x(&q(0, 1), &q(1, 1))?;
        s.bisect_y(&q(0, 1), &q(1, 1))?;
        Ok(s)
    }

    pub fn given(&self) -> [usize; 4] {
        self.corners
    }

    /// Grid point at image coordinates `(t, s)`.
    pub fn point(&mut self, t: &Rational, s: &Rational) -> Result<usize, GeomError> {
        if let Some(&i) = self.grid.get(&(t.clone(), s.clone())) {
            return Ok(i);
        }
        let i = self.construction.meet(self.blines[t], self.clines[s])?;
        self.grid.insert((t.clone(), s.clone()), i);
        Ok(i)
    }

    /// Grid point with `along` on this axis and `across` on the other.
    fn at(&mut self, x_axis: bool, along: &Rational, across: &Rational) -> Result<usize, GeomError> {
        if x_axis {
            self.point(along, across)
        } else {
            self.point(across, along)
        }
    }

    fn family(&self, x_axis: bool) -> &BTreeMap<Rational, usize> {
        if x_axis {
            &self.blines
        } else {
            &self.clines
        }
    }

    /// Pairs of cross lines to work in, nearest the unit square first. Some
    /// grid points lie on the line at infinity; a step that meets one is
    /// retried with the next pair.
    fn cross_pairs(&self, x_axis: bool) -> Vec<(Rational, Rational)> {
        let mut rows: Vec<Rational> = self.family(!x_axis).keys().cloned().collect();
        let half = q(1, 2);
        rows.sort_by(|a, b| (a - &half).abs().cmp(&(b - &half).abs()).then(a.cmp(b)));
        let mut out = vec![];
        for i in 0..rows.len() {
            for j in 0..i {
                out.push((rows[j].clone(), rows[i].clone()));
            }
        }
        out
    }

    fn attempt<T>(
        &mut self,
        x_axis: bool,
        mut f: impl FnMut(&mut Scaffold, &Rational, &Rational) -> Result<Option<T>, GeomError>,
    ) -> Result<T, GeomError> {
        for (r0, r1) in self.cross_pairs(x_axis) {
            match f(self, &r0, &r1) {
                Ok(Some(v)) => return Ok(v),
                Ok(None) => {}
                Err(e) if e.is_resource() => return Err(e),
                Err(_) => {}
            }
        }
        Err(GeomError::Degenerate("no finite grid cell for the step"))
    }

    /// The diagonals of the cell `[lo, hi] x [r0, r1]` meet on the middle
    /// line, which then joins the apex of this family.
    fn bisect(&mut self, x_axis: bool, lo: &Rational, hi: &Rational) -> Result<(), GeomError> {
        let apex = self.corners[if x_axis { 1 } else { 2 }];
        let l = self.attempt(x_axis, |me, r0, r1| {
            let p00 = me.at(x_axis, lo, r0)?;
            let p11 = me.at(x_axis, hi, r1)?;
            let p10 = me.at(x_axis, hi, r0)?;
            let p01 = me.at(x_axis, lo, r1)?;
            let d1 = me.construction.line(p00, p11)?;
            let d2 = me.construction.line(p10, p01)?;
            let c = me.construction.meet(d1, d2)?;
            me.construction.line(c, apex).map(Some)
        })?;
        let mid = (lo + hi) / q(2, 1);
        if x_axis {
            self.blines.insert(mid, l);
        } else {
            self.clines.insert(mid, l);
        }
        Ok(())
    }

    fn bisect_x(&mut self, lo: &Rational, hi: &Rational) -> Result<(), GeomError> {
        self.bisect(true, lo, hi)
    }

    fn bisect_y(&mut self, lo: &Rational, hi: &Rational) -> Result<(), GeomError> {
        self.bisect(false, lo, hi)
    }

    /// New line beyond the current range. The line from `(near, r1)` to
    /// `(far, (r0 + r1) / 2)` crosses `r0` at `2 * far - near`.
    fn extend(&mut self, x_axis: bool, up: bool) -> Result<(), GeomError> {
        let (lo, hi) = bounds(self.family(x_axis));
        let (near, far) = if up { (lo, hi) } else { (hi, lo) };
        let apex = self.corners[if x_axis { 1 } else { 2 }];
        let l = self.attempt(x_axis, |me, a, b| {
            let mid = (a + b) / q(2, 1);
            if !me.family(!x_axis).contains_key(&mid) {
                return Ok(None);
            }
            for (r0, r1) in [(a, b), (b, a)] {
                let found = (|| {
                    let p = me.at(x_axis, &near, r1)?;
                    let m = me.at(x_axis, &far, &mid)?;
                    let l = me.construction.line(p, m)?;
                    let foot = me.construction.meet(l, me.family(!x_axis)[r0])?;
                    me.construction.line(foot, apex)
                })();
                match found {
                    Ok(l) => return Ok(Some(l)),
                    Err(e) if e.is_resource() => return Err(e),
                    Err(_) => {}
                }
            }
            Ok(None)
        })?;
        let new = q(2, 1) * &far - &near;
        if x_axis {
            self.blines.insert(new, l);
        } else {
            self.clines.insert(new, l);
        }
        Ok(())
    }

    /// Halves every grid cell of the unit square.
    pub fn refine(&mut self) -> Result<(), GeomError> {
        for (lo, hi) in gaps(&self.blines) {
            self.bisect_x(&lo, &hi)?;
        }
        for (lo, hi) in gaps(&self.clines) {
            self.bisect_y(&lo, &hi)?;
        }
        Ok(())
    }

    /// Largest squared distance between neighbouring grid points of the
    /// unit square. Spacing along a line is monotone under a projective map,
    /// so the largest gap on each grid line sits in one of its end cells.
    pub fn max_gap2(&mut self) -> Result<Real, GeomError> {
        let xs: Vec<Rational> = unit_keys(&self.blines);
        let ys: Vec<Rational> = unit_keys(&self.clines);
        let mut best: Option<Real> = None;
        let mut consider = |me: &mut Scaffold, a: (&Rational, &Rational), b: (&Rational, &Rational)| {
            let pa = me.point(a.0, a.1)?;
            let pb = me.point(b.0, b.1)?;
            let d = geom::dist2(me.construction.point(pa), me.construction.point(pb));
            if best.as_ref().is_none_or(|m| d.cmp_exact(m).is_gt()) {
                best = Some(d);
            }
            Ok::<(), GeomError>(())
        };
        let (nx, ny) = (xs.len(), ys.len());
        for t in &xs {
            consider(self, (t, &ys[0]), (t, &ys[1]))?;
            consider(self, (t, &ys[ny - 2]), (t, &ys[ny - 1]))?;
        }
        for s in &ys {
            consider(self, (&xs[0], s), (&xs[1], s))?;
            consider(self, (&xs[nx - 2], s), (&xs[nx - 1], s))?;
        }
        Ok(best.expect("grid has lines"))
    }

    /// Image coordinates of `p`, or `None` on line BC.
    pub fn image_of(&self, p: &Point) -> Result<Option<(Real, Real)>, GeomError> {
        let k = &self.construction;
        let [a, b, c, _] = self.corners.map(|i| k.point(i).clone());
        let x = &k.objects[self.blines[&q(1, 1)]];
        let y = &k.objects[self.clines[&q(1, 1)]];
        let ac: GeomObject = geom::line_through(&a, &c)?.into();
        let ab: GeomObject = geom::line_through(&a, &b)?.into();
        let yy = single(geom::intersect(x, &ac)?)?;
        let xx = single(geom::intersect(y, &ab)?)?;
        let coord = |apex: &Point, base: &GeomObject, end: &Point, unit: &Point| -> Result<Option<Real>, GeomError> {
            if p == apex {
                return Ok(None);
            }
            let foot = single(geom::intersect(&geom::line_through(p, apex)?.into(), base)?)?;
            let (lf, lu) = (param(&a, end, &foot), param(&a, end, unit));
            let one = a.session().one();
            if (&one - &lf).is_zero() {
                return Ok(None);
            }
            let ratio = |l: &Real| l.checked_div(&(&one - l));
            Ok(Some(ratio(&lf)?.checked_div(&ratio(&lu)?)?))
        };
        Ok(match (coord(&b, &ac, &c, &yy)?, coord(&c, &ab, &b, &xx)?) {
            (Some(t), Some(s)) => Some((t, s)),
            _ => None,
        })
    }
}

fn single(v: Vec<Point>) -> Result<Point, GeomError> {
    match <[Point; 1]>::try_from(v) {
        Ok([p]) => Ok(p),
        Err(_) => Err(GeomError::Degenerate("lines do not meet in one point")),
    }
}

/// Position of `p` on line `a e` as a multiple of `e - a`.
fn param(a: &Point, e: &Point, p: &Point) -> Real {
    let (dx, dy) = (&e.x - &a.x, &e.y - &a.y);
    let num = (&p.x - &a.x) * &dx + (&p.y - &a.y) * &dy;
    num.checked_div(&(&dx * &dx + &dy * &dy)).expect("distinct points")
}

fn bounds(m: &BTreeMap<Rational, usize>) -> (Rational, Rational) {
    let lo = m.keys().next().expect("nonempty").clone();
    let hi = m.keys().next_back().expect("nonempty").clone();
    (lo, hi)
}

fn unit_keys(m: &BTreeMap<Rational, usize>) -> Vec<Rational> {
    m.range(q(0, 1)..=q(1, 1)).map(|(k, _)| k.clone()).collect()
}

fn gaps(m: &BTreeMap<Rational, usize>) -> Vec<(Rational, Rational)> {
    let keys = unit_keys(m);
    keys.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

/// The grid interval containing `v`: equal ends when `v` is a grid value,
/// `None` when `v` is outside the current range.
fn bracket(m: &BTreeMap<Rational, usize>, v: &Real) -> Option<(Rational, Rational)> {
    let s = v.session();
    let below = m.keys().rev().find(|k| !(s.rational((*k).clone()) - v).is_positive())?;
    let above = m.keys().find(|k| !(s.rational((*k).clone()) - v).is_negative())?;
    Some((below.clone(), above.clone()))
}

#[derive(Clone, Debug)]
pub struct Densified {
    pub point: Point,
    /// Index of the point in `scaffold.construction`.
    pub index: usize,
    pub iterations: usize,
    /// Squared diameter of the grid cell holding the target, for each
    /// iteration where that cell is bounded.
    pub cell_gaps: Vec<Real>,
    pub scaffold: Scaffold,
}

/// A straightedge-derivable point within `eps` of `target`.
pub fn densify(
    a: &Point,
    b: &Point,
    c: &Point,
    d: &Point,
    target: &Point,
    eps: &Rational,
    max_iterations: usize,
) -> Result<Densified, DensifyError> {
    if *eps <= Rational::zero() {
        return Err(DensifyError::BadEps);
    }
    let mut scaffold = Scaffold::new(a, b, c, d)?;
    if let Some(i) = scaffold.construction.index_of(&target.clone().into()) {
        if matches!(scaffold.construction.step(i), Step::Given) {
            return Ok(Densified {
                point: target.clone(),
                index: i,
                iterations: 0,
                cell_gaps: vec![],
                scaffold,
            });
        }
    }
    let (tx, ty) = scaffold.image_of(target)?.ok_or(DensifyError::OnVanishingLine)?;
    let eps2 = target.session().rational(eps * eps);
    let mut cell_gaps = vec![];
    for it in 1..=max_iterations {
        let bx = step_axis(&mut scaffold, &tx, true)?;
        let by = step_axis(&mut scaffold, &ty, false)?;
        let (Some(bx), Some(by)) = (bx, by) else {
            continue;
        };
        // corners in cyclic order, so a bounded cell is their convex hull
        let mut corners = vec![];
        for (t, s) in [(&bx.0, &by.0), (&bx.1, &by.0), (&bx.1, &by.1), (&bx.0, &by.1)] {
            match scaffold.point(t, s) {
                Ok(i) => corners.push(i),
                Err(e) if e.is_resource() => return Err(e.into()),
                // a corner at infinity: the cell is still too large
                Err(_) => {}
            }
        }
        if corners.len() < 4 {
            continue;
        }
        let pts: Vec<Point> = corners.iter().map(|&i| scaffold.construction.point(i).clone()).collect();
        if encloses(&pts, target) {
            let mut diam = target.session().zero();
            for p in &pts {
                for r in &pts {
                    let d2 = geom::dist2(p, r);
                    if d2.cmp_exact(&diam).is_gt() {
                        diam = d2;
                    }
                }
            }
            cell_gaps.push(diam);
        }
        let best = corners
            .iter()
            .map(|&i| (i, geom::dist2(scaffold.construction.point(i), target)))
            .min_by(|x, y| x.1.cmp_exact(&y.1))
            .expect("corners");
        if !best.1.cmp_exact(&eps2).is_gt() {
            return Ok(Densified {
                point: scaffold.construction.point(best.0).clone(),
                index: best.0,
                iterations: it,
                cell_gaps,
                scaffold,
            });
        }
    }
    Err(DensifyError::IterationCap(max_iterations))
}

/// Whether `t` lies in the quadrilateral `q`, taken in cyclic order. A cell
/// crossed by the vanishing line fails this even though its corners are finite.
fn encloses(q: &[Point], t: &Point) -> bool {
    let mut seen = None;
    for i in 0..q.len() {
        let o = geom::orientation(&q[i], &q[(i + 1) % q.len()], t);
        if o == Sign::Zero {
            continue;
        }
        if *seen.get_or_insert(o) != o {
            return false;
        }
    }
    true
}

/// Extends toward or bisects around `v` on one axis; returns the bracket of
/// `v` after the step, if `v` is within range.
fn step_axis(s: &mut Scaffold, v: &Real, x_axis: bool) -> Result<Option<(Rational, Rational)>, GeomError> {
    let lines = if x_axis { &s.blines } else { &s.clines };
    match bracket(lines, v) {
        None => {
            let (lo, _) = bounds(lines);
            let up = (v.session().rational(lo) - v).is_negative();
            if x_axis {
                s.extend(true, up)?;
            } else {
                s.extend(false, up)?;
            }
        }
        Some((lo, hi)) if lo != hi => {
            if x_axis {
                s.bisect_x(&lo, &hi)?;
            } else {
                s.bisect_y(&lo, &hi)?;
            }
        }
        Some(_) => {}
    }
    let lines = if x_axis { &s.blines } else { &s.clines };
    Ok(bracket(lines, v))
}

/// Plays a strategy in the restricted game: every disk request is replaced
/// by cell requests for a triangle and an inner point, followed by the
/// straightedge steps that build a grid point inside the disk.
pub struct RestrictedAlice<S> {
    inner: S,
    inner_history: Vec<MoveRecord>,
    forwarded: bool,
    scaffold: Option<[Point; 4]>,
    scaffold_answers: Vec<Point>,
    awaiting_scaffold: bool,
    queue: Vec<Request>,
    pending: Option<(Request, Point)>,
    /// Densification iterations allowed per disk request.
    pub max_iterations: usize,
}

impl<S: AliceStrategy> RestrictedAlice<S> {
    pub fn new(inner: S) -> RestrictedAlice<S> {
        RestrictedAlice {
            inner,
            inner_history: vec![],
            forwarded: false,
            scaffold: None,
            scaffold_answers: vec![],
            awaiting_scaffold: false,
            queue: vec![],
            pending: None,
            max_iterations: 200,
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    /// Requests for the scaffold points, or `None` once all four exist.
    fn scaffold_request(&mut self, position: &Configuration) -> Option<Request> {
        let got = self.scaffold_answers.clone();
        let line = |p: &Point, r: &Point| GeomObject::from(geom::line_through(p, r).expect("distinct"));
        match got.as_slice() {
            [] | [_] => Some(Request::PointInCell { conditions: vec![] }),
            [a, b] => {
                let ab = line(a, b);
                if !position.contains(&ab) {
                    return Some(Request::Line { p: a.clone(), q: b.clone() });
                }
                Some(Request::PointInCell {
                    conditions: vec![(ab, Sign::Positive)],
                })
            }
            [a, b, c, rest @ ..] => {
                for (p, r) in [(b, c), (c, a)] {
                    if !position.contains(&line(p, r)) {
                        return Some(Request::Line { p: p.clone(), q: r.clone() });
                    }
                }
                if let [d, ..] = rest {
                    self.scaffold = Some([a.clone(), b.clone(), c.clone(), d.clone()]);
                    return None;
                }
                // the centroid fixes which side of each side line is inside
                let third = q(1, 3);
                let g = Point::new(
                    (&a.x + &b.x + &c.x).scale(&third),
                    (&a.y + &b.y + &c.y).scale(&third),
                );
                let conditions = [(a, b), (b, c), (c, a)]
                    .iter()
                    .map(|(p, r)| {
                        let l = line(p, r);
                        let side = geom::side(&g, &l).expect("line");
                        (l, side)
                    })
                    .collect();
                Some(Request::PointInCell { conditions })
            }
        }
    }
}

impl<S: AliceStrategy> AliceStrategy for RestrictedAlice<S> {
    fn next_move(&mut self, position: &Configuration, history: &[MoveRecord]) -> Move {
        if self.forwarded {
            self.forwarded = false;
            if let Some(last) = history.last() {
                self.inner_history.push(last.clone());
            }
        }
        if self.awaiting_scaffold {
            self.awaiting_scaffold = false;
            if let Some(p) = history.last().and_then(|m| m.answer.clone()) {
                self.scaffold_answers.push(p);
            }
        }
        loop {
            if let Some((disk, target)) = self.pending.clone() {
                if self.scaffold.is_none() {
                    if let Some(r) = self.scaffold_request(position) {
                        self.awaiting_scaffold = r.is_point_request();
                        return Move::Request(r);
                    }
                }
                if self.queue.is_empty() && !position.contains(&target.clone().into()) {
                    let Request::PointInDisk { center, radius } = &disk else {
                        unreachable!("only disk requests are translated")
                    };
                    let [a, b, c, d] = self.scaffold.clone().expect("scaffold built");
                    let eps = radius / q(2, 1);
                    match densify(&a, &b, &c, &d, center, &eps, self.max_iterations) {
                        Err(e) if e.is_resource() => {
                            return Move::Resign(format!("translation budget exceeded: {e}"))
                        }
                        Err(e) => return Move::Resign(format!("translation failed: {e}")),
                        Ok(found) => {
                            let k = &found.scaffold.construction;
                            self.queue = k
                                .ancestors(found.index)
                                .into_iter()
                                .filter_map(|i| match *k.step(i) {
                                    Step::Line { through: [p, r] } => Some(Request::Line {
                                        p: k.point(p).clone(),
                                        q: k.point(r).clone(),
                                    }),
                                    Step::Meet { curves: [g, h] } => Some(Request::Intersect {
                                        g: k.object(g).clone(),
                                        h: k.object(h).clone(),
                                    }),
                                    _ => None,
                                })
                                .rev()
                                .collect();
                            self.pending = Some((disk.clone(), found.point.clone()));
                            continue;
                        }
                    }
                }
                let target = self.pending.as_ref().expect("pending").1.clone();
                while let Some(r) = self.queue.pop() {
                    let made = match &r {
                        Request::Line { p, q } => geom::line_through(p, q).ok().map(GeomObject::from),
                        _ => None,
                    };
                    if made.is_some_and(|m| position.contains(&m)) {
                        continue;
                    }
                    if position.contains(&target.clone().into()) {
                        break;
                    }
                    return Move::Request(r);
                }
                // the disk request is answered by the grid point
                self.queue.clear();
                self.inner_history.push(MoveRecord {
                    index: self.inner_history.len() + 1,
                    request: disk,
                    answer: Some(target.clone()),
                    added: vec![target.into()],
                });
                self.pending = None;
            }
            match self.inner.next_move(position, &self.inner_history) {
                Move::Request(r @ Request::PointInDisk { .. }) => {
                    // placeholder target until the grid point is known
                    let placeholder = match &r {
                        Request::PointInDisk { center, .. } => center.clone(),
                        _ => unreachable!(),
                    };
                    self.pending = Some((r, placeholder));
                    self.queue.clear();
                }
                Move::Request(r) => {
                    self.forwarded = true;
                    return Move::Request(r);
                }
                other => return other,
            }
        }
    }
}
