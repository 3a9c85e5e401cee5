//! Exact points, lines and circles, the three construction steps, and the
//! ordering/incidence predicates used by construction tests.

mod projective;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, Rational, Real, Session, Sign};

pub use projective::ProjectiveMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("identical curves have infinitely many common points")]
    IdenticalCurves,
    #[error("expected a line or a circle, got a {0}")]
    NotACurve(&'static str),
    #[error("points are not collinear")]
    NotCollinear,
    #[error("point is not an intersection of the two curves")]
    NotAnIntersection,
    #[error("curves do not meet in exactly two points")]
    NotTwoPoints,
    #[error("image lies on the line at infinity")]
    AtInfinity,
    #[error("projective map is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl GeomError {
    pub fn is_resource(&self) -> bool {
        matches!(self, GeomError::Field(e) if e.is_resource())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Point {
    pub x: Real,
    pub y: Real,
}

impl Point {
    /// Panics when the coordinates come from different sessions.
    pub fn new(x: Real, y: Real) -> Point {
        assert!(x.session().same(y.session()), "point coordinates from different sessions");
        Point { x, y }
    }

    pub fn from_ratios(session: &Session, x: (i64, i64), y: (i64, i64)) -> Point {
        Point::new(session.ratio(x.0, x.1), session.ratio(y.0, y.1))
    }

    pub fn from_ints(session: &Session, x: i64, y: i64) -> Point {
        Point::new(session.integer(x), session.integer(y))
    }

    pub fn from_rationals(session: &Session, x: Rational, y: Rational) -> Point {
        Point::new(session.rational(x), session.rational(y))
    }

    pub fn session(&self) -> &Session {
        self.x.session()
    }

    /// Lexicographic exact order on (x, y).
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .cmp_exact(&other.x)
            .then_with(|| self.y.cmp_exact(&other.y))
    }

    pub fn radical_depth(&self) -> usize {
        self.x.radical_depth().max(self.y.radical_depth())
    }

    pub fn level(&self) -> usize {
        self.x.level().max(self.y.level())
    }

    pub fn is_rational(&self) -> bool {
        self.x.as_rational().is_some() && self.y.as_rational().is_some()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point{self}")
    }
}

/// Locus `a*x + b*y + c = 0`, scaled so the first nonzero of `(a, b)` is 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Line {
    a: Real,
    b: Real,
    c: Real,
}

impl Line {
    pub fn new(a: Real, b: Real, c: Real) -> Result<Line, GeomError> {
        let lead = if !a.is_zero() {
            a.clone()
        } else if !b.is_zero() {
            b.clone()
        } else {
            return Err(GeomError::Degenerate("line with a = b = 0"));
        };
        let inv = lead.inv()?;
        Ok(Line {
            a: a.checked_mul(&inv)?,
            b: b.checked_mul(&inv)?,
            c: c.checked_mul(&inv)?,
        })
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn b(&self) -> &Real {
        &self.b
    }

    pub fn c(&self) -> &Real {
        &self.c
    }

    /// Signed value of the line equation at `p`.
    pub fn eval(&self, p: &Point) -> Real {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn session(&self) -> &Session {
        self.a.session()
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line ({}) ({}) ({})", self.a, self.b, self.c)
    }
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Line[{}x + {}y + {}]", self.a, self.b, self.c)
    }
}

/// Circle given by its center and squared radius.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Circle {
    center: Point,
    r2: Real,
}

impl Circle {
    pub fn new(center: Point, r2: Real) -> Result<Circle, GeomError> {
        if !r2.is_positive() {
            return Err(GeomError::Degenerate("circle radius must be positive"));
        }
        Ok(Circle { center, r2 })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn r2(&self) -> &Real {
        &self.r2
    }

    /// `|p - center|^2 - r^2`: negative inside, zero on, positive outside.
    pub fn power(&self, p: &Point) -> Real {
        dist2(p, &self.center) - &self.r2
    }
}

impl fmt::Display for Circle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circle center {} r2 {}", self.center, self.r2)
    }
}

impl fmt::Debug for Circle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Circle[{}, r2={}]", self.center, self.r2)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeomObject {
    Point(Point),
    Line(Line),
    Circle(Circle),
}

impl GeomObject {
    pub fn kind(&self) -> &'static str {
        match self {
            GeomObject::Point(_) => "point",
            GeomObject::Line(_) => "line",
            GeomObject::Circle(_) => "circle",
        }
    }

    pub fn is_curve(&self) -> bool {
        !matches!(self, GeomObject::Point(_))
    }

    pub fn as_point(&self) -> Option<&Point> {
        match self {
            GeomObject::Point(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_line(&self) -> Option<&Line> {
        match self {
            GeomObject::Line(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_circle(&self) -> Option<&Circle> {
        match self {
            GeomObject::Circle(c) => Some(c),
            _ => None,
        }
    }

    pub fn session(&self) -> &Session {
        match self {
            GeomObject::Point(p) => p.session(),
            GeomObject::Line(l) => l.session(),
            GeomObject::Circle(c) => c.center.session(),
        }
    }

    /// Every exact coordinate the object carries.
    pub fn reals(&self) -> Vec<&Real> {
        match self {
            GeomObject::Point(p) => vec![&p.x, &p.y],
            GeomObject::Line(l) => vec![&l.a, &l.b, &l.c],
            GeomObject::Circle(c) => vec![&c.center.x, &c.center.y, &c.r2],
        }
    }
}

impl fmt::Display for GeomObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomObject::Point(p) => write!(f, "point {p}"),
            GeomObject::Line(l) => l.fmt(f),
            GeomObject::Circle(c) => c.fmt(f),
        }
    }
}

impl From<Point> for GeomObject {
    fn from(p: Point) -> Self {
        GeomObject::Point(p)
    }
}

impl From<Line> for GeomObject {
    fn from(l: Line) -> Self {
        GeomObject::Line(l)
    }
}

impl From<Circle> for GeomObject {
    fn from(c: Circle) -> Self {
        GeomObject::Circle(c)
    }
}

pub fn dist2(p: &Point, q: &Point) -> Real {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    &dx * &dx + &dy * &dy
}

/// Straightedge step: the line through two distinct points.
pub fn line_through(p: &Point, q: &Point) -> Result<Line, GeomError> {
    if p == q {
        return Err(GeomError::Degenerate("line through coincident points"));
    }
    Line::new(
        &p.y - &q.y,
        &q.x - &p.x,
        &p.x * &q.y - &q.x * &p.y,
    )
}

/// Compass step: circle with center `o` and radius `|ab|`.
pub fn circle_centered(o: &Point, a: &Point, b: &Point) -> Result<Circle, GeomError> {
    if a == b {
        return Err(GeomError::Degenerate("compass opened to zero radius"));
    }
    Circle::new(o.clone(), dist2(a, b))
}

fn sort_points(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|p, q| p.lex_cmp(q));
    pts.dedup();
    pts
}

fn intersect_lines(l: &Line, m: &Line) -> Result<Vec<Point>, GeomError> {
    if l == m {
        return Err(GeomError::IdenticalCurves);
    }
    let det = &l.a * &m.b - &m.a * &l.b;
    if det.is_zero() {
        return Ok(vec![]);
    }
    let x = (&l.b * &m.c - &m.b * &l.c).checked_div(&det)?;
    let y = (&l.c * &m.a - &m.c * &l.a).checked_div(&det)?;
    Ok(vec![Point::new(x, y)])
}

fn intersect_line_circle(l: &Line, c: &Circle) -> Result<Vec<Point>, GeomError> {
    let n2 = &l.a * &l.a + &l.b * &l.b;
    let s = l.eval(&c.center);
    let disc = &c.r2 * &n2 - &s * &s;
    let ratio = s.checked_div(&n2)?;
    let foot = Point::new(&c.center.x - &(&ratio * &l.a), &c.center.y - &(&ratio * &l.b));
    match disc.sign() {
        Sign::Negative => Ok(vec![]),
        Sign::Zero => Ok(vec![foot]),
        Sign::Positive => {
            let t = disc.sqrt()?.checked_div(&n2)?;
            let dx = -&(&t * &l.b);
            let dy = &t * &l.a;
            let p = Point::new(&foot.x + &dx, &foot.y + &dy);
            let q = Point::new(&foot.x - &dx, &foot.y - &dy);
            Ok(sort_points(vec![p, q]))
        }
    }
}

/// The radical line of two non-concentric circles.
fn radical_line(c1: &Circle, c2: &Circle) -> Result<Line, GeomError> {
    let (p, q) = (&c1.center, &c2.center);
    let two = p.session().integer(2);
    let norm_p = &p.x * &p.x + &p.y * &p.y;
    let norm_q = &q.x * &q.x + &q.y * &q.y;
    Line::new(
        &two * &(&q.x - &p.x),
        &two * &(&q.y - &p.y),
        norm_p - norm_q - &c1.r2 + &c2.r2,
    )
}

fn intersect_circles(c1: &Circle, c2: &Circle) -> Result<Vec<Point>, GeomError> {
    if c1 == c2 {
        return Err(GeomError::IdenticalCurves);
    }
    if c1.center == c2.center {
        return Ok(vec![]);
    }
    intersect_line_circle(&radical_line(c1, c2)?, c1)
}

/// All common points of two distinct curves, sorted lexicographically.
pub fn intersect(g: &GeomObject, h: &GeomObject) -> Result<Vec<Point>, GeomError> {
    use GeomObject::*;
    match (g, h) {
        (Point(_), _) | (_, Point(_)) => Err(GeomError::NotACurve("point")),
        (Line(l), Line(m)) => intersect_lines(l, m),
        (Line(l), Circle(c)) | (Circle(c), Line(l)) => intersect_line_circle(l, c),
        (Circle(c1), Circle(c2)) => intersect_circles(c1, c2),
    }
}

/// Incidence test; for a point argument it is equality.
pub fn on(p: &Point, g: &GeomObject) -> bool {
    match g {
        GeomObject::Point(q) => p == q,
        GeomObject::Line(l) => l.eval(p).is_zero(),
        GeomObject::Circle(c) => c.power(p).is_zero(),
    }
}

/// Whether two curves share a point. Identical curves count as intersecting.
/// Never extends the tower.
pub fn intersects(g: &GeomObject, h: &GeomObject) -> Result<bool, GeomError> {
    use GeomObject::*;
    if g == h {
        return Ok(g.is_curve());
    }
    match (g, h) {
        (Point(_), _) | (_, Point(_)) => Err(GeomError::NotACurve("point")),
        (Line(l), Line(m)) => Ok(!(&l.a * &m.b - &m.a * &l.b).is_zero()),
        (Line(l), Circle(c)) | (Circle(c), Line(l)) => Ok(line_meets_circle(l, c)),
        (Circle(c1), Circle(c2)) => {
            if c1.center == c2.center {
                return Ok(false);
            }
            Ok(line_meets_circle(&radical_line(c1, c2)?, c1))
        }
    }
}

fn line_meets_circle(l: &Line, c: &Circle) -> bool {
    let n2 = &l.a * &l.a + &l.b * &l.b;
    let s = l.eval(&c.center);
    (&c.r2 * &n2 - &s * &s).sign() != Sign::Negative
}

pub fn equal_objects(a: &GeomObject, b: &GeomObject) -> bool {
    a == b
}

/// Sign of the cross product `(b - a) x (c - a)`; +1 is counterclockwise.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Sign {
    let cross = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    cross.sign()
}

/// Whether `b` lies strictly inside segment `ac`; the points must be collinear.
pub fn between(a: &Point, b: &Point, c: &Point) -> Result<bool, GeomError> {
    if orientation(a, b, c) != Sign::Zero {
        return Err(GeomError::NotCollinear);
    }
    let dot = (&b.x - &a.x) * (&c.x - &b.x) + (&b.y - &a.y) * (&c.y - &b.y);
    Ok(dot.is_positive())
}

/// `sign(|ab|^2 - |cd|^2)`.
pub fn dist_compare(a: &Point, b: &Point, c: &Point, d: &Point) -> Sign {
    (dist2(a, b) - dist2(c, d)).sign()
}

/// Which side of a curve `p` is on: line equation sign, or circle power sign.
pub fn side(p: &Point, curve: &GeomObject) -> Option<Sign> {
    match curve {
        GeomObject::Point(_) => None,
        GeomObject::Line(l) => Some(l.eval(p).sign()),
        GeomObject::Circle(c) => Some(c.power(p).sign()),
    }
}

/// Side signs of `p` against every curve of `objects`, in their order.
pub fn sign_vector<'a>(p: &Point, objects: impl IntoIterator<Item = &'a GeomObject>) -> Vec<Sign> {
    objects.into_iter().filter_map(|o| side(p, o)).collect()
}

/// The intersection point of `g` and `h` other than `p`.
pub fn other_intersection(p: &Point, g: &GeomObject, h: &GeomObject) -> Result<Point, GeomError> {
    let pts = intersect(g, h)?;
    if !pts.contains(p) {
        return Err(GeomError::NotAnIntersection);
    }
    if pts.len() != 2 {
        return Err(GeomError::NotTwoPoints);
    }
    Ok(pts.into_iter().find(|q| q != p).expect("two distinct points"))
}

/// Squared distance from a point to a line.
pub fn dist2_to_line(p: &Point, l: &Line) -> Real {
    let v = l.eval(p);
    let n2 = &l.a * &l.a + &l.b * &l.b;
    (&v * &v).checked_div(&n2).expect("line normal is nonzero")
}

#[cfg(test)]
mod tests;
