//! Negative certificates: a set of objects containing the start, closed
//! under the allowed steps, dense in the plane, and missing the target. Bob
//! answering only with members keeps every position inside the set.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::BobPolicy;
use crate::closure::Configuration;
use crate::field::{Rational, Session};
use crate::geom::{self, GeomObject, Point};
use crate::sample::{Region, Sampler};

/// Membership test plus a dense enumerator.
pub trait Certificate: Sync {
    fn name(&self) -> &str;
    fn contains(&self, obj: &GeomObject) -> bool;
    /// A member point strictly inside the disk.
    fn point_in_disk(&self, session: &Session, center: &Point, radius: &Rational) -> Option<Point>;
}

fn dyadic_in_disk(session: &Session, center: &Point, radius: &Rational) -> Option<Point> {
    let region = Region::Disk {
        center: center.clone(),
        radius: radius.clone(),
    };
    Sampler::new(0).point_in(session, &region, &[])
}

/// Objects with rational data: rational points, lines with rational
/// coefficients, circles with rational center and squared radius.
#[derive(Clone, Copy, Debug, Default)]
pub struct RationalPlane;

impl Certificate for RationalPlane {
    fn name(&self) -> &str {
        "rational-plane"
    }

    fn contains(&self, obj: &GeomObject) -> bool {
        obj.reals().iter().all(|r| r.as_rational().is_some())
    }

    fn point_in_disk(&self, session: &Session, center: &Point, radius: &Rational) -> Option<Point> {
        dyadic_in_disk(session, center, radius)
    }
}

/// Every object. Closed under everything, excludes nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstructiblePlane;

impl Certificate for ConstructiblePlane {
    fn name(&self) -> &str {
        "constructible-plane"
    }

    fn contains(&self, _: &GeomObject) -> bool {
        true
    }

    fn point_in_disk(&self, session: &Session, center: &Point, radius: &Rational) -> Option<Point> {
        dyadic_in_disk(session, center, radius)
    }
}

/// Bob who only ever answers with certificate members.
pub struct CertificateBob<'a> {
    cert: &'a dyn Certificate,
}

pub fn certificate_bob(cert: &dyn Certificate) -> CertificateBob<'_> {
    CertificateBob { cert }
}

impl BobPolicy for CertificateBob<'_> {
    fn answer(&mut self, session: &Session, position: &Configuration, region: &Region) -> Result<Point, String> {
        let fail = || format!("certificate {} has no point in {}", self.cert.name(), region.describe());
        let good = |p: &Point| {
            region.contains(p) && self.cert.contains(&p.clone().into()) && !position.contains(&p.clone().into())
        };
        match region {
            Region::Disk { center, radius } => {
                let p = self.cert.point_in_disk(session, center, radius).ok_or_else(fail)?;
                if good(&p) {
                    Ok(p)
                } else {
                    Err(fail())
                }
            }
            Region::Cell { .. } => {
                // any point of the open cell, then shrinking disks around it
                let known: Vec<GeomObject> = position.iter().cloned().collect();
                if let Some(inside) = Sampler::new(0).point_in(session, region, &known) {
                    let mut radius = Rational::new(BigInt::from(1), BigInt::from(2));
                    for _ in 0..64 {
                        if let Some(p) = self.cert.point_in_disk(session, &inside, &radius) {
                            if good(&p) {
                                return Ok(p);
                            }
                        }
                        radius /= Rational::from_integer(BigInt::from(2));
                    }
                }
                // thin wedges escape the grid scan: try midpoints between
                // the bounding lines
                wedge_points(session, region).into_iter().find(good).ok_or_else(fail)
            }
        }
    }
}

fn wedge_points(session: &Session, region: &Region) -> Vec<Point> {
    let Region::Cell { conditions } = region else {
        return vec![];
    };
    let lines: Vec<&geom::Line> = conditions.iter().filter_map(|(c, _)| c.as_line()).collect();
    let on_line = |l: &geom::Line, k: i64| -> Option<Point> {
        let k = session.ratio(k, 4);
        if !l.b().is_zero() {
            let y = (-(l.c() + &(l.a() * &k))).checked_div(l.b()).ok()?;
            Some(Point::new(k, y))
        } else {
            let x = (-(l.c() + &(l.b() * &k))).checked_div(l.a()).ok()?;
            Some(Point::new(x, k))
        }
    };
    let mut out = vec![];
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    for k in -64..=64 {
        for (i, g) in lines.iter().enumerate() {
            for h in &lines[i + 1..] {
                if let (Some(p), Some(r)) = (on_line(g, k), on_line(h, k)) {
                    out.push(Point::new((&p.x + &r.x).scale(&half), (&p.y + &r.y).scale(&half)));
                }
            }
        }
    }
    out
}

/// Which construction steps the certificate must be closed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ops {
    pub straightedge: bool,
    pub compass: bool,
}

impl Ops {
    pub const STRAIGHTEDGE: Ops = Ops {
        straightedge: true,
        compass: false,
    };
    pub const ALL: Ops = Ops {
        straightedge: true,
        compass: true,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertCondition {
    ContainsStart,
    ExcludesTarget,
    Closed,
    Dense,
}

impl fmt::Display for CertCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertCondition::ContainsStart => "contains the start",
            CertCondition::ExcludesTarget => "excludes the target",
            CertCondition::Closed => "closed under the steps",
            CertCondition::Dense => "dense",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum CertVerdict {
    /// No violation among the sampled checks; not a proof.
    Pass { sampled: usize },
    Fail {
        condition: CertCondition,
        witness: Vec<GeomObject>,
    },
}

impl CertVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, CertVerdict::Pass { .. })
    }
}

impl fmt::Display for CertVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertVerdict::Pass { sampled } => write!(f, "PASS (sampled {sampled} checks)"),
            CertVerdict::Fail { condition, witness } => {
                let w: Vec<String> = witness.iter().map(|o| o.to_string()).collect();
                write!(f, "FAIL ({condition}): {}", w.join(", "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CertCheck {
    pub ops: Ops,
    /// Random subsets tried for closure, besides the start itself.
    pub samples: usize,
    /// Member points added to the start in each sampled subset.
    pub extra_points: usize,
    pub seed: u64,
}

impl CertCheck {
    pub fn new(ops: Ops) -> CertCheck {
        CertCheck {
            ops,
            samples: 8,
            extra_points: 2,
            seed: 0,
        }
    }
}

/// Sampled check of the certificate conditions, stopping at the first
/// violation found.
pub fn check_certificate(
    cert: &dyn Certificate,
    e: &Configuration,
    target: &GeomObject,
    check: CertCheck,
) -> CertVerdict {
    let fail = |condition, witness| CertVerdict::Fail { condition, witness };
    let mut sampled = 0;
    for o in e.iter() {
        sampled += 1;
        if !cert.contains(o) {
            return fail(CertCondition::ContainsStart, vec![o.clone()]);
        }
    }
    sampled += 1;
    if cert.contains(target) {
        return fail(CertCondition::ExcludesTarget, vec![target.clone()]);
    }
    let session = e.iter().next().unwrap_or(target).session().clone();

    // closure: the start itself, then the start plus random member points
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    for sample in 0..=check.samples {
        let mut s = e.clone();
        if sample > 0 {
            for _ in 0..check.extra_points {
                let c = Point::from_ratios(&session, (rng.gen_range(-16..=16), 4), (rng.gen_range(-16..=16), 4));
                if let Some(p) = cert.point_in_disk(&session, &c, &Rational::new(1.into(), 8.into())) {
                    s.insert(p.into());
                }
            }
        }
        match closure_violation(cert, &s, check.ops) {
            (_, Some(witness)) => return fail(CertCondition::Closed, witness),
            (n, None) => sampled += n,
        }
    }

    // density: a grid of small disks
    let radius = Rational::new(1.into(), 16.into());
    for i in -4..=4 {
        for j in -4..=4 {
            sampled += 1;
            let c = Point::from_ratios(&session, (i, 2), (j, 2));
            let ok = cert
                .point_in_disk(&session, &c, &radius)
                .filter(|p| cert.contains(&p.clone().into()))
                .filter(|p| {
                    Region::Disk {
                        center: c.clone(),
                        radius: radius.clone(),
                    }
                    .contains(p)
                });
            if ok.is_none() {
                return fail(CertCondition::Dense, vec![c.into()]);
            }
        }
    }
    CertVerdict::Pass { sampled }
}

/// One application of the allowed steps to `s`. Returns the number of
/// objects checked, and the first batch of non-members if any. Steps whose
/// arithmetic exceeds the session's limits are skipped.
fn closure_violation(cert: &dyn Certificate, s: &Configuration, ops: Ops) -> (usize, Option<Vec<GeomObject>>) {
    let pts: Vec<&Point> = s.points().collect();
    let mut curves: Vec<GeomObject> = s.curves().cloned().collect();
    let mut checked = 0;
    let mut fresh: Vec<GeomObject> = vec![];
    if ops.straightedge {
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                if let Ok(l) = geom::line_through(p, q) {
                    fresh.push(l.into());
                }
            }
        }
    }
    if ops.compass {
        for o in &pts {
            for (i, a) in pts.iter().enumerate() {
                for b in &pts[i + 1..] {
                    if let Ok(c) = geom::circle_centered(o, a, b) {
                        fresh.push(c.into());
                    }
                }
            }
        }
    }
    for c in fresh {
        if !curves.contains(&c) {
            checked += 1;
            if !cert.contains(&c) {
                return (checked, Some(vec![c]));
            }
            curves.push(c);
        }
    }
    // line-line, then line-circle, then circle-circle
    let rank = |g: &GeomObject| if g.as_line().is_some() { 0 } else { 1 };
    let mut pairs = vec![];
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            pairs.push((rank(&curves[i]) + rank(&curves[j]), i, j));
        }
    }
    pairs.sort();
    for (_, i, j) in pairs {
        let Ok(meet) = geom::intersect(&curves[i], &curves[j]) else {
            continue;
        };
        let bad: Vec<GeomObject> = meet
            .into_iter()
            .map(GeomObject::from)
            .filter(|p| !cert.contains(p))
            .collect();
        checked += 1;
        if !bad.is_empty() {
            return (checked, Some(bad));
        }
    }
    (checked, None)
}
