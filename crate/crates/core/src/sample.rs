//! Open regions of the plane and a deterministic dyadic point sampler.
//!
//! Regions are open disks or sign-vector cells (fixed side of each listed
//! line, fixed inside/outside of each listed circle).

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::field::{Rational, Session, Sign};
use crate::geom::{self, GeomObject, Point};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "region", rename_all = "lowercase")]
pub enum Region {
    Disk {
        center: Point,
        #[serde(serialize_with = "ser_rational")]
        radius: Rational,
    },
    /// Each curve with the required side sign (never zero).
    Cell { conditions: Vec<(GeomObject, Sign)> },
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl Region {
    /// Exact membership.
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Region::Disk { center, radius } => {
                let r2 = p.session().rational(radius * radius);
                (geom::dist2(p, center) - r2).is_negative()
            }
            Region::Cell { conditions } => conditions
                .iter()
                .all(|(c, s)| *s != Sign::Zero && geom::side(p, c) == Some(*s)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Region::Disk { center, radius } => format!("disk {center} radius {radius}"),
            Region::Cell { conditions } => {
                let parts: Vec<String> = conditions
                    .iter()
                    .map(|(c, s)| format!("[{c}] {}", if *s == Sign::Positive { "> 0" } else { "< 0" }))
                    .collect();
                format!("cell {}", parts.join(", "))
            }
        }
    }
}

fn pow2(m: u32) -> Rational {
    Rational::from_integer(BigInt::one() << m)
}

fn to_rational(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Maximum number of exact membership tests per grid level.
const LEVEL_CANDIDATES: usize = 400;
const MAX_LEVEL: u32 = 14;

/// Deterministic sampler; seed 0 takes the most central candidates.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub seed: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { seed }
    }

    /// A dyadic point strictly inside `region`, distinct from the points of
    /// `known`, or `None` when the bounded scan finds nothing.
    pub fn point_in(&self, session: &Session, region: &Region, known: &[GeomObject]) -> Option<Point> {
        let taken: HashSet<&Point> = known.iter().filter_map(GeomObject::as_point).collect();
        match region {
            Region::Disk { center, radius } => self.in_disk(session, center, radius, &taken),
            Region::Cell { conditions } => {
                let mut frame: Vec<&GeomObject> = known.iter().collect();
                frame.extend(conditions.iter().map(|(c, _)| c));
                self.in_cell(session, region, &frame, &taken)
            }
        }
    }

    fn in_disk(&self, session: &Session, center: &Point, radius: &Rational, taken: &HashSet<&Point>) -> Option<Point> {
        if !radius.is_positive() {
            return None;
        }
        // approximation error below radius/8
        let mut k = 0;
        while Rational::new(BigInt::from(3), BigInt::one() << (k + 2)) >= radius / to_rational(8) {
            k += 1;
        }
        let (cx, _) = center.x.approx(k);
        let (cy, _) = center.y.approx(k);
        let mut m = 0;
        while pow2(m).recip() > radius / to_rational(64) {
            m += 1;
        }
        let step = pow2(m).recip();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for attempt in 0..64 {
            let (i, j) = if self.seed == 0 && attempt == 0 {
                (0, 0)
            } else {
                (rng.gen_range(-16..=16), rng.gen_range(-16..=16))
            };
            let p = Point::from_rationals(
                session,
                &cx + &step * to_rational(i),
                &cy + &step * to_rational(j),
            );
            let region = Region::Disk { center: center.clone(), radius: radius.clone() };
            if !taken.contains(&p) && region.contains(&p) {
                return Some(p);
            }
        }
        None
    }

    fn in_cell(&self, session: &Session, region: &Region, frame: &[&GeomObject], taken: &HashSet<&Point>) -> Option<Point> {
        let (center, side) = bounding_square(frame);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let focus = if self.seed == 0 {
            center.clone()
        } else {
            let quarter = &side / to_rational(32);
            (
                &center.0 + &quarter * to_rational(rng.gen_range(-8..=8)),
                &center.1 + &quarter * to_rational(rng.gen_range(-8..=8)),
            )
        };
        for level in 1..=MAX_LEVEL {
            let half = 1i64 << (level - 1);
            let h = &side / pow2(level);
            let fresh = |i: i64, j: i64| level == 1 || i % 2 != 0 || j % 2 != 0;
            let mut cells: Vec<(i64, i64)> = if (2 * half + 1) * (2 * half + 1) <= 4 * LEVEL_CANDIDATES as i64 {
                (-half..=half)
                    .flat_map(|i| (-half..=half).map(move |j| (i, j)))
                    .filter(|&(i, j)| fresh(i, j))
                    .collect()
            } else {
                let mut picked = HashSet::new();
                let mut tries = 0;
                while picked.len() < LEVEL_CANDIDATES && tries < 20 * LEVEL_CANDIDATES {
                    tries += 1;
                    let (i, j) = (rng.gen_range(-half..=half), rng.gen_range(-half..=half));
                    if fresh(i, j) {
                        picked.insert((i, j));
                    }
                }
                picked.into_iter().collect()
            };
            let coord = |i: i64, j: i64| (&center.0 + &h * to_rational(i), &center.1 + &h * to_rational(j));
            let mut ranked: Vec<(Rational, (i64, i64))> = cells
                .drain(..)
                .map(|(i, j)| {
                    let (x, y) = coord(i, j);
                    let d = (&x - &focus.0) * (&x - &focus.0) + (&y - &focus.1) * (&y - &focus.1);
                    (d, (i, j))
                })
                .collect();
            ranked.sort();
            for (_, (i, j)) in ranked.into_iter().take(LEVEL_CANDIDATES) {
                let (x, y) = coord(i, j);
                let p = Point::from_rationals(session, x, y);
                if !taken.contains(&p) && region.contains(&p) {
                    return Some(p);
                }
            }
        }
        None
    }
}

/// Integer-aligned square around every point, circle and line foot in the
/// frame, with a margin of 1. Returns the center and a power-of-two side.
fn bounding_square(frame: &[&GeomObject]) -> ((Rational, Rational), Rational) {
    let mut xs: Vec<f64> = vec![];
    let mut ys: Vec<f64> = vec![];
    for obj in frame {
        match obj {
            GeomObject::Point(p) => {
                xs.push(p.x.to_f64());
                ys.push(p.y.to_f64());
            }
            GeomObject::Circle(c) => {
                let r = c.r2().to_f64().max(0.0).sqrt();
                let (x, y) = c.center().to_f64();
                xs.extend([x - r, x + r]);
                ys.extend([y - r, y + r]);
            }
            GeomObject::Line(l) => {
                let (a, b, c) = (l.a().to_f64(), l.b().to_f64(), l.c().to_f64());
                let n2 = a * a + b * b;
                xs.push(-a * c / n2);
                ys.push(-b * c / n2);
            }
        }
    }
    if xs.is_empty() {
        xs.push(0.0);
        ys.push(0.0);
    }
    let clamp = |v: f64| v.clamp(-1e12, 1e12);
    let lo_x = clamp(xs.iter().cloned().fold(f64::INFINITY, f64::min)).floor() as i64 - 1;
    let hi_x = clamp(xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).ceil() as i64 + 1;
    let lo_y = clamp(ys.iter().cloned().fold(f64::INFINITY, f64::min)).floor() as i64 - 1;
    let hi_y = clamp(ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).ceil() as i64 + 1;
    let extent = (hi_x - lo_x).max(hi_y - lo_y).max(1) as u64;
    let side = extent.next_power_of_two();
    let center = (
        Rational::new(BigInt::from(lo_x + hi_x), BigInt::from(2)),
        Rational::new(BigInt::from(lo_y + hi_y), BigInt::from(2)),
    );
    (center, Rational::from_integer(BigInt::from(side)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{line_through, Circle};

    #[test]
    fn upper_half_disk_cell_from_seed_zero() {
        let s = Session::new();
        let unit: GeomObject = Circle::new(Point::from_ints(&s, 0, 0), s.one()).unwrap().into();
        let axis: GeomObject = line_through(&Point::from_ints(&s, 0, 0), &Point::from_ints(&s, 1, 0))
            .unwrap()
            .into();
        let region = Region::Cell {
            conditions: vec![(unit, Sign::Negative), (axis, Sign::Positive)],
        };
        let p = Sampler::new(0).point_in(&s, &region, &[]).unwrap();
        assert_eq!(p, Point::from_ratios(&s, (0, 1), (1, 2)));
    }

    #[test]
    fn disk_points_are_inside_and_deterministic() {
        let s = Session::new();
        let center = Point::new(s.parse("sqrt(2)").unwrap(), s.ratio(1, 3));
        for seed in 0..6 {
            let region = Region::Disk { center: center.clone(), radius: Rational::new(1.into(), 100.into()) };
            let p = Sampler::new(seed).point_in(&s, &region, &[]).unwrap();
            assert!(region.contains(&p));
            assert!(p.is_rational());
            assert_eq!(Sampler::new(seed).point_in(&s, &region, &[]), Some(p));
        }
    }

    #[test]
    fn empty_annulus_is_exhausted() {
        let s = Session::new();
        let o = Point::from_ints(&s, 0, 0);
        let small: GeomObject = Circle::new(o.clone(), s.one()).unwrap().into();
        let big: GeomObject = Circle::new(o, s.integer(4)).unwrap().into();
        let region = Region::Cell {
            conditions: vec![(small, Sign::Negative), (big, Sign::Positive)],
        };
        assert_eq!(Sampler::new(3).point_in(&s, &region, &[]), None);
    }

    #[test]
    fn known_points_are_avoided() {
        let s = Session::new();
        let axis: GeomObject = line_through(&Point::from_ints(&s, 0, 0), &Point::from_ints(&s, 1, 0))
            .unwrap()
            .into();
        let region = Region::Cell { conditions: vec![(axis, Sign::Positive)] };
        let first = Sampler::new(0).point_in(&s, &region, &[]).unwrap();
        let second = Sampler::new(0)
            .point_in(&s, &region, &[first.clone().into()])
            .unwrap();
        assert_ne!(first, second);
        assert!(region.contains(&second));
    }
}
