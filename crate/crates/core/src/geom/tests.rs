use proptest::prelude::*;

use super::*;

fn pt(s: &Session, x: i64, y: i64) -> Point {
    Point::from_ints(s, x, y)
}

fn unit_circle(s: &Session, cx: i64, cy: i64) -> GeomObject {
    Circle::new(pt(s, cx, cy), s.one()).unwrap().into()
}

#[test]
fn two_unit_circles_meet_at_sixty_degrees() {
    let s = Session::new();
    let pts = intersect(&unit_circle(&s, 0, 0), &unit_circle(&s, 1, 0)).unwrap();
    let h = s.parse("sqrt(3)/2").unwrap();
    assert_eq!(
        pts,
        vec![
            Point::new(s.ratio(1, 2), -h.clone()),
            Point::new(s.ratio(1, 2), h),
        ]
    );
}

#[test]
fn compass_radius_is_squared_distance() {
    let s = Session::new();
    let c = circle_centered(&pt(&s, 5, 5), &pt(&s, 0, 0), &pt(&s, 3, 4)).unwrap();
    assert_eq!(c.r2(), &s.integer(25));
    assert!(circle_centered(&pt(&s, 0, 0), &pt(&s, 1, 1), &pt(&s, 1, 1)).is_err());
}

#[test]
fn lines_are_normalized() {
    let s = Session::new();
    let l = line_through(&pt(&s, 0, 0), &pt(&s, 2, 2)).unwrap();
    let m = line_through(&pt(&s, 5, 5), &pt(&s, -1, -1)).unwrap();
    assert_eq!(l, m);
    assert_eq!(l.a(), &s.one());
    assert_eq!(l.b(), &s.integer(-1));
    assert!(line_through(&pt(&s, 1, 1), &pt(&s, 1, 1)).is_err());
}

#[test]
fn degenerate_intersections() {
    let s = Session::new();
    let l: GeomObject = line_through(&pt(&s, 0, 0), &pt(&s, 1, 0)).unwrap().into();
    let par: GeomObject = line_through(&pt(&s, 0, 1), &pt(&s, 1, 1)).unwrap().into();
    assert_eq!(intersect(&l, &par).unwrap(), vec![]);
    assert_eq!(intersect(&l, &l), Err(GeomError::IdenticalCurves));
    let p: GeomObject = pt(&s, 0, 0).into();
    assert_eq!(intersect(&p, &l), Err(GeomError::NotACurve("point")));
    // tangent line touches once
    let tangent: GeomObject = line_through(&pt(&s, -1, 1), &pt(&s, 1, 1)).unwrap().into();
    assert_eq!(intersect(&tangent, &unit_circle(&s, 0, 0)).unwrap(), vec![pt(&s, 0, 1)]);
    // concentric circles
    let big: GeomObject = Circle::new(pt(&s, 0, 0), s.integer(4)).unwrap().into();
    assert_eq!(intersect(&big, &unit_circle(&s, 0, 0)).unwrap(), vec![]);
    // far apart
    assert_eq!(intersect(&unit_circle(&s, 0, 0), &unit_circle(&s, 5, 0)).unwrap(), vec![]);
    assert!(!intersects(&unit_circle(&s, 0, 0), &unit_circle(&s, 5, 0)).unwrap());
}

#[test]
fn line_circle_through_origin() {
    let s = Session::new();
    let diag: GeomObject = line_through(&pt(&s, 0, 0), &pt(&s, 1, 1)).unwrap().into();
    let pts = intersect(&diag, &unit_circle(&s, 0, 0)).unwrap();
    let h = s.parse("sqrt(2)/2").unwrap();
    assert_eq!(pts, vec![Point::new(-h.clone(), -h.clone()), Point::new(h.clone(), h)]);
}

#[test]
fn predicates() {
    let s = Session::new();
    let (a, b, c) = (pt(&s, 0, 0), pt(&s, 1, 0), pt(&s, 0, 1));
    assert_eq!(orientation(&a, &b, &c), Sign::Positive);
    assert_eq!(orientation(&a, &c, &b), Sign::Negative);
    assert_eq!(orientation(&a, &b, &pt(&s, 7, 0)), Sign::Zero);
    assert!(between(&a, &b, &pt(&s, 2, 0)).unwrap());
    assert!(!between(&a, &pt(&s, 2, 0), &b).unwrap());
    assert!(!between(&a, &a, &b).unwrap());
    assert_eq!(between(&a, &b, &c), Err(GeomError::NotCollinear));
    assert_eq!(dist_compare(&a, &b, &a, &c), Sign::Zero);
    assert_eq!(dist_compare(&b, &c, &a, &c), Sign::Positive);
}

#[test]
fn sign_vectors_skip_points() {
    let s = Session::new();
    let objs = vec![
        GeomObject::from(pt(&s, 0, 0)),
        unit_circle(&s, 0, 0),
        line_through(&pt(&s, 0, 0), &pt(&s, 1, 0)).unwrap().into(),
    ];
    let p = Point::from_ratios(&s, (0, 1), (1, 2));
    assert_eq!(sign_vector(&p, &objs), vec![Sign::Negative, Sign::Positive]);
    let q = pt(&s, 0, -3);
    assert_eq!(sign_vector(&q, &objs), vec![Sign::Positive, Sign::Negative]);
}

#[test]
fn other_intersection_picks_the_second_point() {
    let s = Session::new();
    let c1 = unit_circle(&s, 0, 0);
    let c2 = unit_circle(&s, 1, 0);
    let pts = intersect(&c1, &c2).unwrap();
    assert_eq!(other_intersection(&pts[0], &c1, &c2).unwrap(), pts[1]);
    assert_eq!(
        other_intersection(&pt(&s, 9, 9), &c1, &c2),
        Err(GeomError::NotAnIntersection)
    );
}

fn boost() -> ProjectiveMap {
    ProjectiveMap::from_ratios([
        [(5, 4), (0, 1), (3, 4)],
        [(0, 1), (1, 1), (0, 1)],
        [(3, 4), (0, 1), (5, 4)],
    ])
    .unwrap()
}

#[test]
fn boost_moves_origin_and_keeps_unit_circle() {
    let s = Session::new();
    let t = boost();
    assert_eq!(t.apply_point(&pt(&s, 0, 0)).unwrap(), Point::from_ratios(&s, (3, 5), (0, 1)));
    let unit = Circle::new(pt(&s, 0, 0), s.one()).unwrap();
    assert!(t.preserves_circle(&unit));
    let other = Circle::new(pt(&s, 0, 0), s.integer(4)).unwrap();
    assert!(!t.preserves_circle(&other));
    assert!(t.image_circle(&Circle::new(pt(&s, 1, 1), s.ratio(1, 4)).unwrap()).is_none());
}

#[test]
fn boost_preserves_incidence_but_flips_an_orientation() {
    let s = Session::new();
    let t = boost();
    let (a, b, c) = (pt(&s, -2, 0), pt(&s, 0, 0), pt(&s, 0, 1));
    let img = |p: &Point| t.apply_point(p).unwrap();
    assert_ne!(orientation(&a, &b, &c), orientation(&img(&a), &img(&b), &img(&c)));
    let l = line_through(&a, &c).unwrap();
    let l2 = t.apply_line(&l).unwrap();
    assert_eq!(l2, line_through(&img(&a), &img(&c)).unwrap());
}

#[test]
fn singular_and_infinite() {
    let s = Session::new();
    assert_eq!(
        ProjectiveMap::from_ratios([[(1, 1), (0, 1), (0, 1)], [(2, 1), (0, 1), (0, 1)], [(0, 1), (0, 1), (1, 1)]]),
        Err(GeomError::Singular)
    );
    // (-5/3, 0) is sent to infinity by the boost
    let p = Point::from_ratios(&s, (-5, 3), (0, 1));
    assert_eq!(boost().apply_point(&p), Err(GeomError::AtInfinity));
}

#[test]
fn inverse_round_trips() {
    let s = Session::new();
    let t = boost();
    let p = Point::new(s.parse("sqrt(2)").unwrap(), s.ratio(1, 3));
    assert_eq!(t.inverse().apply_point(&t.apply_point(&p).unwrap()).unwrap(), p);
    let id = t.compose(&t.inverse());
    assert_eq!(id.apply_point(&p).unwrap(), p);
}

fn small() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..=6, 1i64..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn intersections_lie_on_both_curves(
        a in (small(), small()), b in (small(), small()),
        c in (small(), small()), d in (small(), small()),
        kind in 0u8..3,
    ) {
        let s = Session::new();
        let p = |v: ((i64, i64), (i64, i64))| Point::from_ratios(&s, v.0, v.1);
        let (a, b, c, d) = (p(a), p(b), p(c), p(d));
        prop_assume!(a != b && c != d);
        let g: GeomObject = match kind {
            0 => line_through(&a, &b).unwrap().into(),
            _ => circle_centered(&a, &a, &b).unwrap().into(),
        };
        let h: GeomObject = match kind {
            2 => line_through(&c, &d).unwrap().into(),
            _ => circle_centered(&c, &c, &d).unwrap().into(),
        };
        prop_assume!(g != h);
        let pts = intersect(&g, &h).unwrap();
        prop_assert!(pts.len() <= 2);
        prop_assert_eq!(intersects(&g, &h).unwrap(), !pts.is_empty());
        for q in &pts {
            prop_assert!(on(q, &g));
            prop_assert!(on(q, &h));
        }
        for w in pts.windows(2) {
            prop_assert_eq!(w[0].lex_cmp(&w[1]), std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn projective_maps_keep_lines_lines(
        a in (small(), small()), b in (small(), small()), e in (small(), small()),
    ) {
        let s = Session::new();
        let p = |v: ((i64, i64), (i64, i64))| Point::from_ratios(&s, v.0, v.1);
        let (a, b, e) = (p(a), p(b), p(e));
        prop_assume!(a != b);
        let t = boost();
        let l = line_through(&a, &b).unwrap();
        if let (Ok(ta), Ok(tb), Ok(tl)) = (t.apply_point(&a), t.apply_point(&b), t.apply_line(&l)) {
            prop_assert!(on(&ta, &tl.clone().into()));
            prop_assert!(on(&tb, &tl.into()));
        }
        if let (Ok(te), Ok(tl)) = (t.apply_point(&e), t.apply_line(&l)) {
            prop_assert_eq!(on(&e, &l.into()), on(&te, &tl.into()));
        }
    }
}
