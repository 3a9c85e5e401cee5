//! SVG figures of runs, closures and games.
//!
//! Inputs are black, constructed objects take a color from a ramp over their
//! generation, and the target is drawn in red. Coordinates come from the
//! exact values approximated to 2^-20, so output is byte-stable.

use std::fmt::Write as _;

use euclid_core::closure::ClosureTrace;
use euclid_core::dsl::{Event, Trace};
use euclid_core::field::{Rational, Real};
use euclid_core::game::GameTrace;
use euclid_core::geom::GeomObject;
use num_traits::{FromPrimitive, ToPrimitive};

const WIDTH: f64 = 800.0;
const PRECISION: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    Input,
    Constructed(usize),
    Target,
}

#[derive(Clone, Debug, Default)]
pub struct Figure {
    pub items: Vec<(GeomObject, Role)>,
}

impl Figure {
    fn push(&mut self, obj: GeomObject, role: Role, target: Option<&GeomObject>) {
        if self.items.iter().any(|(o, _)| *o == obj) {
            return;
        }
        let role = match role {
            Role::Constructed(_) if target == Some(&obj) => Role::Target,
            r => r,
        };
        self.items.push((obj, role));
    }

    /// Generation of an object is one more than its latest parent.
    pub fn from_run(trace: &Trace, target: Option<&GeomObject>) -> Figure {
        let mut fig = Figure::default();
        let mut gens: Vec<(String, usize)> = vec![];
        for e in &trace.events {
            if let Event::Bind {
                name,
                object,
                step,
                parents,
            } = e
            {
                if step == "input" {
                    gens.push((name.clone(), 0));
                    fig.push(object.clone(), Role::Input, target);
                    continue;
                }
                let g = 1 + parents
                    .iter()
                    .filter_map(|p| gens.iter().rev().find(|(n, _)| n == p).map(|(_, g)| *g))
                    .max()
                    .unwrap_or(0);
                gens.push((name.clone(), g));
                fig.push(object.clone(), Role::Constructed(g), target);
            }
        }
        fig
    }

    pub fn from_closure(trace: &ClosureTrace, target: Option<&GeomObject>) -> Figure {
        let mut fig = Figure::default();
        for (o, p) in trace.objects.iter().zip(&trace.provenance) {
            let role = if p.generation == 0 {
                Role::Input
            } else {
                Role::Constructed(p.generation)
            };
            fig.push(o.clone(), role, target);
        }
        fig
    }

    /// Each move is its own generation.
    pub fn from_game(trace: &GameTrace) -> Figure {
        let mut fig = Figure::default();
        for o in &trace.start {
            fig.push(o.clone(), Role::Input, Some(&trace.target));
        }
        for m in &trace.moves {
            for o in &m.added {
                fig.push(o.clone(), Role::Constructed(m.index), Some(&trace.target));
            }
        }
        fig
    }

    fn max_generation(&self) -> usize {
        self.items
            .iter()
            .filter_map(|(_, r)| match r {
                Role::Constructed(g) => Some(*g),
                _ => None,
            })
            .max()
            .unwrap_or(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Viewport {
    pub xmin: Rational,
    pub ymin: Rational,
    pub xmax: Rational,
    pub ymax: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptyViewport;

impl std::fmt::Display for EmptyViewport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("viewport has no area")
    }
}

impl std::error::Error for EmptyViewport {}

fn approx(r: &Real) -> f64 {
    let (lo, hi) = r.approx(PRECISION);
    ((lo + hi) / Rational::from_i64(2).expect("two")).to_f64().unwrap_or(f64::NAN)
}

impl Viewport {
    pub fn new(xmin: Rational, ymin: Rational, xmax: Rational, ymax: Rational) -> Viewport {
        Viewport { xmin, ymin, xmax, ymax }
    }

    /// Integer box around every point and circle, with a margin of one.
    pub fn around(fig: &Figure) -> Viewport {
        let mut xs = vec![];
        let mut ys = vec![];
        for (o, _) in &fig.items {
            match o {
                GeomObject::Point(p) => {
                    xs.push(approx(&p.x));
                    ys.push(approx(&p.y));
                }
                GeomObject::Circle(c) => {
                    let r = approx(c.r2()).sqrt();
                    let (x, y) = (approx(&c.center().x), approx(&c.center().y));
                    xs.extend([x - r, x + r]);
                    ys.extend([y - r, y + r]);
                }
                GeomObject::Line(_) => {}
            }
        }
        let lo = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let int = |v: f64| Rational::from_i64(v as i64).expect("integer");
        if xs.is_empty() {
            return Viewport::new(int(-1.0), int(-1.0), int(1.0), int(1.0));
        }
        Viewport::new(
            int(lo(&xs).floor() - 1.0),
            int(lo(&ys).floor() - 1.0),
            int(hi(&xs).ceil() + 1.0),
            int(hi(&ys).ceil() + 1.0),
        )
    }
}

fn color(role: &Role, max_gen: usize) -> String {
    match role {
        Role::Input => "black".into(),
        Role::Target => "#d62728".into(),
        Role::Constructed(g) => {
            let t = (*g as f64 - 1.0) / ((max_gen.max(2) - 1) as f64);
            format!("hsl({}, 70%, 45%)", (210.0 - 150.0 * t.min(1.0)).round() as i64)
        }
    }
}

fn class(role: &Role) -> String {
    match role {
        Role::Input => "input".into(),
        Role::Target => "target".into(),
        Role::Constructed(g) => format!("g{g}"),
    }
}

/// Segment of `ax + by + c = 0` inside the box, if any.
fn clip(a: f64, b: f64, c: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> Option<((f64, f64), (f64, f64))> {
    let mut hits: Vec<(f64, f64)> = vec![];
    if b != 0.0 {
        for x in [x0, x1] {
            let y = -(a * x + c) / b;
            if y >= y0 && y <= y1 {
                hits.push((x, y));
            }
        }
    }
    if a != 0.0 {
        for y in [y0, y1] {
            let x = -(b * y + c) / a;
            if x >= x0 && x <= x1 {
                hits.push((x, y));
            }
        }
    }
    hits.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    hits.dedup();
    match hits.as_slice() {
        [p, .., q] => Some((*p, *q)),
        _ => None,
    }
}

pub fn render_svg(fig: &Figure, view: &Viewport) -> Result<String, EmptyViewport> {
    if view.xmin >= view.xmax || view.ymin >= view.ymax {
        return Err(EmptyViewport);
    }
    let f = |q: &Rational| q.to_f64().unwrap_or(f64::NAN);
    let (x0, y0, x1, y1) = (f(&view.xmin), f(&view.ymin), f(&view.xmax), f(&view.ymax));
    let scale = WIDTH / (x1 - x0);
    let height = (y1 - y0) * scale;
    let sx = |x: f64| (x - x0) * scale;
    let sy = |y: f64| (y1 - y) * scale;
    let max_gen = fig.max_generation();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.3} {height:.3}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    // curves first so points stay visible
    for (o, role) in &fig.items {
        let (stroke, cls) = (color(role, max_gen), class(role));
        let sw = if *role == Role::Target { 2.5 } else { 1.2 };
        match o {
            GeomObject::Line(l) => {
                if let Some(((ax, ay), (bx, by))) = clip(approx(l.a()), approx(l.b()), approx(l.c()), x0, y0, x1, y1) {
                    let _ = writeln!(
                        out,
                        r#"<line class="curve {cls}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{stroke}" stroke-width="{sw}"/>"#,
                        sx(ax),
                        sy(ay),
                        sx(bx),
                        sy(by)
                    );
                }
            }
            GeomObject::Circle(c) => {
                let _ = writeln!(
                    out,
                    r#"<circle class="curve {cls}" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="{stroke}" stroke-width="{sw}"/>"#,
                    sx(approx(&c.center().x)),
                    sy(approx(&c.center().y)),
                    approx(c.r2()).sqrt() * scale
                );
            }
            GeomObject::Point(_) => {}
        }
    }
    for (o, role) in &fig.items {
        if let GeomObject::Point(p) = o {
            let r = if *role == Role::Target { 5 } else { 3 };
            let _ = writeln!(
                out,
                r#"<circle class="point {}" cx="{:.3}" cy="{:.3}" r="{r}" fill="{}"/>"#,
                class(role),
                sx(approx(&p.x)),
                sy(approx(&p.y)),
                color(role, max_gen)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use euclid_core::dsl::{parse, run, SeededOracle};
    use euclid_core::field::Session;
    use euclid_core::geom::Point;

    fn midpoint_figure() -> Figure {
        let s = Session::new();
        let prog = parse(include_str!("../../../corpus/midpoint.construct")).unwrap();
        let inputs = vec![Point::from_ints(&s, 0, 0).into(), Point::from_ints(&s, 2, 0).into()];
        let res = run(&prog, &inputs, &mut SeededOracle::new(0)).unwrap();
        Figure::from_run(&res.trace, res.output("M"))
    }

    #[test]
    fn midpoint_figure_counts() {
        let fig = midpoint_figure();
        let svg = render_svg(&fig, &Viewport::around(&fig)).unwrap();
        assert_eq!(svg.matches(r#"class="point input""#).count(), 2);
        assert_eq!(svg.matches(r#"class="curve"#).count(), 4);
        assert_eq!(svg.matches(r#"class="point"#).count(), 5);
        assert_eq!(svg.matches(r#"class="point target""#).count(), 1);
        assert_eq!(svg, render_svg(&midpoint_figure(), &Viewport::around(&fig)).unwrap());
    }

    #[test]
    fn inputs_only_and_empty_viewport() {
        let s = Session::new();
        let mut fig = Figure::default();
        fig.push(Point::from_ints(&s, 1, 1).into(), Role::Input, None);
        let v = Viewport::around(&fig);
        assert_eq!(v.xmin, Rational::from_i64(0).unwrap());
        let svg = render_svg(&fig, &v).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        let one = Rational::from_i64(1).unwrap();
        let flat = Viewport::new(one.clone(), one.clone(), one.clone() + one.clone(), one.clone());
        assert_eq!(render_svg(&fig, &flat), Err(EmptyViewport));
    }

    #[test]
    fn clipping_finds_both_ends() {
        let seg = clip(1.0, -1.0, 0.0, -2.0, -2.0, 2.0, 2.0).unwrap();
        assert_eq!(seg, ((-2.0, -2.0), (2.0, 2.0)));
        assert!(clip(0.0, 1.0, -5.0, -2.0, -2.0, 2.0, 2.0).is_none());
    }
}
