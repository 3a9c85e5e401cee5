use num_traits::Zero;

use super::{Circle, GeomError, GeomObject, Line, Point};
use crate::field::{Rational, Real};

type Mat = [[Rational; 3]; 3];

/// Invertible 3x3 rational matrix acting on homogeneous coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveMap {
    m: Mat,
    inv: Mat,
}

fn det(m: &Mat) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

fn inverse(m: &Mat) -> Option<Mat> {
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
    };
    // adjugate, transposed cofactors
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    Some(adj.map(|row| row.map(|x| x / &d)))
}

impl ProjectiveMap {
    pub fn new(m: Mat) -> Result<ProjectiveMap, GeomError> {
        let inv = inverse(&m).ok_or(GeomError::Singular)?;
        Ok(ProjectiveMap { m, inv })
    }

    pub fn from_ratios(rows: [[(i64, i64); 3]; 3]) -> Result<ProjectiveMap, GeomError> {
        ProjectiveMap::new(rows.map(|row| row.map(|(n, d)| Rational::new(n.into(), d.into()))))
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn inverse(&self) -> ProjectiveMap {
        ProjectiveMap {
            m: self.inv.clone(),
            inv: self.m.clone(),
        }
    }

    pub fn compose(&self, then: &ProjectiveMap) -> ProjectiveMap {
        let prod = |a: &Mat, b: &Mat| -> Mat {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum())
            })
        };
        ProjectiveMap {
            m: prod(&then.m, &self.m),
            inv: prod(&self.inv, &then.inv),
        }
    }

    pub fn apply_point(&self, p: &Point) -> Result<Point, GeomError> {
        let row = |r: &[Rational; 3]| p.x.scale(&r[0]) + p.y.scale(&r[1]) + p.x.session().rational(r[2].clone());
        let w = row(&self.m[2]);
        if w.is_zero() {
            return Err(GeomError::AtInfinity);
        }
        let winv = w.inv()?;
        Ok(Point::new(row(&self.m[0]) * &winv, row(&self.m[1]) * &winv))
    }

    /// Lines transform by the inverse transpose.
    pub fn apply_line(&self, l: &Line) -> Result<Line, GeomError> {
        let coeffs = [l.a(), l.b(), l.c()];
        let col = |j: usize| -> Real {
            let mut acc = coeffs[0].scale(&self.inv[0][j]);
            for i in 1..3 {
                acc = acc + coeffs[i].scale(&self.inv[i][j]);
            }
            acc
        };
        Line::new(col(0), col(1), col(2))
            .map_err(|_| GeomError::AtInfinity)
    }

    /// Conic matrix of the image of `c`, `M^-T Q M^-1`.
    fn image_conic(&self, c: &Circle) -> [[Real; 3]; 3] {
        let s = c.center().session();
        let (x, y) = (&c.center().x, &c.center().y);
        let q: [[Real; 3]; 3] = [
            [s.one(), s.zero(), -x.clone()],
            [s.zero(), s.one(), -y.clone()],
            [-x.clone(), -y.clone(), x * x + y * y - c.r2()],
        ];
        let n = &self.inv;
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = s.zero();
                for k in 0..3 {
                    for l in 0..3 {
                        let coef = &n[k][i] * &n[l][j];
                        if !coef.is_zero() {
                            acc = acc + q[k][l].scale(&coef);
                        }
                    }
                }
                acc
            })
        })
    }

    /// The image of a circle when it is again a circle.
    pub fn image_circle(&self, c: &Circle) -> Option<Circle> {
        let q = self.image_conic(c);
        if q[0][0].is_zero() || q[0][0] != q[1][1] || !q[0][1].is_zero() {
            return None;
        }
        let lead = q[0][0].inv().ok()?;
        let cx = -(&q[0][2] * &lead);
        let cy = -(&q[1][2] * &lead);
        let f = &q[2][2] * &lead;
        let r2 = &cx * &cx + &cy * &cy - f;
        Circle::new(Point::new(cx, cy), r2).ok()
    }

    /// Whether the map sends `c` onto itself.
    pub fn preserves_circle(&self, c: &Circle) -> bool {
        self.image_circle(c).as_ref() == Some(c)
    }

    /// Image of an object. Circles that do not map to circles are reported
    /// as `None` along with points sent to infinity.
    pub fn apply(&self, obj: &GeomObject) -> Option<GeomObject> {
        match obj {
            GeomObject::Point(p) => self.apply_point(p).ok().map(GeomObject::Point),
            GeomObject::Line(l) => self.apply_line(l).ok().map(GeomObject::Line),
            GeomObject::Circle(c) => self.image_circle(c).map(GeomObject::Circle),
        }
    }
}
