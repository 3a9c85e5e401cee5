//! Integer polynomials, rational roots, and the degree criterion for
//! constructible roots.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{clear_denominators, FieldError, Rational, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial has no roots")]
    Constant,
    #[error("irreducibility test supports degrees 1 to 3, got {0}")]
    UnsupportedDegree(usize),
    #[error("polynomial is reducible: it has the rational root {0}")]
    Reducible(Rational),
    #[error("cosine {0} is outside [-1, 1]")]
    CosineOutOfRange(Rational),
    #[error("at offset {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },
    #[error("unknown preset '{0}' (known: cube-doubling, trisect-60, heptagon)")]
    UnknownPreset(String),
}

/// Integer coefficients in ascending degree order, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> IntPoly {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn normalized(&self) -> IntPoly {
        let content = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if content.is_zero() {
            return self.clone();
        }
        let sign = if self.coeffs.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
        IntPoly::new(self.coeffs.iter().map(|c| c / &content * sign).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    }

    pub fn eval_real(&self, x: &Real) -> Real {
        let s = x.session();
        self.coeffs
            .iter()
            .rev()
            .fold(s.zero(), |acc, c| acc * x + s.rational(Rational::from_integer(c.clone())))
    }

    /// Quotient and remainder of division by `x - r`.
    pub fn divide_by_root(&self, r: &Rational) -> (Vec<Rational>, Rational) {
        let mut quotient = vec![];
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * r + Rational::from_integer(c.clone());
            quotient.push(acc.clone());
        }
        let rem = quotient.pop().unwrap_or_default();
        quotient.reverse();
        (quotient, rem)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            if k == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = vec![];
    let mut large = vec![];
    let root = n.sqrt();
    let mut d = BigInt::one();
    while d <= root {
        if (&n % &d).is_zero() {
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// All rational roots, ascending, without repeats.
pub fn rational_roots(p: &IntPoly) -> Result<Vec<Rational>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let zeros = p.coeffs.iter().take_while(|c| c.is_zero()).count();
    let reduced = IntPoly::new(p.coeffs[zeros..].to_vec());
    let mut roots = vec![];
    if zeros > 0 {
        roots.push(Rational::zero());
    }
    if reduced.degree() > 0 {
        let lead = reduced.coeffs.last().expect("nonzero");
        let trail = &reduced.coeffs[0];
        for num in divisors(trail) {
            for den in divisors(lead) {
                for sign in [1, -1] {
                    let r = Rational::new(&num * sign, den.clone());
                    if reduced.eval(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

/// Irreducibility over the rationals for degrees 1 to 3.
pub fn irreducible_over_q(p: &IntPoly) -> Result<bool, AlgebraError> {
    match p.degree() {
        _ if p.is_zero() => Err(AlgebraError::ZeroPolynomial),
        0 => Err(AlgebraError::Constant),
        1 => Ok(true),
        2 | 3 => Ok(rational_roots(p)?.is_empty()),
        d => Err(AlgebraError::UnsupportedDegree(d)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    NotConstructible { degree: usize },
    /// Degree is a power of two. Necessary for constructibility, not sufficient.
    NecessaryConditionHolds { degree: usize },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotConstructible { degree } => {
                write!(f, "NotConstructible: irreducible degree {degree} is not a power of 2")
            }
            Verdict::NecessaryConditionHolds { degree } => write!(
                f,
                "NecessaryConditionHolds({degree}): irreducible degree {degree} is a power of 2 (necessary condition only)"
            ),
        }
    }
}

/// Degree criterion for a root of an irreducible polynomial to lie in a
/// quadratic tower.
pub fn wantzel_check(p: &IntPoly) -> Result<Verdict, AlgebraError> {
    let p = p.normalized();
    if !irreducible_over_q(&p)? {
        let root = rational_roots(&p)?.into_iter().next().expect("a rational root");
        return Err(AlgebraError::Reducible(root));
    }
    let degree = p.degree();
    Ok(if degree.is_power_of_two() {
        Verdict::NecessaryConditionHolds { degree }
    } else {
        Verdict::NotConstructible { degree }
    })
}

/// `4x^3 - 3x - c` cleared to integers; `cos(t)` is a root when `c = cos(3t)`.
pub fn trisection_poly(c: &Rational) -> Result<IntPoly, AlgebraError> {
    if c.abs() > Rational::one() {
        return Err(AlgebraError::CosineOutOfRange(c.clone()));
    }
    let coeffs = [-c.clone(), Rational::from_integer((-3).into()), Rational::zero(), Rational::from_integer(4.into())];
    Ok(IntPoly::new(clear_denominators(&coeffs)))
}

pub const PRESETS: [&str; 3] = ["cube-doubling", "trisect-60", "heptagon"];

pub fn preset(name: &str) -> Result<IntPoly, AlgebraError> {
    Ok(match name {
        "cube-doubling" => IntPoly::from_i64(&[-2, 0, 0, 1]),
        "trisect-60" => IntPoly::from_i64(&[-1, -6, 0, 8]),
        // 2cos(2pi/7)
        "heptagon" => IntPoly::from_i64(&[-1, -2, 1, 1]),
        _ => return Err(AlgebraError::UnknownPreset(name.to_string())),
    })
}

/// Parse a polynomial in `x` with integer coefficients, such as `8x^3 - 6x - 1`.
pub fn parse_poly(text: &str) -> Result<IntPoly, AlgebraError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut coeffs: Vec<BigInt> = vec![];
    let skip = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let fail = |offset: usize, expected: &str| AlgebraError::Parse {
        offset,
        expected: expected.to_string(),
    };
    let mut first = true;
    loop {
        skip(&mut pos);
        if pos == bytes.len() {
            if first {
                return Err(fail(pos, "a term"));
            }
            break;
        }
        let mut sign = BigInt::one();
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -sign;
            }
            pos += 1;
            skip(&mut pos);
        } else if !first {
            return Err(fail(pos, "'+' or '-'"));
        }
        first = false;
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let coeff: BigInt = if start < pos { text[start..pos].parse().expect("digits") } else { BigInt::one() };
        skip(&mut pos);
        if pos < bytes.len() && bytes[pos] == b'*' {
            pos += 1;
            skip(&mut pos);
        }
        let mut power = 0usize;
        if pos < bytes.len() && bytes[pos] == b'x' {
            pos += 1;
            power = 1;
            skip(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                skip(&mut pos);
                let pstart = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                power = text[pstart..pos]
                    .parse()
                    .ok()
                    .filter(|p: &usize| *p <= 1024)
                    .ok_or_else(|| fail(pstart, "an exponent"))?;
            }
        } else if start == pos {
            return Err(fail(pos, "a coefficient or 'x'"));
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += sign * coeff;
    }
    Ok(IntPoly::new(coeffs))
}

/// Tower level `h` of `x` and the degree `2^h` of its characteristic polynomial.
pub fn height_degree_report(x: &Real) -> Result<(usize, usize), FieldError> {
    let poly = x.char_poly()?;
    Ok((x.level(), poly.len() - 1))
}

#[cfg(test)]
mod tests {
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    use super::*;
    use crate::field::Session;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rational_root_examples() {
        assert_eq!(rational_roots(&IntPoly::from_i64(&[-2, 0, 0, 1])).unwrap(), vec![]);
        assert_eq!(rational_roots(&IntPoly::from_i64(&[-3, 2])).unwrap(), vec![q(3, 2)]);
        assert_eq!(rational_roots(&IntPoly::from_i64(&[0, -1, 1])).unwrap(), vec![q(0, 1), q(1, 1)]);
        assert_eq!(rational_roots(&IntPoly::from_i64(&[])), Err(AlgebraError::ZeroPolynomial));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(irreducible_over_q(&IntPoly::from_i64(&[-2, 0, 0, 1])).unwrap());
        assert!(!irreducible_over_q(&IntPoly::from_i64(&[-1, 0, 1])).unwrap());
        assert_eq!(
            irreducible_over_q(&IntPoly::from_i64(&[1, 0, 0, 0, 1])),
            Err(AlgebraError::UnsupportedDegree(4))
        );
    }

    #[test]
    fn classical_impossibilities() {
        for name in PRESETS {
            assert_eq!(
                wantzel_check(&preset(name).unwrap()).unwrap(),
                Verdict::NotConstructible { degree: 3 },
                "{name}"
            );
        }
        assert_eq!(
            wantzel_check(&parse_poly("x^2 - 2").unwrap()).unwrap(),
            Verdict::NecessaryConditionHolds { degree: 2 }
        );
        assert_eq!(
            wantzel_check(&IntPoly::from_i64(&[-1, 0, 1])),
            Err(AlgebraError::Reducible(q(-1, 1)))
        );
        assert_eq!(
            Verdict::NotConstructible { degree: 3 }.to_string(),
            "NotConstructible: irreducible degree 3 is not a power of 2"
        );
    }

    #[test]
    fn trisection_examples() {
        assert_eq!(trisection_poly(&q(1, 2)).unwrap(), IntPoly::from_i64(&[-1, -6, 0, 8]));
        let zero_angle = trisection_poly(&q(1, 1)).unwrap();
        assert_eq!(zero_angle, IntPoly::from_i64(&[-1, -3, 0, 4]));
        assert_eq!(rational_roots(&zero_angle).unwrap(), vec![q(-1, 2), q(1, 1)]);
        let straight = trisection_poly(&q(-1, 1)).unwrap();
        assert!(straight.eval(&q(-1, 1)).is_zero());
        assert!(trisection_poly(&q(3, 2)).is_err());
    }

    #[test]
    fn polynomial_literals() {
        let p = parse_poly("8x^3 - 6x - 1").unwrap();
        assert_eq!(p, IntPoly::from_i64(&[-1, -6, 0, 8]));
        assert_eq!(p.to_string(), "8x^3 - 6x - 1");
        assert_eq!(parse_poly("-x^2 + 3*x").unwrap(), IntPoly::from_i64(&[0, 3, -1]));
        assert!(parse_poly("8y").is_err());
        assert!(parse_poly("").is_err());
    }

    #[test]
    fn height_reports() {
        let s = Session::new();
        assert_eq!(height_degree_report(&s.integer(1)).unwrap(), (0, 1));
        assert_eq!(height_degree_report(&s.parse("sqrt(3)/2").unwrap()).unwrap(), (1, 2));
        let t = Session::new();
        assert_eq!(height_degree_report(&t.parse("sqrt(2)+sqrt(3)").unwrap()).unwrap(), (2, 4));
    }

    #[test]
    fn cubic_roots_never_appear_in_towers() {
        let s = Session::new();
        let samples = ["sqrt(2)", "1+sqrt(3)", "(1+sqrt(5))/2", "sqrt(2+sqrt(2))", "sqrt(3)/2"];
        for text in samples {
            let x = s.parse(text).unwrap();
            for name in PRESETS {
                assert!(!preset(name).unwrap().eval_real(&x).is_zero());
            }
        }
    }

    proptest! {
        #[test]
        fn returned_roots_divide_exactly(coeffs in prop::collection::vec(-20i64..=20, 2..6)) {
            let p = IntPoly::from_i64(&coeffs);
            prop_assume!(!p.is_zero());
            for r in rational_roots(&p).unwrap() {
                let (_, rem) = p.divide_by_root(&r);
                prop_assert!(rem.is_zero());
            }
        }

        #[test]
        fn built_roots_are_found(num in -6i64..=6, den in 1i64..=6, extra in prop::collection::vec(-5i64..=5, 1..3)) {
            // (den x - num) * extra(x)
            let mut prod = vec![0i64; extra.len() + 1];
            for (i, e) in extra.iter().enumerate() {
                prod[i] += -num * e;
                prod[i + 1] += den * e;
            }
            let p = IntPoly::from_i64(&prod);
            prop_assume!(!p.is_zero());
            prop_assert!(rational_roots(&p).unwrap().contains(&q(num, den)));
        }

        #[test]
        fn trisection_cosine_is_a_root(t in 0.05f64..1.0) {
            let c = (3.0 * t).cos();
            let cq = Rational::from_float(c).unwrap();
            prop_assume!(cq.abs() <= Rational::one());
            let p = trisection_poly(&cq).unwrap();
            let x = t.cos();
            let value: f64 = p.coeffs().iter().enumerate()
                .map(|(k, a)| a.to_f64().unwrap() * x.powi(k as i32)).sum();
            let scale: f64 = p.coeffs().iter().map(|a| a.to_f64().unwrap().abs()).sum();
            prop_assert!(value.abs() <= 1e-9 * scale);
        }
    }
}
