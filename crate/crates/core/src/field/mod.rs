//! Exact real arithmetic in a tower of quadratic extensions of the rationals.
//!
//! A [`Session`] owns an append-only tower `Q = F_0 ⊂ F_1 ⊂ … ⊂ F_h` with
//! `F_i = F_{i-1}(sqrt(r_i))`. Every radicand is checked, when it is appended,
//! not to be a square in the field below it. Under that invariant the
//! coefficient representation of a [`Real`] is unique, so zero testing and
//! equality are structural.

mod interval;
mod literal;
mod raw;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use interval::SqrtTable;
pub use literal::{parse_expr_at, parse_real, LiteralError, RealExpr};

pub type Rational = num_rational::BigRational;

/// Default bound on the number of radicands in a tower.
pub const DEFAULT_HEIGHT_CAP: usize = 6;
/// Environment variable overriding [`DEFAULT_HEIGHT_CAP`] for CLI sessions.
pub const HEIGHT_CAP_ENV: &str = "EUCLID_HEIGHT_CAP";

const DEFAULT_COEFFICIENT_BITS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("operands belong to different sessions ({0} and {1})")]
    SessionMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("tower height cap {0} reached")]
    HeightCap(usize),
    #[error("coefficient size guard exceeded ({0} bits)")]
    CoefficientSize(u64),
}

impl FieldError {
    pub fn is_resource(&self) -> bool {
        matches!(self, FieldError::HeightCap(_) | FieldError::CoefficientSize(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rational(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn from_i8(v: i8) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        Sign::from_i8(self.to_i8() * other.to_i8())
    }

    pub fn flip(self) -> Sign {
        Sign::from_i8(-self.to_i8())
    }

    pub fn to_ordering(self) -> Ordering {
        self.to_i8().cmp(&0)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Negative => f.write_str("-1"),
            Sign::Zero => f.write_str("0"),
            Sign::Positive => f.write_str("+1"),
        }
    }
}

static NEXT_SESSION: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Default)]
struct Tower {
    radicands: Vec<Arc<Vec<Rational>>>,
    depths: Vec<usize>,
}

#[derive(Debug)]
struct SessionInner {
    id: u64,
    height_cap: usize,
    coefficient_bits: u64,
    tower: RwLock<Tower>,
    extend: Mutex<()>,
    roots: SqrtTable,
}

/// Owner of a quadratic tower. Cheap to clone; clones share the tower.
#[derive(Clone, Debug)]
pub struct Session {
    inner: Arc<SessionInner>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Session {
    pub fn new() -> Session {
        Session::with_height_cap(DEFAULT_HEIGHT_CAP)
    }

    /// Session whose cap is read from `EUCLID_HEIGHT_CAP`, falling back to
    /// the default.
    pub fn from_env() -> Session {
        let cap = std::env::var(HEIGHT_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_HEIGHT_CAP);
        Session::with_height_cap(cap)
    }

    pub fn with_height_cap(height_cap: usize) -> Session {
        Session {
            inner: Arc::new(SessionInner {
                id: NEXT_SESSION.fetch_add(1, AtomicOrdering::Relaxed),
                height_cap,
                coefficient_bits: DEFAULT_COEFFICIENT_BITS,
                tower: RwLock::new(Tower::default()),
                extend: Mutex::new(()),
                roots: SqrtTable::default(),
            }),
        }
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn height_cap(&self) -> usize {
        self.inner.height_cap
    }

    /// Number of radicands appended so far.
    pub fn height(&self) -> usize {
        self.tower().radicands.len()
    }

    pub fn same(&self, other: &Session) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// The radicand `r_i` (1-based) as an element of this session.
    pub fn radicand(&self, i: usize) -> Option<Real> {
        let coeffs = self.tower().radicands.get(i.checked_sub(1)?)?.to_vec();
        Some(self.make(coeffs))
    }

    pub fn rational(&self, q: Rational) -> Real {
        self.make(vec![q])
    }

    pub fn integer(&self, n: i64) -> Real {
        self.rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(&self, n: i64, d: i64) -> Real {
        self.rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero(&self) -> Real {
        self.integer(0)
    }

    pub fn one(&self) -> Real {
        self.integer(1)
    }

    /// Parse a literal such as `(1+sqrt(5))/2` into this session.
    pub fn parse(&self, text: &str) -> Result<Real, LiteralError> {
        parse_real(self, text)
    }

    fn tower(&self) -> std::sync::RwLockReadGuard<'_, Tower> {
        self.inner.tower.read().expect("tower lock poisoned")
    }

    fn radicands(&self) -> Vec<Arc<Vec<Rational>>> {
        self.tower().radicands.clone()
    }

    fn make(&self, coeffs: Vec<Rational>) -> Real {
        Real {
            session: self.clone(),
            coeffs: Arc::new(raw::trim(coeffs)),
        }
    }

    fn check(&self, other: &Session) -> Result<(), FieldError> {
        if self.same(other) {
            Ok(())
        } else {
            Err(FieldError::SessionMismatch(self.id(), other.id()))
        }
    }
}

/// An exact constructible real, owned by a [`Session`].
#[derive(Clone)]
pub struct Real {
    session: Session,
    coeffs: Arc<Vec<Rational>>,
}

impl Real {
    pub fn session(&self) -> &Session {
        &self.session
    }

    /// Depth of the coefficient tree: the index of the highest radicand used.
    pub fn level(&self) -> usize {
        raw::level_of(self.coeffs.len())
    }

    /// Coefficients in tower order (lower half `a`, upper half `b`, recursively).
    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Nesting depth of square roots needed to write this value, as opposed
    /// to [`Real::level`], which counts tower positions.
    pub fn radical_depth(&self) -> usize {
        let tower = self.session.tower();
        let mut depth = 0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut bits = idx;
            let mut level = 1;
            while bits > 0 {
                if bits & 1 == 1 {
                    depth = depth.max(1 + tower.depths[level - 1]);
                }
                bits >>= 1;
                level += 1;
            }
        }
        depth
    }

    pub fn is_zero(&self) -> bool {
        raw::is_zero(&self.coeffs)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        (self.coeffs.len() == 1).then(|| &self.coeffs[0])
    }

    pub fn sign(&self) -> Sign {
        let rads = self.session.radicands();
        raw::sign(&self.coeffs, &rads, &self.session.inner.roots)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    /// Exact comparison. Panics on operands from different sessions.
    pub fn cmp_exact(&self, other: &Real) -> Ordering {
        (self - other).sign().to_ordering()
    }

    pub fn checked_add(&self, other: &Real) -> Result<Real, FieldError> {
        self.session.check(&other.session)?;
        Ok(self.session.make(raw::add(&self.coeffs, &other.coeffs)))
    }

    pub fn checked_sub(&self, other: &Real) -> Result<Real, FieldError> {
        self.session.check(&other.session)?;
        Ok(self.session.make(raw::sub(&self.coeffs, &other.coeffs)))
    }

    pub fn checked_mul(&self, other: &Real) -> Result<Real, FieldError> {
        self.session.check(&other.session)?;
        let rads = self.session.radicands();
        Ok(self.session.make(raw::mul(&self.coeffs, &other.coeffs, &rads)))
    }

    pub fn checked_div(&self, other: &Real) -> Result<Real, FieldError> {
        self.session.check(&other.session)?;
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Real, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let rads = self.session.radicands();
        Ok(self.session.make(raw::inv(&self.coeffs, &rads)))
    }

    pub fn square(&self) -> Real {
        self * self
    }

    pub fn scale(&self, q: &Rational) -> Real {
        self.session.make(raw::scale(&self.coeffs, q))
    }

    /// Square root in the current tower, if one exists; never extends the tower.
    pub fn try_sqrt_in_field(&self) -> Option<Real> {
        let rads = self.session.radicands();
        let padded = raw::pad(self.coeffs.to_vec(), 1 << rads.len());
        let root = raw::try_sqrt(&padded, &rads, &self.session.inner.roots)?;
        let root = self.session.make(root);
        Some(if root.is_negative() { -&root } else { root })
    }

    /// Square root inside `F_level` (the first `level` radicands), if any.
    pub fn try_sqrt_at_level(&self, level: usize) -> Option<Real> {
        if self.level() > level {
            return None;
        }
        let rads = self.session.radicands();
        let padded = raw::pad(self.coeffs.to_vec(), 1 << level);
        let root = raw::try_sqrt(&padded, &rads, &self.session.inner.roots)?;
        let root = self.session.make(root);
        Some(if root.is_negative() { -&root } else { root })
    }

    /// Nonnegative square root. Appends a radicand only when no root exists
    /// in the current tower.
    pub fn sqrt(&self) -> Result<Real, FieldError> {
        match self.sign() {
            Sign::Negative => return Err(FieldError::NegativeSqrt),
            Sign::Zero => return Ok(self.session.zero()),
            Sign::Positive => {}
        }
        let inner = &self.session.inner;
        let _guard = inner.extend.lock().expect("extension lock poisoned");
        if let Some(root) = self.try_sqrt_in_field() {
            return Ok(root);
        }
        let bits = self.coefficient_bits();
        if bits > inner.coefficient_bits {
            return Err(FieldError::CoefficientSize(bits));
        }
        let mut tower = inner.tower.write().expect("tower lock poisoned");
        let height = tower.radicands.len();
        if height >= inner.height_cap {
            return Err(FieldError::HeightCap(inner.height_cap));
        }
        let depth = self.radical_depth_in(&tower);
        tower.radicands.push(self.coeffs.clone());
        tower.depths.push(depth);
        drop(tower);
        let mut coeffs = raw::zeros(1 << (height + 1));
        coeffs[1 << height] = Rational::one();
        Ok(self.session.make(coeffs))
    }

    fn radical_depth_in(&self, tower: &Tower) -> usize {
        let mut depth = 0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for level in 1..=self.level() {
                if idx >> (level - 1) & 1 == 1 {
                    depth = depth.max(1 + tower.depths[level - 1]);
                }
            }
        }
        depth
    }

    fn coefficient_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|q| q.numer().bits() + q.denom().bits())
            .sum()
    }

    /// Integer polynomial of degree `2^level` (ascending coefficients, content
    /// one, positive leading coefficient) with this value as a root: the
    /// product of `X - x'` over all sign choices of the radicals.
    pub fn char_poly(&self) -> Result<Vec<BigInt>, FieldError> {
        self.char_poly_capped(self.session.height_cap())
    }

    pub fn char_poly_capped(&self, max_level: usize) -> Result<Vec<BigInt>, FieldError> {
        let level = self.level();
        if level > max_level {
            return Err(FieldError::HeightCap(max_level));
        }
        let rads = self.session.radicands();
        let len = self.coeffs.len();
        // P(X) = X - x, coefficients ascending.
        let mut poly: Vec<Vec<Rational>> = vec![
            raw::neg(&self.coeffs),
            raw::pad(vec![Rational::one()], len),
        ];
        let mut width = len;
        while width > 1 {
            let conj: Vec<Vec<Rational>> = poly.iter().map(|c| raw::conjugate_top(c)).collect();
            let mut prod = vec![raw::zeros(width); poly.len() + conj.len() - 1];
            for (i, a) in poly.iter().enumerate() {
                for (j, b) in conj.iter().enumerate() {
                    let term = raw::mul(a, b, &rads);
                    prod[i + j] = raw::add(&prod[i + j], &term);
                }
            }
            width /= 2;
            poly = prod
                .into_iter()
                .map(|c| {
                    debug_assert!(raw::is_zero(&c[width..]));
                    c[..width].to_vec()
                })
                .collect();
        }
        let rationals: Vec<Rational> = poly.into_iter().map(|c| c[0].clone()).collect();
        Ok(clear_denominators(&rationals))
    }

    /// Dyadic interval `[lo, hi]` containing the value, of width at most
    /// `2^-k`. Intervals for increasing `k` are nested.
    pub fn approx(&self, k: u32) -> (Rational, Rational) {
        let grid = k + 2;
        let unit = Rational::from_integer(BigInt::one() << grid);
        let rads = self.session.radicands();
        let table = &self.session.inner.roots;
        let mut p = grid + 16;
        let m = loop {
            let (lo, hi) = interval::bracket(&self.coeffs, &rads, table, p);
            let mlo = (&lo * &unit).floor().to_integer();
            let mhi = (&hi * &unit).floor().to_integer();
            if mlo == mhi {
                break mlo;
            }
            if &mhi - &mlo == BigInt::one() {
                let edge = self.session.rational(Rational::new(mhi.clone(), unit.to_integer()));
                break if (self - &edge).sign() == Sign::Negative {
                    mlo
                } else {
                    mhi
                };
            }
            p *= 2;
        };
        let denom = unit.to_integer();
        (
            Rational::new(&m - 1, denom.clone()),
            Rational::new(m + 2, denom),
        )
    }

    /// Approximate value, for rendering and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.approx(52);
        let mid = (lo + hi) / Rational::from_integer(BigInt::from(2));
        rational_to_f64(&mid)
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Scale rational coefficients to coprime integers with a positive leading
/// coefficient.
pub fn clear_denominators(coeffs: &[Rational]) -> Vec<BigInt> {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !content.is_zero() {
        for c in &mut ints {
            *c = &*c / &content;
        }
    }
    if ints.last().map_or(false, |c| c.is_negative()) {
        for c in &mut ints {
            *c = -&*c;
        }
    }
    ints
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.session.same(&other.session) && self.coeffs == other.coeffs
    }
}

impl Eq for Real {}

impl Hash for Real {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.session.id().hash(state);
        self.coeffs.hash(state);
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            /// Panics when the operands belong to different sessions; use the
            /// `checked_*` form to get an error instead.
            fn $method(self, rhs: &Real) -> Real {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.session.make(raw::neg(&self.coeffs))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

fn fmt_coeffs(coeffs: &[Rational], rads: &[Arc<Vec<Rational>>], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if coeffs.len() == 1 {
        return write!(f, "{}", coeffs[0]);
    }
    let h = coeffs.len() / 2;
    let (a, b) = coeffs.split_at(h);
    let a = raw::trim(a.to_vec());
    let b = raw::trim(b.to_vec());
    let r = &rads[raw::level_of(coeffs.len()) - 1];
    let a_zero = raw::is_zero(&a);
    if !a_zero {
        fmt_coeffs(&a, rads, f)?;
        f.write_str(" + ")?;
    }
    if b.len() == 1 && b[0].is_one() {
        // bare radical
    } else if b.len() == 1 {
        write!(f, "{}*", b[0])?;
    } else {
        f.write_str("(")?;
        fmt_coeffs(&b, rads, f)?;
        f.write_str(")*")?;
    }
    f.write_str("sqrt(")?;
    fmt_coeffs(r, rads, f)?;
    f.write_str(")")
}

/// Parseable form, e.g. `1/2 + 3/2*sqrt(3)`.
impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rads = self.session.radicands();
        fmt_coeffs(&self.coeffs, &rads, f)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({self})")
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
