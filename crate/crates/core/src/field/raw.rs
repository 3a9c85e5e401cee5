//! Coefficient-vector algebra for elements of a quadratic tower.
//!
//! An element of level `L` is a vector of `2^L` rationals. The lower half is
//! the `a` part and the upper half the `b` part of `a + b*sqrt(r_L)`, both
//! elements of level `L - 1`. A shorter vector embeds into a longer one by
//! zero padding, so vectors of different lengths can always be combined.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::SqrtTable;
use super::{Rational, Sign};

/// Radicands `r_1..r_h`, each trimmed to its own level.
pub(crate) type Radicands = [Arc<Vec<Rational>>];

pub(crate) fn level_of(len: usize) -> usize {
    debug_assert!(len.is_power_of_two());
    len.trailing_zeros() as usize
}

pub(crate) fn is_zero(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub(crate) fn zeros(len: usize) -> Vec<Rational> {
    vec![Rational::zero(); len]
}

pub(crate) fn pad(mut a: Vec<Rational>, len: usize) -> Vec<Rational> {
    debug_assert!(a.len() <= len);
    a.resize(len, Rational::zero());
    a
}

/// Drop upper halves that are identically zero.
pub(crate) fn trim(mut a: Vec<Rational>) -> Vec<Rational> {
    while a.len() > 1 {
        let h = a.len() / 2;
        if a[h..].iter().all(Zero::is_zero) {
            a.truncate(h);
        } else {
            break;
        }
    }
    a
}

pub(crate) fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o += s;
    }
    out
}

pub(crate) fn neg(a: &[Rational]) -> Vec<Rational> {
    a.iter().map(|x| -x).collect()
}

pub(crate) fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let len = a.len().max(b.len());
    let mut out = pad(a.to_vec(), len);
    for (o, s) in out.iter_mut().zip(b) {
        *o -= s;
    }
    out
}

pub(crate) fn scale(a: &[Rational], q: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * q).collect()
}

/// Product; the result has the length of the longer operand.
pub(crate) fn mul(a: &[Rational], b: &[Rational], rads: &Radicands) -> Vec<Rational> {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let n = a.len();
    if b.len() == 1 {
        return scale(a, &b[0]);
    }
    if is_zero(a) || is_zero(b) {
        return zeros(n);
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let mut out = Vec::with_capacity(n);
    if b.len() < n {
        out.extend(pad(mul(a0, b, rads), h));
        out.extend(pad(mul(a1, b, rads), h));
        return out;
    }
    let (b0, b1) = b.split_at(h);
    let r = &rads[level_of(n) - 1];
    if is_zero(a1) && is_zero(b1) {
        out.extend(mul(a0, b0, rads));
        out.extend(zeros(h));
        return out;
    }
    let p0 = mul(a0, b0, rads);
    let p1 = mul(a1, b1, rads);
    let sa = add(a0, a1);
    let sb = add(b0, b1);
    let cross = sub(&sub(&mul(&sa, &sb, rads), &p0), &p1);
    let low = add(&p0, &mul(&p1, r, rads));
    out.extend(pad(low, h));
    out.extend(pad(cross, h));
    out
}

/// Multiplicative inverse; `a` must be nonzero.
pub(crate) fn inv(a: &[Rational], rads: &Radicands) -> Vec<Rational> {
    let n = a.len();
    if n == 1 {
        return vec![a[0].recip()];
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    if is_zero(a1) {
        return pad(inv(a0, rads), n);
    }
    let r = &rads[level_of(n) - 1];
    let norm = sub(&mul(a0, a0, rads), &mul(&mul(a1, a1, rads), r, rads));
    let norm_inv = inv(&pad(norm, h), rads);
    let mut out = pad(mul(a0, &norm_inv, rads), h);
    out.extend(pad(neg(&mul(a1, &norm_inv, rads)), h));
    out
}

/// Galois conjugation `sqrt(r_L) -> -sqrt(r_L)` at the top level of `a`.
pub(crate) fn conjugate_top(a: &[Rational]) -> Vec<Rational> {
    let h = a.len() / 2;
    let mut out = a.to_vec();
    for x in &mut out[h..] {
        *x = -&*x;
    }
    out
}

pub(crate) fn sign(a: &[Rational], rads: &Radicands, table: &SqrtTable) -> Sign {
    if let Some(s) = table.quick_sign(a, rads) {
        return s;
    }
    exact_sign(a, rads, table)
}

fn exact_sign(a: &[Rational], rads: &Radicands, table: &SqrtTable) -> Sign {
    let a = trim(a.to_vec());
    if a.len() == 1 {
        return Sign::of_rational(&a[0]);
    }
    let h = a.len() / 2;
    let (a0, a1) = a.split_at(h);
    let s0 = sign(a0, rads, table);
    let s1 = sign(a1, rads, table);
    match (s0, s1) {
        (s, Sign::Zero) | (Sign::Zero, s) => s,
        (x, y) if x == y => x,
        _ => {
            let r = &rads[level_of(a.len()) - 1];
            let d = sub(&mul(a0, a0, rads), &mul(&mul(a1, a1, rads), r, rads));
            s0.times(sign(&d, rads, table))
        }
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer();
    let d = q.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// Square root inside the field of level `level(a)` (the vector length fixes
/// the field, so callers pad to the tower height they care about).
pub(crate) fn try_sqrt(a: &[Rational], rads: &Radicands, table: &SqrtTable) -> Option<Vec<Rational>> {
    let n = a.len();
    if is_zero(a) {
        return Some(zeros(n));
    }
    if sign(a, rads, table) == Sign::Negative {
        return None;
    }
    if n == 1 {
        return rational_sqrt(&a[0]).map(|q| vec![q]);
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let r = pad(rads[level_of(n) - 1].to_vec(), h);
    if is_zero(a1) {
        if let Some(u) = try_sqrt(a0, rads, table) {
            return Some(pad(u, n));
        }
        let quotient = mul(a0, &inv(&r, rads), rads);
        let u = try_sqrt(&pad(quotient, h), rads, table)?;
        let mut out = zeros(h);
        out.extend(pad(u, h));
        return Some(out);
    }
    let disc = sub(&mul(a0, a0, rads), &mul(&mul(a1, a1, rads), &r, rads));
    let root = try_sqrt(&pad(disc, h), rads, table)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    for cand in [add(a0, &root), sub(a0, &root)] {
        let cand = pad(scale(&cand, &half), h);
        if let Some(u) = try_sqrt(&cand, rads, table) {
            if is_zero(&u) {
                continue;
            }
            let two_u = scale(&u, &Rational::from_integer(BigInt::from(2)));
            let v = mul(a1, &inv(&two_u, rads), rads);
            let mut out = pad(u, h);
            out.extend(pad(v, h));
            return Some(out);
        }
    }
    None
}
