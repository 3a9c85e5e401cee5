//! Fixed-point interval evaluation of tower elements.
//!
//! Values are bracketed by integers scaled by `2^p`. Bounds are always
//! rounded outward, so a bracket that excludes zero decides the sign.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::raw::{is_zero, level_of, Radicands};
use super::{Rational, Sign};

const QUICK_PRECISIONS: [u32; 2] = [64, 320];

#[derive(Clone, Debug)]
pub(crate) struct Fx {
    pub lo: BigInt,
    pub hi: BigInt,
}

fn pow2(p: u32) -> BigInt {
    BigInt::one() << p
}

impl Fx {
    pub fn from_rational(q: &Rational, p: u32) -> Fx {
        let scaled = q.numer() << p;
        let (lo, rem) = scaled.div_mod_floor(q.denom());
        let hi = if rem.is_zero() { lo.clone() } else { &lo + 1 };
        Fx { lo, hi }
    }

    fn add(&self, o: &Fx) -> Fx {
        Fx {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn mul(&self, o: &Fx, p: u32) -> Fx {
        let prods = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let min = prods.iter().min().unwrap();
        let max = prods.iter().max().unwrap();
        let unit = pow2(p);
        Fx {
            lo: min.div_floor(&unit),
            hi: max.div_ceil(&unit),
        }
    }

    fn sqrt(&self, p: u32) -> Fx {
        let lo = if self.lo.sign() == BigSign::Plus {
            (&self.lo << p).sqrt()
        } else {
            BigInt::zero()
        };
        let hi = if self.hi.sign() == BigSign::Plus {
            let scaled = &self.hi << p;
            let s = scaled.sqrt();
            if &s * &s == scaled {
                s
            } else {
                s + 1
            }
        } else {
            BigInt::zero()
        };
        Fx { lo, hi }
    }

    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

/// Cached brackets of `sqrt(r_i)` per precision.
#[derive(Default, Debug)]
pub(crate) struct SqrtTable {
    cache: Mutex<HashMap<u32, Arc<Vec<Fx>>>>,
}

impl SqrtTable {
    /// Brackets for `sqrt(r_1)..sqrt(r_levels)` at precision `p`.
    pub fn roots(&self, p: u32, levels: usize, rads: &Radicands) -> Arc<Vec<Fx>> {
        let mut cache = self.cache.lock().expect("sqrt table poisoned");
        let entry = cache.entry(p).or_insert_with(|| Arc::new(Vec::new()));
        if entry.len() < levels {
            let mut v: Vec<Fx> = entry.as_ref().clone();
            while v.len() < levels {
                let r = &rads[v.len()];
                let bracket = eval(r, &v, p);
                v.push(bracket.sqrt(p));
            }
            *entry = Arc::new(v);
        }
        entry.clone()
    }

    pub fn quick_sign(&self, a: &[Rational], rads: &Radicands) -> Option<Sign> {
        if is_zero(a) {
            return Some(Sign::Zero);
        }
        if a.len() == 1 {
            return Some(Sign::of_rational(&a[0]));
        }
        let levels = level_of(a.len());
        QUICK_PRECISIONS.iter().find_map(|&p| {
            let roots = self.roots(p, levels, rads);
            eval(a, &roots, p).sign()
        })
    }
}

pub(crate) fn eval(a: &[Rational], roots: &[Fx], p: u32) -> Fx {
    if a.len() == 1 {
        return Fx::from_rational(&a[0], p);
    }
    let h = a.len() / 2;
    let (a0, a1) = a.split_at(h);
    let lo = eval(a0, roots, p);
    if is_zero(a1) {
        return lo;
    }
    let hi = eval(a1, roots, p).mul(&roots[level_of(a.len()) - 1], p);
    lo.add(&hi)
}

/// Bracket `[lo, hi]` (as rationals) at precision `p`.
pub(crate) fn bracket(a: &[Rational], rads: &Radicands, table: &SqrtTable, p: u32) -> (Rational, Rational) {
    let roots = table.roots(p, level_of(a.len()), rads);
    let fx = eval(a, &roots, p);
    let unit = pow2(p);
    (
        Rational::new(fx.lo, unit.clone()),
        Rational::new(fx.hi, unit),
    )
}
