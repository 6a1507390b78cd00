//! Unsigned integer backends shared by the modular routines.
//!
//! Every algorithm in `arith` is written once against [`Word`] and
//! instantiated twice: with `u128` for moduli below 2^64 (products of two
//! residues then fit without overflow) and with `BigUint` for everything
//! larger.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{FromPrimitive, ToPrimitive};

pub(crate) trait Word: Clone + Ord + Debug + Integer + FromPrimitive + ToPrimitive {
    /// Probable-primality test appropriate for the backend's range.
    fn probable_prime(&self) -> bool;

    fn small(v: u64) -> Self {
        Self::from_u64(v).expect("u64 fits every backend")
    }
}

impl Word for u128 {
    fn probable_prime(&self) -> bool {
        super::prime::is_prime_u64(u64::try_from(*self).expect("u128 backend holds values below 2^64"))
    }
}

impl Word for BigUint {
    fn probable_prime(&self) -> bool {
        super::prime::is_prime_biguint(self)
    }
}

pub(crate) fn mul_mod<T: Word>(a: &T, b: &T, m: &T) -> T {
    (a.clone() * b.clone()) % m.clone()
}

pub(crate) fn add_mod<T: Word>(a: &T, b: &T, m: &T) -> T {
    (a.clone() + b.clone()) % m.clone()
}

/// `(a - b) mod m` for `a, b` already reduced mod `m`.
pub(crate) fn sub_mod<T: Word>(a: &T, b: &T, m: &T) -> T {
    if a >= b {
        a.clone() - b.clone()
    } else {
        m.clone() - (b.clone() - a.clone())
    }
}

pub(crate) fn pow_mod<T: Word>(base: &T, exp: &T, m: &T) -> T {
    if m.is_one() {
        return T::zero();
    }
    let two = T::small(2);
    let mut result = T::one();
    let mut b = base.clone() % m.clone();
    let mut e = exp.clone();
    while !e.is_zero() {
        if e.is_odd() {
            result = mul_mod(&result, &b, m);
        }
        b = mul_mod(&b, &b, m);
        e = e / two.clone();
    }
    result
}

pub(crate) fn pow<T: Word>(base: &T, exp: u32) -> T {
    let mut result = T::one();
    for _ in 0..exp {
        result = result * base.clone();
    }
    result
}

/// Inverse of `a` modulo `m`, or `None` when `gcd(a, m) != 1`.
///
/// Bezout coefficients are carried modulo `m` so the computation never
/// leaves the unsigned domain.
pub(crate) fn inv_mod<T: Word>(a: &T, m: &T) -> Option<T> {
    if m.is_one() {
        return Some(T::zero());
    }
    let (mut old_r, mut r) = (a.clone() % m.clone(), m.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    while !r.is_zero() {
        let (q, rem) = old_r.div_rem(&r);
        old_r = std::mem::replace(&mut r, rem);
        let qs = mul_mod(&(q % m.clone()), &s, m);
        let next = sub_mod(&old_s, &qs, m);
        old_s = std::mem::replace(&mut s, next);
    }
    old_r.is_one().then_some(old_s)
}

pub(crate) fn abs_diff<T: Word>(a: &T, b: &T) -> T {
    if a >= b {
        a.clone() - b.clone()
    } else {
        b.clone() - a.clone()
    }
}
