//! Positive definite binary quadratic forms `Ax^2 + Bxy + Cy^2` as
//! representatives of ideal classes in imaginary quadratic orders.
//!
//! Reduced forms satisfy `|B| <= A <= C` with `B >= 0` whenever `|B| = A`
//! or `A = C`, which makes the reduced representative of a class unique:
//! equal classes compare equal as values.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("discriminant {0} is not negative")]
    NotNegativeDiscriminant(BigInt),
    #[error("leading coefficient {0} is not positive")]
    NotPositiveDefinite(BigInt),
    #[error("form ({0}, {1}, {2}) is not primitive")]
    Imprimitive(BigInt, BigInt, BigInt),
    #[error("{0} is not a negative discriminant (must be < 0 and ≡ 0, 1 mod 4)")]
    InvalidDiscriminant(BigInt),
    #[error("cannot compose forms of discriminants {0} and {1}")]
    DiscriminantMismatch(BigInt, BigInt),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Checks `delta < 0` and `delta ≡ 0, 1 (mod 4)`.
pub fn validate_discriminant(delta: &BigInt) -> Result<(), FormError> {
    let r = delta.mod_floor(&BigInt::from(4));
    if delta.sign() != Sign::Minus || !(r.is_zero() || r.is_one()) {
        return Err(FormError::InvalidDiscriminant(delta.clone()));
    }
    Ok(())
}

impl QuadForm {
    /// Builds a primitive positive definite form.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self, FormError> {
        let f = QuadForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        };
        let delta = f.discriminant();
        if delta.sign() != Sign::Minus {
            return Err(FormError::NotNegativeDiscriminant(delta));
        }
        if f.a.sign() != Sign::Plus {
            return Err(FormError::NotPositiveDefinite(f.a));
        }
        if !f.a.gcd(&f.b).gcd(&f.c).is_one() {
            return Err(FormError::Imprimitive(f.a, f.b, f.c));
        }
        Ok(f)
    }

    /// Internal constructor for forms known to satisfy the invariants.
    pub(crate) fn from_parts(a: BigInt, b: BigInt, c: BigInt) -> Self {
        debug_assert!(a.sign() == Sign::Plus);
        QuadForm { a, b, c }
    }

    /// The identity class: `(1, 0, -Δ/4)` or `(1, 1, (1-Δ)/4)`.
    pub fn principal(delta: &BigInt) -> Result<Self, FormError> {
        validate_discriminant(delta)?;
        let b = if delta.is_even() { BigInt::zero() } else { BigInt::one() };
        let c = (&b - delta) / 4;
        Ok(QuadForm::from_parts(BigInt::one(), b, c))
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_reduced(&self) -> bool {
        let abs_b = self.b.abs();
        if abs_b > self.a || self.a > self.c {
            return false;
        }
        if abs_b == self.a || self.a == self.c {
            return self.b.sign() != Sign::Minus;
        }
        true
    }

    /// The unique reduced form properly equivalent to `self`.
    pub fn reduce(&self) -> QuadForm {
        let (mut a, mut b, mut c) = (self.a.clone(), self.b.clone(), self.c.clone());
        let two_a = |a: &BigInt| a << 1;
        loop {
            // Translate B into (-A, A] via x -> x + k y.
            if b > a || -&b >= a {
                let k = (&a - &b).div_floor(&two_a(&a));
                c = &a * &k * &k + &b * &k + &c;
                b += two_a(&a) * &k;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b.sign() == Sign::Minus {
                b = -b;
            }
            return QuadForm::from_parts(a, b, c);
        }
    }

    /// Gauss composition of the two classes, reduced.
    pub fn compose(&self, other: &QuadForm) -> Result<QuadForm, FormError> {
        let delta = self.discriminant();
        let other_delta = other.discriminant();
        if delta != other_delta {
            return Err(FormError::DiscriminantMismatch(delta, other_delta));
        }
        Ok(compose_unreduced(self, other).reduce())
    }

    /// `self^e` by square-and-multiply; `e = 0` gives the principal form.
    pub fn power(&self, e: u64) -> QuadForm {
        let delta = self.discriminant();
        let mut result = QuadForm::principal(&delta).expect("forms carry valid discriminants");
        let mut base = self.reduce();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = compose_unreduced(&result, &base).reduce();
            }
            e >>= 1;
            if e > 0 {
                base = compose_unreduced(&base, &base).reduce();
            }
        }
        result
    }

    /// Reduced form of `(A, -B, C)`.
    pub fn inverse(&self) -> QuadForm {
        QuadForm::from_parts(self.a.clone(), -&self.b, self.c.clone()).reduce()
    }

    pub fn is_principal(&self) -> bool {
        let delta = self.discriminant();
        QuadForm::principal(&delta).is_ok_and(|id| self.reduce() == id)
    }
}

/// Extended gcd: `(g, x, y)` with `g = gcd(a, b) = a x + b y`, `g >= 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.sign() == Sign::Minus {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Composition of two forms of equal discriminant, unreduced.
///
/// Follows the classical united-forms construction: with
/// `s = (B1 + B2)/2`, find `d1 = gcd(A1, A2, s)` and Bezout data so the
/// composite is `(A1 A2 / d1^2, B2 + 2 (A2/d1) r, ...)`.
fn compose_unreduced(f1: &QuadForm, f2: &QuadForm) -> QuadForm {
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let delta = f1.discriminant();
    let s: BigInt = (&f1.b + &f2.b) >> 1;
    let n = &f2.b - &s;

    let (y1, d) = if f2.a.is_multiple_of(&f1.a) {
        (BigInt::zero(), f1.a.clone())
    } else {
        let (d, u, _v) = ext_gcd(&f2.a, &f1.a);
        (u, d)
    };

    let (x2, y2, d1) = if s.is_multiple_of(&d) {
        (BigInt::zero(), -BigInt::one(), d)
    } else {
        let (d1, x2, y2) = ext_gcd(&s, &d);
        (x2, -y2, d1)
    };

    let v1 = &f1.a / &d1;
    let v2 = &f2.a / &d1;
    let r = (&y1 * &y2 * &n - &x2 * &f2.c).mod_floor(&v1);
    let b3 = &f2.b + BigInt::from(2) * &v2 * &r;
    let a3 = &v1 * &v2;
    let c3 = (&b3 * &b3 - &delta) / (BigInt::from(4) * &a3);
    QuadForm::from_parts(a3, b3, c3)
}
