//! Class numbers by enumeration of reduced forms, prime forms, and exact
//! orders of ideal classes.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::arith::{factorize, factorize_u64, is_prime, kronecker, sqrt_mod, ArithError};
use crate::quadform::{validate_discriminant, FormError, QuadForm};

/// Largest `|Δ|` accepted by the enumerators. Beyond this the `√|Δ|`
/// loop is out of reach anyway, and every intermediate fits in `u64`.
pub const MAX_ENUM_DISCRIMINANT: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassGroupError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("|Δ| = {0} exceeds the enumeration limit 2^62")]
    TooLarge(BigInt),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("{p} ramifies in discriminant {delta}")]
    Ramified { delta: BigInt, p: BigInt },
    #[error("{p} does not split in discriminant {delta}")]
    NotSplit { delta: BigInt, p: BigInt },
    #[error("{multiple} is not a multiple of the order of {form}")]
    NotAMultiple { form: QuadForm, multiple: u64 },
    #[error("order of {form} exceeds {cap}")]
    OrderExceedsCap { form: QuadForm, cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Iterate the leading coefficient, solve `B^2 ≡ Δ (mod 4A)`.
    EnumByA,
    /// Iterate the middle coefficient, split `(B^2 - Δ)/4` into `A·C`.
    EnumByB,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassNumberResult {
    pub delta: BigInt,
    pub h: u64,
    pub method: Method,
}

fn enum_bound(delta: &BigInt) -> Result<(i64, u64), ClassGroupError> {
    validate_discriminant(delta)?;
    let abs = delta
        .abs()
        .to_u64()
        .filter(|&v| v <= MAX_ENUM_DISCRIMINANT)
        .ok_or_else(|| ClassGroupError::TooLarge(delta.abs()))?;
    Ok((-(abs as i64), (abs / 3).sqrt()))
}

/// Class number of the (possibly non-fundamental) discriminant `delta`.
pub fn class_number(delta: &BigInt) -> Result<ClassNumberResult, ClassGroupError> {
    class_number_with(delta, Method::EnumByA)
}

pub fn class_number_with(delta: &BigInt, method: Method) -> Result<ClassNumberResult, ClassGroupError> {
    let (d, a_max) = enum_bound(delta)?;
    let mut h = 0u64;
    match method {
        Method::EnumByA => for_each_by_a(d, a_max, |_, _, _| h += 1),
        Method::EnumByB => for_each_by_b(d, a_max, |_, _, _| h += 1)?,
    }
    Ok(ClassNumberResult {
        delta: delta.clone(),
        h,
        method,
    })
}

/// Every reduced primitive form of discriminant `delta`, sorted.
pub fn reduced_forms(delta: &BigInt) -> Result<Vec<QuadForm>, ClassGroupError> {
    let (d, a_max) = enum_bound(delta)?;
    let mut out = Vec::new();
    for_each_by_a(d, a_max, |a, b, c| {
        out.push(QuadForm::from_parts(a.into(), b.into(), c.into()))
    });
    out.sort();
    Ok(out)
}

/// Smallest-prime-factor table for `0..=limit`.
fn spf_sieve(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn factor_with_sieve(mut n: u64, spf: &[u32], out: &mut Vec<(u64, u32)>) {
    out.clear();
    while n > 1 {
        let p = spf[n as usize] as u64;
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p, e));
    }
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    a.gcd(&b).gcd(&c)
}

fn for_each_by_a(delta: i64, a_max: u64, mut emit: impl FnMut(i64, i64, i64)) {
    if a_max == 0 {
        return;
    }
    let abs = delta.unsigned_abs();
    let spf = spf_sieve(4 * a_max as usize);
    let mut factors = Vec::new();
    for a in 1..=a_max {
        let four_a = 4 * a;
        factor_with_sieve(four_a, &spf, &mut factors);
        let target = delta.rem_euclid(four_a as i64) as u64;
        for r in crate::arith::sqrt_mod_u64(target, four_a, &factors) {
            // Residues mod 4A map one-to-one onto B in (-A, A].
            let b = if r <= a {
                r as i64
            } else if r > 3 * a {
                r as i64 - four_a as i64
            } else {
                continue;
            };
            let b_abs = b.unsigned_abs();
            let c = (b_abs as u128 * b_abs as u128 + abs as u128) / four_a as u128;
            let c = c as u64;
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd3(a, b_abs, c) != 1 {
                continue;
            }
            emit(a as i64, b, c as i64);
        }
    }
}

fn for_each_by_b(delta: i64, a_max: u64, mut emit: impl FnMut(i64, i64, i64)) -> Result<(), ClassGroupError> {
    let abs = delta.unsigned_abs();
    let start = abs % 2;
    for b in (start..=a_max).step_by(2) {
        let n = (b * b + abs) / 4;
        let divisors = divisors_u64(&factorize_u64(n)?);
        for &a in divisors.iter().filter(|&&a| a >= b.max(1) && a * a <= n) {
            let c = n / a;
            if gcd3(a, b, c) != 1 {
                continue;
            }
            emit(a as i64, b as i64, c as i64);
            if b != 0 && b != a && a != c {
                emit(a as i64, -(b as i64), c as i64);
            }
        }
    }
    Ok(())
}

fn divisors_u64(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs
}

/// Reduced class of `(p, B, (B^2 - Δ)/(4p))` for the least `B >= 0` with
/// `B^2 ≡ Δ (mod 4p)`. The other root gives the inverse class.
pub fn prime_form(delta: &BigInt, p: &BigInt) -> Result<QuadForm, ClassGroupError> {
    validate_discriminant(delta)?;
    if !is_prime(p) {
        return Err(ClassGroupError::NotPrime(p.clone()));
    }
    match kronecker(delta, p) {
        0 => {
            return Err(ClassGroupError::Ramified {
                delta: delta.clone(),
                p: p.clone(),
            })
        }
        -1 => {
            return Err(ClassGroupError::NotSplit {
                delta: delta.clone(),
                p: p.clone(),
            })
        }
        _ => {}
    }
    let four_p: BigInt = p * 4;
    let fact = factorize(&four_p)?;
    let b = sqrt_mod(delta, &four_p, &fact)
        .into_iter()
        .next()
        .expect("a split prime always has a root");
    let c = (&b * &b - delta) / &four_p;
    Ok(QuadForm::new(p.clone(), b, c)?.reduce())
}

/// Exact order of `f`, given a known multiple of it. Divisors of
/// `multiple` are tried in increasing order.
pub fn class_order(f: &QuadForm, multiple: u64) -> Result<u64, ClassGroupError> {
    if multiple == 0 || !f.power(multiple).is_principal() {
        return Err(ClassGroupError::NotAMultiple {
            form: f.clone(),
            multiple,
        });
    }
    let divisors = {
        let mut d = divisors_u64(&factorize_u64(multiple)?);
        d.sort_unstable();
        d
    };
    Ok(divisors
        .into_iter()
        .find(|&m| f.power(m).is_principal())
        .expect("multiple itself qualifies"))
}

/// Least `m <= cap` with `f^m` principal, by repeated composition.
pub fn class_order_unbounded(f: &QuadForm, cap: u64) -> Result<u64, ClassGroupError> {
    let base = f.reduce();
    let mut acc = base.clone();
    for m in 1..=cap {
        if acc.is_principal() {
            return Ok(m);
        }
        acc = acc.compose(&base)?;
    }
    Err(ClassGroupError::OrderExceedsCap { form: base, cap })
}
