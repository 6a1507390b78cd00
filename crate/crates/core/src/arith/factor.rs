//! Integer factorization: trial division by small primes, then Brent's
//! variant of Pollard rho on the remaining cofactor, recursing on both
//! halves of every split.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::word::{abs_diff, add_mod, mul_mod, Word};
use super::ArithError;

/// Default rho iteration budget per cofactor.
pub const DEFAULT_RHO_CAP: u64 = 10_000_000;

const TRIAL_LIMIT: u64 = 1 << 10;

/// Complete prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: BigInt,
    factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Multiplies the factors back together.
    pub fn product(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |acc, (p, e)| {
            acc * num_traits::pow(p.clone(), *e as usize)
        })
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<BigInt> {
        let mut divs = vec![BigInt::one()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
            for d in &divs {
                let mut pk = d.clone();
                next.push(pk.clone());
                for _ in 0..*e {
                    pk *= p;
                    next.push(pk.clone());
                }
            }
            divs = next;
        }
        divs.sort();
        divs
    }

    pub(crate) fn from_u64_factors(value: u64, factors: &[(u64, u32)]) -> Self {
        Factorization {
            value: BigInt::from(value),
            factors: factors.iter().map(|&(p, e)| (BigInt::from(p), e)).collect(),
        }
    }

    /// Factor list narrowed to `u64`, when every prime fits.
    pub fn to_u64_factors(&self) -> Option<Vec<(u64, u32)>> {
        self.factors.iter().map(|(p, e)| p.to_u64().map(|p| (p, *e))).collect()
    }
}

/// Factors `n >= 1` with the default rho budget.
pub fn factorize(n: &BigInt) -> Result<Factorization, ArithError> {
    factorize_with_cap(n, DEFAULT_RHO_CAP)
}

/// Factors `n >= 1`; each composite cofactor gets at most `cap` rho steps.
pub fn factorize_with_cap(n: &BigInt, cap: u64) -> Result<Factorization, ArithError> {
    if n.sign() != Sign::Plus {
        return Err(ArithError::NotPositive(n.clone()));
    }
    if let Some(v) = n.to_u64() {
        let factors = factorize_u64_with_cap(v, cap)?;
        return Ok(Factorization::from_u64_factors(v, &factors));
    }
    let mut primes: Vec<BigUint> = Vec::new();
    let rest = strip_small(n.magnitude().clone(), &mut primes);
    split_fully(rest, cap, &mut primes).map_err(|c| ArithError::FactorizationExhausted(BigInt::from(c)))?;
    Ok(Factorization {
        value: n.clone(),
        factors: collect(primes.into_iter().map(BigInt::from).collect()),
    })
}

/// `u64` fast path of [`factorize`]; `n = 1` gives an empty list.
pub fn factorize_u64(n: u64) -> Result<Vec<(u64, u32)>, ArithError> {
    factorize_u64_with_cap(n, DEFAULT_RHO_CAP)
}

pub fn factorize_u64_with_cap(n: u64, cap: u64) -> Result<Vec<(u64, u32)>, ArithError> {
    if n == 0 {
        return Err(ArithError::NotPositive(BigInt::zero()));
    }
    let mut primes: Vec<u64> = Vec::new();
    let mut rest = n;
    while rest % 2 == 0 {
        primes.push(2);
        rest /= 2;
    }
    let mut q = 3;
    while q < TRIAL_LIMIT && q * q <= rest {
        while rest % q == 0 {
            primes.push(q);
            rest /= q;
        }
        q += 2;
    }
    if rest > 1 && rest < TRIAL_LIMIT * TRIAL_LIMIT {
        primes.push(rest);
    } else if rest > 1 {
        let mut big = Vec::new();
        split_fully(rest as u128, cap, &mut big).map_err(|c| ArithError::FactorizationExhausted(BigInt::from(c)))?;
        primes.extend(big.into_iter().map(|p| p as u64));
    }
    Ok(collect(primes))
}

fn strip_small(mut n: BigUint, primes: &mut Vec<BigUint>) -> BigUint {
    let mut q = 2u64;
    while q < TRIAL_LIMIT {
        let big_q = BigUint::from(q);
        loop {
            let (quot, rem) = n.div_rem(&big_q);
            if !rem.is_zero() {
                break;
            }
            primes.push(big_q.clone());
            n = quot;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    n
}

fn collect<T: Ord + Clone>(mut primes: Vec<T>) -> Vec<(T, u32)> {
    primes.sort();
    let mut out: Vec<(T, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((last, e)) if *last == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Splits `n` (free of factors below the trial limit) into primes.
/// On failure returns the cofactor that resisted.
fn split_fully<T: Word>(n: T, cap: u64, out: &mut Vec<T>) -> Result<(), T> {
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m.probable_prime() {
            out.push(m);
            continue;
        }
        let root = exact_sqrt(&m);
        let d = match root {
            Some(r) => r,
            None => pollard_brent(&m, cap).ok_or_else(|| m.clone())?,
        };
        let other = m / d.clone();
        stack.push(d);
        stack.push(other);
    }
    Ok(())
}

fn exact_sqrt<T: Word>(n: &T) -> Option<T> {
    // Newton iteration; `Roots` is not implemented for every backend.
    if n.is_zero() {
        return Some(T::zero());
    }
    let two = T::small(2);
    let mut x = n.clone();
    let mut y = (x.clone() + T::one()) / two.clone();
    while y < x {
        x = y;
        y = (x.clone() + n.clone() / x.clone()) / two.clone();
    }
    (x.clone() * x.clone() == *n).then_some(x)
}

/// Brent's cycle-finding rho on an odd composite `n`. Returns a proper
/// divisor, or `None` once `cap` iterations are spent across all
/// polynomial constants tried.
fn pollard_brent<T: Word>(n: &T, cap: u64) -> Option<T> {
    if n.is_even() {
        return Some(T::small(2));
    }
    const BATCH: u64 = 128;
    let one = T::one();
    let mut steps = 0u64;
    let mut c = 1u64;
    while steps < cap {
        let cc = T::small(c);
        let f = |v: &T| add_mod(&mul_mod(v, v, n), &cc, n);
        let mut y = T::small(2) % n.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = one.clone();
        let mut g = one.clone();
        let mut r = 1u64;
        while g.is_one() && steps < cap {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = BATCH.min(r - k);
                for _ in 0..batch {
                    y = f(&y);
                    q = mul_mod(&q, &abs_diff(&x, &y), n);
                }
                g = q.gcd(n);
                k += batch;
                steps += batch;
            }
            r *= 2;
        }
        if g == *n {
            // The batch overshot; replay it one step at a time.
            loop {
                ys = f(&ys);
                g = abs_diff(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
        c += 1;
    }
    None
}

/// Integer square root of a non-negative `BigInt` when it is exact.
pub fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}
