//! Bounded solvers for `D1 x^2 + D2 = λ^2 p^y` and membership tests for
//! the families where it may have more than one solution.
//!
//! `λ ∈ {1, √2, 2}` is carried as `λ^2 ∈ {1, 2, 4}` so nothing leaves
//! the integers. Every search here is exhaustive up to an explicit bound;
//! an empty answer means "none within the bound", nothing stronger.

use std::collections::BTreeSet;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{is_prime, perfect_sqrt};

pub const DEFAULT_Y_BOUND: u32 = 60;
pub const DEFAULT_K_BOUND: u32 = 200;
pub const DEFAULT_R_BOUND: u32 = 60;
pub const DEFAULT_S_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DioError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("λ^2 must be 1, 2 or 4, got {0}")]
    BadLambda(BigInt),
    #[error("p = {0} is not prime")]
    NotPrime(BigInt),
    #[error("p = 2 requires λ^2 = 4")]
    EvenPrime,
    #[error("D1 = {d1}, D2 = {d2} and p = {p} must satisfy gcd(D1, D2) = gcd(D1 D2, p) = 1")]
    NotCoprime { d1: BigInt, d2: BigInt, p: BigInt },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lambda {
    One,
    Sqrt2,
    Two,
}

impl Lambda {
    pub fn squared(self) -> u32 {
        match self {
            Lambda::One => 1,
            Lambda::Sqrt2 => 2,
            Lambda::Two => 4,
        }
    }

    pub fn from_squared(v: &BigInt) -> Result<Self, DioError> {
        match u32::try_from(v) {
            Ok(1) => Ok(Lambda::One),
            Ok(2) => Ok(Lambda::Sqrt2),
            Ok(4) => Ok(Lambda::Two),
            _ => Err(DioError::BadLambda(v.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSInstance {
    d1: BigInt,
    d2: BigInt,
    lambda: Lambda,
    p: BigInt,
}

impl BSInstance {
    /// Validates positivity, `p` prime (odd unless `λ = 2`), and the
    /// coprimality `gcd(D1, D2) = gcd(D1 D2, p) = 1`.
    pub fn new(d1: BigInt, d2: BigInt, lambda_sq: &BigInt, p: BigInt) -> Result<Self, DioError> {
        let inst = BSInstance::loose(d1, d2, lambda_sq, p)?;
        if inst.p == BigInt::from(2) && inst.lambda != Lambda::Two {
            return Err(DioError::EvenPrime);
        }
        if !inst.d1.gcd(&inst.d2).is_one() || !(&inst.d1 * &inst.d2).gcd(&inst.p).is_one() {
            return Err(DioError::NotCoprime {
                d1: inst.d1,
                d2: inst.d2,
                p: inst.p,
            });
        }
        Ok(inst)
    }

    /// Positivity, `λ^2` and primality only.
    fn loose(d1: BigInt, d2: BigInt, lambda_sq: &BigInt, p: BigInt) -> Result<Self, DioError> {
        if d1.sign() != Sign::Plus {
            return Err(DioError::NotPositive("D1"));
        }
        if d2.sign() != Sign::Plus {
            return Err(DioError::NotPositive("D2"));
        }
        let lambda = Lambda::from_squared(lambda_sq)?;
        if !is_prime(&p) {
            return Err(DioError::NotPrime(p));
        }
        Ok(BSInstance { d1, d2, lambda, p })
    }

    pub fn d1(&self) -> &BigInt {
        &self.d1
    }

    pub fn d2(&self) -> &BigInt {
        &self.d2
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn lambda_sq(&self) -> u32 {
        self.lambda.squared()
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    InE,
    InF,
    InG,
    InH,
    MissingFromE,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::InE => "InE",
            Tag::InF => "InF",
            Tag::InG => "InG",
            Tag::InH => "InH",
            Tag::MissingFromE => "MissingFromE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DioSolution {
    pub instance: BSInstance,
    /// `(x, y)` sorted by `y`.
    pub solutions: Vec<(BigInt, u32)>,
    pub y_bound: u32,
    pub classification: BTreeSet<Tag>,
}

/// The quadruple missing from the originally published exception list.
pub const MISSING_QUADRUPLE: (u32, u64, u64, u64) = (4, 7, 25, 2);

/// `(λ^2, D1, D2, p)` admitting more than one solution outside the
/// families F, G, H, including [`MISSING_QUADRUPLE`].
pub const EXCEPTIONS_E: [(u32, u64, u64, u64); 8] = [
    (4, 13, 3, 2),
    (2, 7, 11, 3),
    (1, 2, 1, 3),
    (4, 7, 1, 2),
    (2, 1, 1, 5),
    (2, 1, 1, 13),
    (4, 1, 3, 7),
    MISSING_QUADRUPLE,
];

fn matches_quadruple(q: (u32, u64, u64, u64), lambda_sq: u32, d1: &BigInt, d2: &BigInt, p: &BigInt) -> bool {
    q.0 == lambda_sq && *d1 == BigInt::from(q.1) && *d2 == BigInt::from(q.2) && *p == BigInt::from(q.3)
}

pub fn in_e(lambda_sq: u32, d1: &BigInt, d2: &BigInt, p: &BigInt) -> bool {
    EXCEPTIONS_E.iter().any(|&q| matches_quadruple(q, lambda_sq, d1, d2, p))
}

/// Every `(x, y)` with `1 <= y <= y_bound`, `x >= 1`.
pub fn solve_bs(instance: &BSInstance, y_bound: u32) -> DioSolution {
    let lsq = BigInt::from(instance.lambda_sq());
    let mut solutions = Vec::new();
    let mut py = instance.p.clone();
    for y in 1..=y_bound {
        let rhs = &lsq * &py;
        let v = &rhs - &instance.d2;
        if v.sign() == Sign::Plus {
            let (q, r) = v.div_rem(&instance.d1);
            if r.is_zero() {
                if let Some(x) = perfect_sqrt(&q) {
                    assert_eq!(&instance.d1 * &x * &x + &instance.d2, rhs);
                    solutions.push((x, y));
                }
            }
        }
        py *= &instance.p;
    }
    DioSolution {
        classification: classify(instance),
        instance: instance.clone(),
        solutions,
        y_bound,
    }
}

fn classify(inst: &BSInstance) -> BTreeSet<Tag> {
    let lsq = inst.lambda_sq();
    let mut tags = BTreeSet::new();
    if in_e(lsq, &inst.d1, &inst.d2, &inst.p) {
        tags.insert(Tag::InE);
    }
    if matches_quadruple(MISSING_QUADRUPLE, lsq, &inst.d1, &inst.d2, &inst.p) {
        tags.insert(Tag::MissingFromE);
    }
    if in_f(&inst.d1, &inst.d2, &inst.p, DEFAULT_K_BOUND).is_some() {
        tags.insert(Tag::InF);
    }
    if in_g(&inst.d1, &inst.d2, &inst.p, lsq, DEFAULT_R_BOUND).is_some() {
        tags.insert(Tag::InG);
    }
    if in_h(&inst.d1, &inst.d2, &inst.p, lsq, DEFAULT_S_BOUND, DEFAULT_R_BOUND).is_some() {
        tags.insert(Tag::InH);
    }
    tags
}

/// `d x^2 + a^2 = 4 p^y`. Coprimality with `p` is not required here.
pub fn solve_special(d: &BigInt, a: &BigInt, p: &BigInt, y_bound: u32) -> Result<DioSolution, DioError> {
    let inst = BSInstance::loose(d.clone(), a * a, &BigInt::from(4), p.clone())?;
    Ok(solve_bs(&inst, y_bound))
}

fn sequence(k: u32, first: BigInt, second: BigInt) -> BigInt {
    let (mut x, mut y) = (first, second);
    for _ in 0..k {
        let next = &x + &y;
        x = std::mem::replace(&mut y, next);
    }
    x
}

pub fn fibonacci(k: u32) -> BigInt {
    sequence(k, BigInt::zero(), BigInt::one())
}

pub fn lucas(k: u32) -> BigInt {
    sequence(k, BigInt::from(2), BigInt::one())
}

/// First `(k, ε)` with `2 <= k <= k_bound` and
/// `(D1, D2, p) = (F_{k-2ε}, L_{k+ε}, F_k)`, trying `ε = +1` before `-1`.
pub fn in_f(d1: &BigInt, d2: &BigInt, p: &BigInt, k_bound: u32) -> Option<(u32, i8)> {
    let limit = k_bound as usize + 2;
    let mut fib = vec![BigInt::zero(), BigInt::one()];
    let mut luc = vec![BigInt::from(2), BigInt::one()];
    while fib.len() <= limit {
        let n = fib.len();
        fib.push(&fib[n - 1] + &fib[n - 2]);
        luc.push(&luc[n - 1] + &luc[n - 2]);
    }
    for k in 2..=k_bound as usize {
        if fib[k] != *p {
            continue;
        }
        if fib[k - 2] == *d1 && luc[k + 1] == *d2 {
            return Some((k as u32, 1));
        }
        if fib[k + 2] == *d1 && luc[k - 1] == *d2 {
            return Some((k as u32, -1));
        }
    }
    None
}

fn prime_ok(p: &BigInt, lambda_sq: u32) -> bool {
    is_prime(p) && (lambda_sq == 4 || p.is_odd())
}

/// `1 <= r <= r_bound` with `D1 = 1`, `D2 = 4 p^r - 1`. The prime must be
/// odd unless `λ = 2`.
pub fn in_g(d1: &BigInt, d2: &BigInt, p: &BigInt, lambda_sq: u32, r_bound: u32) -> Option<u32> {
    if !d1.is_one() || !prime_ok(p, lambda_sq) {
        return None;
    }
    let mut pr = p.clone();
    for r in 1..=r_bound {
        let v = BigInt::from(4) * &pr - 1;
        if v == *d2 {
            return Some(r);
        }
        if v > *d2 {
            break;
        }
        pr *= p;
    }
    None
}

/// Smallest `(r, s)` with `D1 s^2 + D2 = λ^2 p^r` and
/// `3 D1 s^2 - D2 = ±λ^2`, for mutually coprime `D1, D2, p`.
///
/// The second equation pins `s` to at most two candidates, so only the
/// first needs a search over `r`.
pub fn in_h(d1: &BigInt, d2: &BigInt, p: &BigInt, lambda_sq: u32, s_bound: u64, r_bound: u32) -> Option<(u32, u64)> {
    if d1.sign() != Sign::Plus || d2.sign() != Sign::Plus || !prime_ok(p, lambda_sq) {
        return None;
    }
    if !d1.gcd(d2).is_one() || !d1.gcd(p).is_one() || !d2.gcd(p).is_one() {
        return None;
    }
    let lsq = BigInt::from(lambda_sq);
    let three_d1 = BigInt::from(3) * d1;
    let mut best: Option<(u32, u64)> = None;
    for num in [d2 + &lsq, d2 - &lsq] {
        let (q, rem) = num.div_rem(&three_d1);
        if !rem.is_zero() || q.sign() != Sign::Plus {
            continue;
        }
        let Some(s) = perfect_sqrt(&q).and_then(|s| u64::try_from(s).ok()) else {
            continue;
        };
        if s > s_bound {
            continue;
        }
        let (mut v, rem) = (d1 * &q + d2).div_rem(&lsq);
        if !rem.is_zero() {
            continue;
        }
        let mut r = 0u32;
        while r <= r_bound && (&v % p).is_zero() {
            v /= p;
            r += 1;
        }
        if v.is_one() && (1..=r_bound).contains(&r) && best.map_or(true, |b| (r, s) < b) {
            best = Some((r, s));
        }
    }
    best
}

/// `(x, z, y)` with `(z^y - 1)/(z - 1) = x^2`, `x > 1`, `2 <= z <= z_max`,
/// `3 <= y <= y_max`, sorted.
pub fn ljunggren_oracle(z_max: u64, y_max: u32) -> Vec<(BigInt, u64, u32)> {
    let mut out = Vec::new();
    for z in 2..=z_max {
        let zb = BigInt::from(z);
        // 1 + z + z^2, then one more power per step.
        let mut rep = BigInt::one() + &zb + &zb * &zb;
        let mut zp = &zb * &zb * &zb;
        for y in 3..=y_max {
            if let Some(x) = perfect_sqrt(&rep) {
                if x > BigInt::one() {
                    out.push((x, z, y));
                }
            }
            rep += &zp;
            zp *= &zb;
        }
    }
    out.sort();
    out
}

/// Every `k <= k_max` with `L_k` a perfect square.
pub fn lucas_square_indices(k_max: u32) -> Vec<u32> {
    let (mut x, mut y) = (BigInt::from(2), BigInt::one());
    let mut out = Vec::new();
    for k in 0..=k_max {
        if perfect_sqrt(&x).is_some() {
            out.push(k);
        }
        let next = &x + &y;
        x = std::mem::replace(&mut y, next);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniquenessOutcome {
    AtMostOne,
    KnownException(Vec<(BigInt, u32)>),
    Violation(Vec<(BigInt, u32)>),
}

/// `(x, y, d, a, p)` with two solutions for the same `(d, a, p)`.
pub const UNIQUENESS_EXCEPTIONS: [(u64, u32, u64, u64, u64); 4] =
    [(1, 1, 7, 1, 2), (1, 3, 7, 5, 2), (3, 4, 7, 1, 2), (17, 9, 7, 5, 2)];

/// Counts solutions of `d x^2 + a^2 = 4 p^y` within the bound.
pub fn check_at_most_one(d: &BigInt, a: &BigInt, p: &BigInt, y_bound: u32) -> Result<UniquenessOutcome, DioError> {
    let sols = solve_special(d, a, p, y_bound)?.solutions;
    if sols.len() <= 1 {
        return Ok(UniquenessOutcome::AtMostOne);
    }
    let expected: Vec<(BigInt, u32)> = UNIQUENESS_EXCEPTIONS
        .iter()
        .filter(|e| *d == BigInt::from(e.2) && *a == BigInt::from(e.3) && *p == BigInt::from(e.4))
        .map(|e| (BigInt::from(e.0), e.1))
        .collect();
    Ok(if sols == expected {
        UniquenessOutcome::KnownException(sols)
    } else {
        UniquenessOutcome::Violation(sols)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn inst(d1: i64, d2: i64, l: i64, p: i64) -> BSInstance {
        BSInstance::new(big(d1), big(d2), &big(l), big(p)).unwrap()
    }

    fn sols(s: &DioSolution) -> Vec<(i64, u32)> {
        s.solutions
            .iter()
            .map(|(x, y)| (i64::try_from(x).unwrap(), *y))
            .collect()
    }

    #[test]
    fn bs_examples() {
        let s = solve_bs(&inst(7, 25, 4, 2), 20);
        assert_eq!(sols(&s), vec![(1, 3), (17, 9)]);
        assert!(s.classification.contains(&Tag::MissingFromE));
        assert!(s.classification.contains(&Tag::InE));

        let s = solve_bs(&inst(7, 1, 4, 2), 20);
        assert_eq!(sols(&s), vec![(1, 1), (3, 4)]);
        assert_eq!(s.classification, BTreeSet::from([Tag::InE]));

        // 31 + 1 = 4 * 2^3.
        assert_eq!(sols(&solve_bs(&inst(31, 1, 4, 2), 20)), vec![(1, 3)]);
        assert_eq!(sols(&solve_bs(&inst(2, 1, 1, 3), 30)), vec![(1, 1), (2, 2), (11, 5)]);
    }

    #[test]
    fn instance_validation() {
        let e = |d1, d2, l, p| BSInstance::new(big(d1), big(d2), &big(l), big(p)).unwrap_err();
        assert_eq!(e(0, 1, 4, 2), DioError::NotPositive("D1"));
        assert_eq!(e(1, 0, 4, 2), DioError::NotPositive("D2"));
        assert_eq!(e(1, 1, 3, 2), DioError::BadLambda(big(3)));
        assert_eq!(e(1, 1, 4, 9), DioError::NotPrime(big(9)));
        assert_eq!(e(1, 1, 1, 2), DioError::EvenPrime);
        assert!(matches!(e(3, 6, 4, 5), DioError::NotCoprime { .. }));
        assert!(matches!(e(3, 5, 4, 5), DioError::NotCoprime { .. }));
    }

    #[test]
    fn special_examples() {
        let s = |d, a, p| sols(&solve_special(&big(d), &big(a), &big(p), 20).unwrap());
        assert_eq!(s(7, 5, 2), vec![(1, 3), (17, 9)]);
        assert_eq!(s(31, 1, 2), vec![(1, 3)]);
        assert_eq!(s(23, 3, 2), vec![(1, 3)]);
    }

    #[test]
    fn sequences() {
        assert_eq!(fibonacci(0), big(0));
        assert_eq!(lucas(0), big(2));
        assert_eq!(lucas(3), big(4));
        assert_eq!(fibonacci(10), big(55));
        let mut a: i64 = 0;
        let mut b: i64 = 1;
        for k in 0..60 {
            assert_eq!(fibonacci(k), big(a));
            (a, b) = (b, a + b);
        }
        for k in 0..=1000u32 {
            let (f, l) = (fibonacci(k), lucas(k));
            let sign = if k % 2 == 0 { 4 } else { -4 };
            assert_eq!(&l * &l - BigInt::from(5) * &f * &f, big(sign));
        }
    }

    #[test]
    fn f_membership() {
        assert_eq!(in_f(&big(1), &big(7), &big(2), 10), Some((3, 1)));
        assert_eq!(in_f(&big(7), &big(25), &big(2), 50), None);
        assert_eq!(in_f(&big(3), &big(1), &big(1), 10), Some((2, -1)));
        // (F_3, L_6, F_5) = (2, 18, 5).
        assert_eq!(in_f(&big(2), &big(18), &big(5), 10), Some((5, 1)));
        assert_eq!(in_f(&big(2), &big(18), &big(5), 4), None);
    }

    #[test]
    fn g_membership() {
        assert_eq!(in_g(&big(1), &big(11), &big(3), 1, 10), Some(1));
        assert_eq!(in_g(&big(1), &big(107), &big(3), 1, 10), Some(3));
        assert_eq!(in_g(&big(1), &big(107), &big(3), 1, 2), None);
        assert_eq!(in_g(&big(3), &big(11), &big(3), 1, 10), None);
        assert_eq!(in_g(&big(1), &big(7), &big(2), 1, 10), None);
        assert_eq!(in_g(&big(1), &big(7), &big(2), 4, 10), Some(1));
        for r in 1..10u32 {
            let d2 = BigInt::from(4) * num_traits::pow(big(5), r as usize) - 1;
            assert_eq!(in_g(&big(1), &d2, &big(5), 2, 20), Some(r));
        }
    }

    #[test]
    fn h_membership() {
        assert_eq!(in_h(&big(1), &big(1), &big(5), 2, 1000, 60), None);
        assert_eq!(in_h(&big(2), &big(1), &big(3), 1, 1000, 60), None);
        assert_eq!(in_h(&big(1), &big(2), &big(3), 1, 1000, 60), Some((1, 1)));
        // Not mutually coprime.
        assert_eq!(in_h(&big(3), &big(3), &big(3), 1, 1000, 60), None);
    }

    #[test]
    fn h_membership_agrees_with_scan() {
        fn scan(d1: i64, d2: i64, p: i64, l: i64) -> Option<(u32, u64)> {
            if d1.gcd(&d2) != 1 || d1.gcd(&p) != 1 || d2.gcd(&p) != 1 || (l != 4 && p == 2) {
                return None;
            }
            for r in 1..=12u32 {
                for s in 1..=300i64 {
                    let ok1 = d1 * s * s + d2 == l * p.pow(r);
                    let t = 3 * d1 * s * s - d2;
                    if ok1 && (t == l || t == -l) {
                        return Some((r, s as u64));
                    }
                }
            }
            None
        }
        for d1 in 1..30i64 {
            for d2 in 1..60i64 {
                for p in [2i64, 3, 5, 7, 11, 13] {
                    for l in [1i64, 2, 4] {
                        let got = in_h(&big(d1), &big(d2), &big(p), l as u32, 300, 12);
                        assert_eq!(got, scan(d1, d2, p, l), "({d1}, {d2}, {p}, {l})");
                    }
                }
            }
        }
    }

    #[test]
    fn e_membership() {
        assert!(in_e(4, &big(7), &big(1), &big(2)));
        assert!(in_e(4, &big(7), &big(25), &big(2)));
        assert!(!in_e(4, &big(13), &big(1), &big(2)));
        assert!(in_e(2, &big(1), &big(1), &big(13)));
        assert!(!in_e(4, &big(1), &big(1), &big(13)));
    }

    #[test]
    fn ljunggren() {
        let as_tuples = |v: Vec<(BigInt, u64, u32)>| {
            v.into_iter()
                .map(|(x, z, y)| (i64::try_from(x).unwrap(), z, y))
                .collect::<Vec<_>>()
        };
        assert_eq!(as_tuples(ljunggren_oracle(100, 30)), vec![(11, 3, 5), (20, 7, 4)]);
        assert!(ljunggren_oracle(2, 3).is_empty());
        assert_eq!(as_tuples(ljunggren_oracle(7, 4)), vec![(20, 7, 4)]);
    }

    #[test]
    fn lucas_squares() {
        assert_eq!(lucas_square_indices(1000), vec![1, 3]);
        assert_eq!(lucas_square_indices(1), vec![1]);
        assert_eq!(lucas_square_indices(3), vec![1, 3]);
    }

    #[test]
    fn uniqueness_examples() {
        let c = |d, a, p| check_at_most_one(&big(d), &big(a), &big(p), 30).unwrap();
        assert_eq!(
            c(7, 1, 2),
            UniquenessOutcome::KnownException(vec![(big(1), 1), (big(3), 4)])
        );
        assert_eq!(
            c(7, 5, 2),
            UniquenessOutcome::KnownException(vec![(big(1), 3), (big(17), 9)])
        );
        assert_eq!(c(23, 3, 2), UniquenessOutcome::AtMostOne);
    }
}
