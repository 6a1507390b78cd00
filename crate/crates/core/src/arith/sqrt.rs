//! Square roots modulo arbitrary positive moduli.
//!
//! Prime moduli use Tonelli-Shanks, odd prime powers lift one p-adic digit
//! at a time, powers of two use the usual 2-adic lifting, and the
//! per-prime-power root sets are glued together by CRT.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::factor::Factorization;
use super::word::{inv_mod, mul_mod, pow, pow_mod, sub_mod, Word};

/// Every `r` in `[0, modulus)` with `r^2 ≡ a (mod modulus)`, sorted.
///
/// `factorization` must factor `modulus`; the result is empty when `a` is
/// not a square residue.
pub fn sqrt_mod(a: &BigInt, modulus: &BigInt, factorization: &Factorization) -> Vec<BigInt> {
    assert!(modulus.sign() == Sign::Plus, "modulus must be positive");
    debug_assert_eq!(factorization.value(), modulus);
    let reduced = a.mod_floor(modulus);
    if let (Some(m), Some(factors)) = (modulus.to_u64(), factorization.to_u64_factors()) {
        let a = reduced.to_u64().expect("reduced below a u64 modulus");
        return sqrt_mod_u64(a, m, &factors).into_iter().map(BigInt::from).collect();
    }
    let factors: Vec<(BigUint, u32)> = factorization
        .factors()
        .iter()
        .map(|(p, e)| (p.magnitude().clone(), *e))
        .collect();
    roots_generic(reduced.magnitude(), &factors)
        .into_iter()
        .map(BigInt::from)
        .collect()
}

/// Machine-word version of [`sqrt_mod`] for moduli below 2^64.
pub fn sqrt_mod_u64(a: u64, modulus: u64, factors: &[(u64, u32)]) -> Vec<u64> {
    let factors: Vec<(u128, u32)> = factors.iter().map(|&(p, e)| (p as u128, e)).collect();
    roots_generic(&((a % modulus) as u128), &factors)
        .into_iter()
        .map(|r| r as u64)
        .collect()
}

/// Joins `x ≡ r_i (mod m_i)` for pairwise coprime moduli. Returns the
/// combined residue and modulus, or `None` if two moduli share a factor.
pub fn crt(congruences: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt)> {
    let mut acc = (BigUint::zero(), BigUint::one());
    for (r, m) in congruences {
        if m.sign() != Sign::Plus {
            return None;
        }
        let r = r.mod_floor(m);
        acc = crt_pair(&acc, &(r.magnitude().clone(), m.magnitude().clone()))?;
    }
    Some((BigInt::from(acc.0), BigInt::from(acc.1)))
}

fn crt_pair<T: Word>((r1, m1): &(T, T), (r2, m2): &(T, T)) -> Option<(T, T)> {
    let inv = inv_mod(&(m1.clone() % m2.clone()), m2)?;
    let diff = sub_mod(&(r2.clone() % m2.clone()), &(r1.clone() % m2.clone()), m2);
    let t = mul_mod(&diff, &inv, m2);
    let modulus = m1.clone() * m2.clone();
    Some((r1.clone() + m1.clone() * t, modulus))
}

fn roots_generic<T: Word>(a: &T, factors: &[(T, u32)]) -> Vec<T> {
    let mut acc: Vec<T> = vec![T::zero()];
    let mut modulus = T::one();
    for (p, e) in factors {
        let pk = pow(p, *e);
        let local = roots_prime_power(&(a.clone() % pk.clone()), p, *e);
        if local.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for r1 in &acc {
            for r2 in &local {
                let (r, _) = crt_pair(&(r1.clone(), modulus.clone()), &(r2.clone(), pk.clone()))
                    .expect("prime powers of distinct primes are coprime");
                next.push(r);
            }
        }
        acc = next;
        modulus = modulus * pk;
    }
    acc.sort();
    acc
}

/// Roots of `x^2 ≡ a (mod p^k)` for `a` already reduced mod `p^k`.
fn roots_prime_power<T: Word>(a: &T, p: &T, k: u32) -> Vec<T> {
    let pk = pow(p, k);
    if a.is_zero() {
        let step = pow(p, k.div_ceil(2));
        let mut out = Vec::new();
        let mut x = T::zero();
        while x < pk {
            out.push(x.clone());
            x = x + step.clone();
        }
        return out;
    }
    let mut v = 0u32;
    let mut unit = a.clone();
    while (unit.clone() % p.clone()).is_zero() {
        unit = unit / p.clone();
        v += 1;
    }
    if v % 2 == 1 {
        return Vec::new();
    }
    let w = v / 2;
    let rest = k - v;
    let base = unit_roots(&(unit % pow(p, rest)), p, rest);
    if w == 0 {
        return base;
    }
    let scale = pow(p, w);
    let period = pow(p, rest);
    let mut out = Vec::new();
    for y0 in base {
        let mut t = T::zero();
        while t < scale {
            let y = y0.clone() + t.clone() * period.clone();
            out.push((scale.clone() * y) % pk.clone());
            t = t + T::one();
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Roots of `x^2 ≡ u (mod p^k)` for a unit `u`.
fn unit_roots<T: Word>(u: &T, p: &T, k: u32) -> Vec<T> {
    let two = T::small(2);
    let pk = pow(p, k);
    if *p == two {
        let u8 = (u.clone() % T::small(8)).to_u64().expect("small residue");
        return match k {
            1 => vec![T::one()],
            2 if u8 % 4 == 1 => vec![T::one(), T::small(3)],
            2 => Vec::new(),
            _ if u8 != 1 => Vec::new(),
            _ => {
                let mut r = T::one();
                for j in 3..k {
                    let modulus = pow(&two, j + 1);
                    let sq = mul_mod(&r, &r, &modulus);
                    if sq != u.clone() % modulus {
                        r = r + pow(&two, j - 1);
                    }
                }
                let half = pow(&two, k - 1);
                let neg = pk.clone() - r.clone();
                let mut out = vec![
                    r.clone(),
                    neg.clone(),
                    (r + half.clone()) % pk.clone(),
                    (neg + half) % pk,
                ];
                out.sort();
                out.dedup();
                out
            }
        };
    }
    let Some(mut r) = tonelli_shanks(&(u.clone() % p.clone()), p) else {
        return Vec::new();
    };
    let inv_two_r = |r: &T| {
        let two_r = (two.clone() * r.clone()) % p.clone();
        pow_mod(&two_r, &(p.clone() - two.clone()), p)
    };
    let mut pj = p.clone();
    for _ in 1..k {
        let next = pj.clone() * p.clone();
        let sq = mul_mod(&r, &r, &next);
        let excess = sub_mod(&(u.clone() % next.clone()), &sq, &next) / pj.clone();
        let t = mul_mod(&(excess % p.clone()), &inv_two_r(&r), p);
        r = r + t * pj.clone();
        pj = next;
    }
    let mut out = vec![r.clone(), pk - r];
    out.sort();
    out
}

/// A square root of `a` modulo the odd prime `p`, if one exists.
pub(crate) fn tonelli_shanks<T: Word>(a: &T, p: &T) -> Option<T> {
    let one = T::one();
    let two = T::small(2);
    let a = a.clone() % p.clone();
    if a.is_zero() {
        return Some(T::zero());
    }
    let p_minus_one = p.clone() - one.clone();
    if pow_mod(&a, &(p_minus_one.clone() / two.clone()), p) != one {
        return None;
    }
    let mut q = p_minus_one.clone();
    let mut s = 0u32;
    while q.is_even() {
        q = q / two.clone();
        s += 1;
    }
    if s == 1 {
        return Some(pow_mod(&a, &((p.clone() + one) / T::small(4)), p));
    }
    let mut z = two.clone();
    while pow_mod(&z, &(p_minus_one.clone() / two.clone()), p) != p_minus_one {
        z = z + one.clone();
    }
    let mut m = s;
    let mut c = pow_mod(&z, &q, p);
    let mut t = pow_mod(&a, &q, p);
    let mut r = pow_mod(&a, &((q + one.clone()) / two.clone()), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = mul_mod(&t2, &t2, p);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = mul_mod(&b, &b, p);
        }
        m = i;
        c = mul_mod(&b, &b, p);
        t = mul_mod(&t, &c, p);
        r = mul_mod(&r, &b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::super::factor::{factorize, factorize_u64};
    use super::*;
    use proptest::prelude::*;

    fn scan(a: i64, m: u64) -> Vec<u64> {
        let target = a.rem_euclid(m as i64) as u64;
        (0..m).filter(|r| (r * r) % m == target).collect()
    }

    fn roots(a: i64, m: u64) -> Vec<u64> {
        let f = factorize(&BigInt::from(m)).unwrap();
        sqrt_mod(&BigInt::from(a), &BigInt::from(m), &f)
            .iter()
            .map(|r| r.to_u64().unwrap())
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(roots(2, 7), vec![3, 4]);
        assert_eq!(roots(0, 1), vec![0]);
        assert_eq!(roots(1, 8), vec![1, 3, 5, 7]);
        assert_eq!(roots(-31, 8), vec![1, 3, 5, 7]);
        assert_eq!(roots(3, 7), Vec::<u64>::new());
    }

    #[test]
    fn exhaustive_below_ten_thousand() {
        // Every modulus up to 2000 against a spread of residues, plus a
        // stride through the rest of the range.
        for m in (1..=2000u64).chain((2001..=10_000).step_by(37)) {
            let factors = factorize_u64(m).unwrap();
            for a in (0..m).step_by(((m / 40) as usize).max(1)).chain([0, 1, m - 1]) {
                let got = sqrt_mod_u64(a, m, &factors);
                assert_eq!(got, scan(a as i64, m), "a = {a}, m = {m}");
            }
        }
    }

    #[test]
    fn big_modulus_path() {
        let p = BigInt::from(18_446_744_073_709_551_557u64);
        let m = &p * BigInt::from(1_000_000_007u64);
        let x = BigInt::from(123_456_789_012_345u64);
        let a = &x * &x;
        let f = factorize(&m).unwrap();
        let got = sqrt_mod(&a, &m, &f);
        assert_eq!(got.len(), 4);
        assert!(got.contains(&x));
        for r in &got {
            assert_eq!((r * r - &a).mod_floor(&m), BigInt::zero());
        }
    }

    #[test]
    fn tonelli_large_two_adicity() {
        // p - 1 = 2^16 * 1, so the full Tonelli-Shanks loop runs.
        let p = 65_537u128;
        for x in [3u128, 12_345, 65_000] {
            let r = tonelli_shanks(&((x * x) % p), &p).unwrap();
            assert!(r == x || r == p - x);
        }
    }

    #[test]
    fn crt_combines() {
        let (r, m) = crt(&[(BigInt::from(2), BigInt::from(3)), (BigInt::from(3), BigInt::from(5))]).unwrap();
        assert_eq!((r, m), (BigInt::from(8), BigInt::from(15)));
        assert!(crt(&[(BigInt::from(1), BigInt::from(4)), (BigInt::from(3), BigInt::from(6))]).is_none());
    }

    proptest! {
        #[test]
        fn every_root_squares_back(a in -1_000_000_000i64..1_000_000_000, m in 1u64..1_000_000_000_000) {
            let factors = factorize_u64(m).unwrap();
            let target = a.rem_euclid(m as i64) as u128;
            for r in sqrt_mod_u64(a.rem_euclid(m as i64) as u64, m, &factors) {
                prop_assert!(r < m);
                prop_assert_eq!((r as u128 * r as u128) % m as u128, target);
            }
        }

        #[test]
        fn squares_always_have_roots(x in 0u64..1_000_000_000, m in 1u64..1_000_000_000_000) {
            let factors = factorize_u64(m).unwrap();
            let a = ((x as u128 * x as u128) % m as u128) as u64;
            let got = sqrt_mod_u64(a, m, &factors);
            prop_assert!(got.contains(&(x % m)));
        }
    }
}
