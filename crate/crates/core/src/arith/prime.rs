//! Primality testing.
//!
//! Below 2^64 the test is deterministic: strong-pseudoprime tests to the
//! first twelve prime bases have no counterexample below 3.3 * 10^24.
//! Above 2^64 the same twelve bases are followed by [`EXTRA_ROUNDS`]
//! bases drawn from a fixed-seed ChaCha stream. For a composite n each
//! independent random base errs with probability at most 1/4, so the
//! acceptance risk for a non-adversarial input is below 4^-30. The seed is
//! fixed, so an adversary who knows it could in principle construct a
//! composite that passes; callers needing a proof should not rely on this.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::word::{pow_mod, Word};

pub(crate) const WITNESS_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Random strong-pseudoprime rounds applied above 2^64.
pub const EXTRA_ROUNDS: usize = 30;

const BASE_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// True iff `n` is prime. Negative inputs are never prime.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() == Sign::Minus {
        return false;
    }
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => is_prime_biguint(n.magnitude()),
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESS_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let n = n as u128;
    WITNESS_PRIMES.iter().all(|&b| strong_probable_prime(&n, &(b as u128)))
}

pub(crate) fn is_prime_biguint(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for &p in &WITNESS_PRIMES {
        if (n % p).to_u64() == Some(0) {
            return false;
        }
    }
    if !WITNESS_PRIMES
        .iter()
        .all(|&b| strong_probable_prime(n, &BigUint::from(b)))
    {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let low = BigUint::from(2u32);
    let high = n - 1u32;
    (0..EXTRA_ROUNDS).all(|_| {
        let base = rng.gen_biguint_range(&low, &high);
        strong_probable_prime(n, &base)
    })
}

/// Strong probable-prime test of odd `n > 2` to `base`.
pub(crate) fn strong_probable_prime<T: Word>(n: &T, base: &T) -> bool {
    let one = T::one();
    let n_minus_one = n.clone() - one.clone();
    let two = T::small(2);
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d = d / two.clone();
        s += 1;
    }
    let mut x = pow_mod(base, &d, n);
    if x.is_one() || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = super::word::mul_mod(&x, &x, n);
        if x == n_minus_one {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn sieve(limit: usize) -> Vec<bool> {
        let mut is = vec![true; limit + 1];
        is[0] = false;
        if limit >= 1 {
            is[1] = false;
        }
        let mut i = 2;
        while i * i <= limit {
            if is[i] {
                let mut j = i * i;
                while j <= limit {
                    is[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        is
    }

    #[test]
    fn agrees_with_sieve_below_a_million() {
        let table = sieve(1_000_000);
        for (n, &expected) in table.iter().enumerate() {
            assert_eq!(is_prime_u64(n as u64), expected, "n = {n}");
        }
    }

    #[test]
    fn spot_values() {
        assert!(is_prime(&BigInt::from(2)));
        assert!(is_prime(&BigInt::from(13)));
        assert!(!is_prime(&BigInt::from(5243)));
        assert!(!is_prime(&BigInt::from(0)));
        assert!(!is_prime(&BigInt::from(1)));
        assert!(!is_prime(&BigInt::from(-7)));
    }

    #[test]
    fn strong_pseudoprimes_to_small_bases_are_rejected() {
        // 3215031751 is a strong pseudoprime to bases 2, 3, 5 and 7.
        assert!(!is_prime_u64(3_215_031_751));
        // 3825123056546413051 fools every prime base up to 23.
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(u64::MAX));
    }

    #[test]
    fn beyond_64_bits() {
        let m127 = (BigInt::one() << 127) - 1;
        assert!(is_prime(&m127));
        let m61 = (BigInt::one() << 61) - 1;
        assert!(!is_prime(&(&m127 * &m61)));
        let p = BigInt::from(18_446_744_073_709_551_557u64);
        assert!(!is_prime(&(&p * &p)));
    }
}
