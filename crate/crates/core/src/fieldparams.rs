//! Parameters `(a, p, n)` of the field `Q(sqrt(a^2 - 4 p^n))` and the
//! square-free decomposition `4 p^n - a^2 = c^2 d`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::arith::{is_prime, squarefree_part, ArithError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("a must be at least 1, got {0}")]
    ANotPositive(BigInt),
    #[error("a must be odd, got {0}")]
    AEven(BigInt),
    #[error("n must be odd and at least 3, got {0}")]
    BadN(u32),
    #[error("p must be prime, got {0}")]
    PNotPrime(BigInt),
    #[error("gcd(a, p) = {gcd} for a = {a}, p = {p}")]
    NotCoprime { a: BigInt, p: BigInt, gcd: BigInt },
    #[error("a^2 >= 4p^n for a = {a}, p = {p}, n = {n}: the field is not imaginary")]
    NotImaginary { a: BigInt, p: BigInt, n: u32 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    pub a: BigInt,
    pub p: BigInt,
    pub n: u32,
    /// `4 p^n - a^2`.
    pub m_val: BigInt,
    pub c: BigInt,
    pub d: BigInt,
    /// Discriminant of the field, `-d`.
    pub delta: BigInt,
}

impl FieldParams {
    /// `a^2 - 4 p^n` as printed in tables, i.e. `-m_val`.
    pub fn signed_value(&self) -> BigInt {
        -&self.m_val
    }
}

/// Validates `(a, p, n)` and derives `c`, `d` and the discriminant.
///
/// Checks run in a fixed order so every bad input maps to one error:
/// `a >= 1`, `a` odd, `n` odd and `>= 3`, `p` prime, `gcd(a, p) = 1`,
/// `a^2 < 4 p^n`.
pub fn build(a: &BigInt, p: &BigInt, n: u32) -> Result<FieldParams, ParamsError> {
    if a.sign() != Sign::Plus {
        return Err(ParamsError::ANotPositive(a.clone()));
    }
    if a.is_even() {
        return Err(ParamsError::AEven(a.clone()));
    }
    if n < 3 || n % 2 == 0 {
        return Err(ParamsError::BadN(n));
    }
    if !is_prime(p) {
        return Err(ParamsError::PNotPrime(p.clone()));
    }
    let g = a.gcd(p);
    if !g.is_one() {
        return Err(ParamsError::NotCoprime {
            a: a.clone(),
            p: p.clone(),
            gcd: g,
        });
    }
    let m_val = BigInt::from(4) * num_traits::pow(p.clone(), n as usize) - a * a;
    if !m_val.is_positive() {
        return Err(ParamsError::NotImaginary {
            a: a.clone(),
            p: p.clone(),
            n,
        });
    }
    let sf = squarefree_part(&m_val)?;
    debug_assert_eq!(sf.d.mod_floor(&BigInt::from(4)), BigInt::from(3));
    debug_assert!(!sf.d.is_multiple_of(p));
    Ok(FieldParams {
        a: a.clone(),
        p: p.clone(),
        n,
        delta: -&sf.d,
        m_val,
        c: sf.c,
        d: sf.d,
    })
}

/// Convenience wrapper over [`build`] for small inputs.
pub fn build_u64(a: u64, p: u64, n: u32) -> Result<FieldParams, ParamsError> {
    build(&BigInt::from(a), &BigInt::from(p), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, kronecker};
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let f = build_u64(1, 2, 3).unwrap();
        assert_eq!(f.m_val, BigInt::from(31));
        assert_eq!(f.c, BigInt::from(1));
        assert_eq!(f.d, BigInt::from(31));
        assert_eq!(f.delta, BigInt::from(-31));
        assert_eq!(f.signed_value(), BigInt::from(-31));

        let f = build_u64(9, 11, 3).unwrap();
        assert_eq!(f.m_val, BigInt::from(5243));
        assert_eq!(f.c, BigInt::from(7));
        assert_eq!(f.d, BigInt::from(107));

        let f = build_u64(5, 2, 9).unwrap();
        assert_eq!(f.m_val, BigInt::from(2023));
        assert_eq!(f.d, BigInt::from(7));
        assert_eq!(f.c, BigInt::from(17));
    }

    #[test]
    fn errors_in_precedence_order() {
        let e = |a: i64, p: i64, n: u32| build(&BigInt::from(a), &BigInt::from(p), n).unwrap_err();
        assert!(matches!(e(3, 3, 3), ParamsError::NotCoprime { .. }));
        assert!(matches!(e(0, 2, 3), ParamsError::ANotPositive(_)));
        assert!(matches!(e(-3, 2, 3), ParamsError::ANotPositive(_)));
        assert!(matches!(e(2, 4, 2), ParamsError::AEven(_)));
        assert!(matches!(e(1, 4, 2), ParamsError::BadN(2)));
        assert!(matches!(e(1, 2, 1), ParamsError::BadN(1)));
        assert!(matches!(e(1, 4, 3), ParamsError::PNotPrime(_)));
        assert!(matches!(e(1, -2, 3), ParamsError::PNotPrime(_)));
        assert!(matches!(e(15, 5, 3), ParamsError::NotCoprime { .. }));
        assert!(matches!(e(15, 2, 3), ParamsError::NotImaginary { .. }));
        // a^2 = 4p^n is impossible for odd a, so the boundary is strict.
        assert!(matches!(e(17, 2, 5), ParamsError::NotImaginary { .. }));
        assert!(build_u64(11, 2, 5).is_ok());
    }

    #[test]
    fn composite_odd_n_is_accepted() {
        let f = build_u64(1, 2, 9).unwrap();
        assert_eq!(f.d, BigInt::from(2047));
        assert!(build_u64(1, 3, 15).is_ok());
    }

    fn small_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
    }

    proptest! {
        #[test]
        fn derived_fields_are_consistent(
            a in (0u64..200).prop_map(|k| 2 * k + 1),
            p in small_prime(),
            n in prop::sample::select(vec![3u32, 5, 7, 9, 11]),
        ) {
            let Ok(f) = build_u64(a, p, n) else { return Ok(()); };
            let four_pn = BigInt::from(4) * num_traits::pow(BigInt::from(p), n as usize);
            prop_assert_eq!(&f.d * &f.c * &f.c + &f.a * &f.a, four_pn);
            prop_assert_eq!(f.d.mod_floor(&BigInt::from(4)), BigInt::from(3));
            prop_assert_eq!(&f.delta, &-&f.d);
            prop_assert!(!f.d.is_multiple_of(&f.p));
            prop_assert_eq!(kronecker(&f.delta, &f.p), 1);
            let fd = factorize(&f.d).unwrap();
            prop_assert!(fd.factors().iter().all(|(_, e)| *e == 1));
        }

        #[test]
        fn every_bad_input_has_one_error(a in -5i64..60, p in -3i64..40, n in 0u32..12) {
            let r = build(&BigInt::from(a), &BigInt::from(p), n);
            let valid = a >= 1
                && a % 2 == 1
                && n >= 3
                && n % 2 == 1
                && is_prime(&BigInt::from(p))
                && a.gcd(&p) == 1
                && BigInt::from(a * a) < BigInt::from(4) * num_traits::pow(BigInt::from(p), n as usize);
            prop_assert_eq!(r.is_ok(), valid);
        }
    }
}
