//! Exact integer primitives: primality, factorization, square-free
//! decomposition, Kronecker symbols, modular square roots and CRT.

mod factor;
mod kronecker;
mod prime;
mod sqrt;
mod word;

use num_bigint::{BigInt, Sign};
use num_traits::One;
use thiserror::Error;

pub use factor::{
    factorize, factorize_u64, factorize_u64_with_cap, factorize_with_cap, perfect_sqrt, Factorization, DEFAULT_RHO_CAP,
};
pub use kronecker::kronecker;
pub use prime::{is_prime, is_prime_u64, EXTRA_ROUNDS};
pub use sqrt::{crt, sqrt_mod, sqrt_mod_u64};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("expected a positive integer, got {0}")]
    NotPositive(BigInt),
    #[error("factorization exhausted its iteration budget on cofactor {0}")]
    FactorizationExhausted(BigInt),
}

/// `m = c^2 * d` with `d` square-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub m: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// Splits `m >= 1` into its largest square factor `c^2` and square-free `d`.
pub fn squarefree_part(m: &BigInt) -> Result<SquarefreeDecomposition, ArithError> {
    if m.sign() != Sign::Plus {
        return Err(ArithError::NotPositive(m.clone()));
    }
    let f = factorize(m)?;
    let mut c = BigInt::one();
    let mut d = BigInt::one();
    for (p, e) in f.factors() {
        c *= num_traits::pow(p.clone(), (*e / 2) as usize);
        if e % 2 == 1 {
            d *= p;
        }
    }
    Ok(SquarefreeDecomposition { m: m.clone(), c, d })
}
