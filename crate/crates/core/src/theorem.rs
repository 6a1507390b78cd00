//! Divisibility verdicts for the family `Q(sqrt(a^2 - 4 p^n))`.
//!
//! Given valid `(a, p, n)`, a prime `𝔭` above `p` satisfies `𝔭^n = (α)`
//! with `α = (a + c sqrt(-d)) / 2`, so the class of `𝔭` has order dividing
//! `n`. The verdict computes that order exactly and reports, alongside it,
//! whether the sufficient conditions (i) and (ii) predicted order `n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{factorize, factorize_u64, is_prime_u64, ArithError};
use crate::classgroup::{class_number, class_order, prime_form, ClassGroupError};
use crate::fieldparams::{build, FieldParams, ParamsError};

/// `(a, p, n)` excluded from the divisibility statement. Each has
/// `d = 7` and class number 1.
pub const EXCEPTIONAL: [(u64, u64, u32); 4] = [(5, 2, 3), (5, 2, 9), (11, 2, 5), (13, 2, 7)];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    ClassGroup(#[from] ClassGroupError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("q = {q} is not in an admissible residue class mod {m} (need 2 <= q mod m <= m - 2)")]
    QNotAdmissible { q: u64, m: u64 },
    #[error("m = {m} does not divide d = {d}")]
    MDoesNotDivideD { m: u64, d: BigInt },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignMode {
    /// Only `2^(l-1) a ≡ b^l` counts as a violation.
    PlusOnly,
    /// Both `2^(l-1) a ≡ b^l` and `2^(l-1) a ≡ -b^l` count.
    BothSigns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WitnessSign {
    Plus,
    Minus,
}

impl WitnessSign {
    pub fn symbol(self) -> char {
        match self {
            WitnessSign::Plus => '+',
            WitnessSign::Minus => '-',
        }
    }
}

/// A divisor `b` of `a` and prime `ell | n` at which a condition fails.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Witness {
    pub b: BigInt,
    pub ell: u64,
    pub sign: WitnessSign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub sign_mode: SignMode,
    /// Condition (i) also fails when `d = 3`; that failure has no witness.
    pub d_is_three: bool,
}

impl ConditionReport {
    fn new(witnesses: Vec<Witness>, sign_mode: SignMode, d_is_three: bool) -> Self {
        ConditionReport {
            holds: witnesses.is_empty() && !d_is_three,
            witnesses,
            sign_mode,
            d_is_three,
        }
    }
}

fn proper_divisors(a: &BigInt) -> Result<Vec<BigInt>, ArithError> {
    let mut divs = factorize(a)?.divisors();
    divs.pop();
    Ok(divs)
}

fn prime_divisors(n: u32) -> Result<Vec<u64>, ArithError> {
    Ok(factorize_u64(n as u64)?.into_iter().map(|(p, _)| p).collect())
}

/// Condition (i): `a ≢ ±b (mod l)` for every proper divisor `b` of `a`
/// and prime `l | n`, and `d != 3`.
pub fn check_condition_i(a: &BigInt, n: u32, d: &BigInt) -> Result<ConditionReport, ArithError> {
    let mut witnesses = Vec::new();
    let ells = prime_divisors(n)?;
    for b in proper_divisors(a)? {
        for &ell in &ells {
            let l = BigInt::from(ell);
            if (a - &b).is_multiple_of(&l) {
                witnesses.push(Witness {
                    b: b.clone(),
                    ell,
                    sign: WitnessSign::Plus,
                });
            }
            if (a + &b).is_multiple_of(&l) {
                witnesses.push(Witness {
                    b: b.clone(),
                    ell,
                    sign: WitnessSign::Minus,
                });
            }
        }
    }
    Ok(ConditionReport::new(
        witnesses,
        SignMode::BothSigns,
        *d == BigInt::from(3),
    ))
}

/// Condition (ii): `2^(l-1) a ≢ b^l (mod d)`, and with
/// [`SignMode::BothSigns`] also `≢ -b^l`.
pub fn check_condition_ii(a: &BigInt, n: u32, d: &BigInt, sign_mode: SignMode) -> Result<ConditionReport, ArithError> {
    let mut witnesses = Vec::new();
    let ells = prime_divisors(n)?;
    for b in proper_divisors(a)? {
        for &ell in &ells {
            let lhs = (BigInt::from(2).modpow(&BigInt::from(ell - 1), d) * a).mod_floor(d);
            let bl = b.modpow(&BigInt::from(ell), d);
            if lhs == bl {
                witnesses.push(Witness {
                    b: b.clone(),
                    ell,
                    sign: WitnessSign::Plus,
                });
            }
            if sign_mode == SignMode::BothSigns && lhs == (-&bl).mod_floor(d) {
                witnesses.push(Witness {
                    b: b.clone(),
                    ell,
                    sign: WitnessSign::Minus,
                });
            }
        }
    }
    Ok(ConditionReport::new(witnesses, sign_mode, false))
}

pub fn is_exceptional(a: &BigInt, p: &BigInt, n: u32) -> bool {
    EXCEPTIONAL
        .iter()
        .any(|&(ea, ep, en)| *a == BigInt::from(ea) && *p == BigInt::from(ep) && n == en)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub params: FieldParams,
    pub exceptional: bool,
    pub cond_i: ConditionReport,
    pub cond_ii: ConditionReport,
    pub order_of_class: u64,
    pub class_number: Option<u64>,
    /// The class above `p` has order exactly `n`.
    pub subgroup_verified: bool,
    pub n_divides_h: Option<bool>,
}

impl Verdict {
    /// `a = 1`, or one of the two conditions holds.
    pub fn hypotheses_hold(&self) -> bool {
        self.params.a.is_one() || self.cond_i.holds || self.cond_ii.holds
    }

    /// The hypotheses hold outside the exceptional set, yet the order is
    /// not `n`.
    pub fn violates_theorem(&self) -> bool {
        self.hypotheses_hold() && !self.exceptional && !self.subgroup_verified
    }
}

/// Computes the exact order of the class above `p` and, if asked, the
/// class number. Conditions are evaluated but never skip the computation.
pub fn verify(a: &BigInt, p: &BigInt, n: u32, compute_h: bool) -> Result<Verdict, TheoremError> {
    let params = build(a, p, n)?;
    verdict_for(params, compute_h)
}

pub fn verify_u64(a: u64, p: u64, n: u32, compute_h: bool) -> Result<Verdict, TheoremError> {
    verify(&BigInt::from(a), &BigInt::from(p), n, compute_h)
}

fn verdict_for(params: FieldParams, compute_h: bool) -> Result<Verdict, TheoremError> {
    let cond_i = check_condition_i(&params.a, params.n, &params.d)?;
    let cond_ii = check_condition_ii(&params.a, params.n, &params.d, SignMode::BothSigns)?;
    let form = prime_form(&params.delta, &params.p).map_err(|e| match e {
        ClassGroupError::Ramified { .. } | ClassGroupError::NotSplit { .. } => {
            TheoremError::Invariant(format!("p does not split for valid parameters: {e}"))
        }
        other => other.into(),
    })?;
    let order = class_order(&form, params.n as u64).map_err(|e| match e {
        ClassGroupError::NotAMultiple { .. } => {
            TheoremError::Invariant(format!("n-th power of the class above p is not principal: {e}"))
        }
        other => other.into(),
    })?;
    let class_number = if compute_h {
        Some(class_number(&params.delta)?.h)
    } else {
        None
    };
    let n = params.n as u64;
    let subgroup_verified = order == n;
    let n_divides_h = class_number.map(|h| h % n == 0);
    if subgroup_verified && n_divides_h == Some(false) {
        return Err(TheoremError::Invariant(format!(
            "class of order {n} in a group of order {}",
            class_number.unwrap_or_default()
        )));
    }
    Ok(Verdict {
        exceptional: is_exceptional(&params.a, &params.p, params.n),
        params,
        cond_i,
        cond_ii,
        order_of_class: order,
        class_number,
        subgroup_verified,
        n_divides_h,
    })
}

/// `a = q`, `n = q^m`: the class number is divisible by `q^m`.
pub fn verify_prime_power_family(q: u64, p: u64, m: u32) -> Result<Verdict, TheoremError> {
    if q < 3 || !is_prime_u64(q) {
        return Err(TheoremError::BadInput(format!("q = {q} must be a prime >= 3")));
    }
    if m < 1 {
        return Err(TheoremError::BadInput("m must be at least 1".into()));
    }
    let n = q_power(q, m)?;
    verify_u64(q, p, n, true)
}

fn q_power(q: u64, m: u32) -> Result<u32, TheoremError> {
    q.checked_pow(m)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| TheoremError::BadInput(format!("{q}^{m} is too large")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueFamilyReport {
    pub verdict: Verdict,
    /// `q mod m`.
    pub residue: u64,
    /// `D = d / m`.
    pub cofactor: BigInt,
}

/// `a = q`, `n = m^t` with `q mod m` in `[2, m - 2]` and `m | d`.
///
/// For `m = 3` the window is empty, so every `q` is rejected.
pub fn verify_residue_family(m: u64, t: u32, p: u64, q: u64) -> Result<ResidueFamilyReport, TheoremError> {
    if m < 3 || !is_prime_u64(m) {
        return Err(TheoremError::BadInput(format!("m = {m} must be an odd prime")));
    }
    if t < 1 {
        return Err(TheoremError::BadInput("t must be at least 1".into()));
    }
    if !is_prime_u64(q) {
        return Err(TheoremError::BadInput(format!("q = {q} must be prime")));
    }
    let residue = q % m;
    if residue < 2 || residue > m - 2 {
        return Err(TheoremError::QNotAdmissible { q, m });
    }
    let n = q_power(m, t)?;
    let params = build(&BigInt::from(q), &BigInt::from(p), n)?;
    let (cofactor, rem) = params.d.div_rem(&BigInt::from(m));
    if rem != BigInt::from(0) {
        return Err(TheoremError::MDoesNotDivideD { m, d: params.d });
    }
    Ok(ResidueFamilyReport {
        verdict: verdict_for(params, true)?,
        residue,
        cofactor,
    })
}

/// Verdicts for every prime `p <= p_max` with `gcd(a, p) = 1` and
/// `a^2 < 4 p^n`, sorted by `p`.
pub fn search_primes(a: u64, n: u32, p_max: u64, compute_h: bool) -> Result<Vec<Verdict>, TheoremError> {
    if a < 1 {
        return Err(ParamsError::ANotPositive(BigInt::from(a)).into());
    }
    if a % 2 == 0 {
        return Err(ParamsError::AEven(BigInt::from(a)).into());
    }
    if n < 3 || n % 2 == 0 {
        return Err(ParamsError::BadN(n).into());
    }
    let a_big = BigInt::from(a);
    let four = BigInt::from(4);
    let candidates: Vec<u64> = (2..=p_max)
        .filter(|&p| is_prime_u64(p) && a % p != 0)
        .filter(|&p| a_big.clone() * &a_big < &four * num_traits::pow(BigInt::from(p), n as usize))
        .collect();
    let mut out: Vec<Verdict> = candidates
        .into_par_iter()
        .map(|p| verify_u64(a, p, n, compute_h))
        .collect::<Result<_, _>>()?;
    out.sort_by(|x, y| x.params.p.cmp(&y.params.p));
    Ok(out)
}

/// `a = 1`, `p = 2`: `d` is the square-free part of `2^(n+2) - 1`.
pub fn cohn_preset(n: u32) -> Result<Verdict, TheoremError> {
    verify_u64(1, 2, n, true)
}

/// `(verified, total)` over a set of verdicts.
pub fn verified_fraction(verdicts: &[Verdict]) -> (usize, usize) {
    (verdicts.iter().filter(|v| v.subgroup_verified).count(), verdicts.len())
}
