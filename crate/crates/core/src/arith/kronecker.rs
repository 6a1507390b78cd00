use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Kronecker symbol `(a | n)` over the full integer domain.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i8 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n.clone();
    if n.sign() == Sign::Minus {
        n = -n;
        if a.sign() == Sign::Minus {
            result = -result;
        }
    }
    let twos = n.trailing_zeros().unwrap_or(0);
    if twos > 0 {
        if a.is_even() {
            return 0;
        }
        n >>= twos;
        let a8 = a.mod_floor(&BigInt::from(8)).to_u8().expect("residue mod 8");
        if twos % 2 == 1 && (a8 == 3 || a8 == 5) {
            result = -result;
        }
    }
    result * jacobi(&a.mod_floor(&n), &n)
}

/// Jacobi symbol for odd positive `n` and `0 <= a < n`.
fn jacobi(a: &BigInt, n: &BigInt) -> i8 {
    let mut a = a.clone();
    let mut n = n.clone();
    let mut result: i8 = 1;
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        let twos = a.trailing_zeros().unwrap_or(0);
        a >>= twos;
        let n8 = n.mod_floor(&eight).to_u8().expect("residue mod 8");
        if twos % 2 == 1 && (n8 == 3 || n8 == 5) {
            result = -result;
        }
        if a.mod_floor(&four) == BigInt::from(3) && n.mod_floor(&four) == BigInt::from(3) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}
