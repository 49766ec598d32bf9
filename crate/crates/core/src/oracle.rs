//! Reference arithmetic on big integers.
//!
//! Nothing in this module touches circuits or the simulator; the
//! verification harness compares simulated registers against these
//! functions only.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn oracle_add(a: &BigUint, b: &BigUint) -> BigUint {
    a + b
}

/// `(y − x) mod 2^bits`.
pub fn oracle_wrapping_sub(y: &BigUint, x: &BigUint, bits: usize) -> BigUint {
    let wrap = BigUint::one() << bits;
    (y + &wrap - (x % &wrap)) % wrap
}

pub fn oracle_less(y: &BigUint, x: &BigUint) -> bool {
    y < x
}

pub fn oracle_modadd(a: &BigUint, b: &BigUint, modulus: &BigUint) -> BigUint {
    (a + b) % modulus
}

/// `a·x mod N` when the control is set, otherwise `x` untouched.
pub fn oracle_cmult(control: bool, x: &BigUint, a: &BigUint, modulus: &BigUint) -> BigUint {
    if control {
        (a * x) % modulus
    } else {
        x.clone()
    }
}

pub fn oracle_modexp(a: &BigUint, x: &BigUint, modulus: &BigUint) -> BigUint {
    // Plain binary powering, written out rather than delegated so the
    // reference is easy to audit.
    let mut acc = BigUint::one() % modulus;
    let mut base = a % modulus;
    let mut e = x.clone();
    while !e.is_zero() {
        if e.bit(0) {
            acc = acc * &base % modulus;
        }
        base = &base * &base % modulus;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn examples() {
        assert_eq!(oracle_modexp(&big(7), &big(3), &big(15)), big(13));
        assert_eq!(oracle_modexp(&big(7), &big(0), &big(15)), big(1));
        assert_eq!(oracle_modadd(&big(0), &big(4), &big(5)), big(4));
        assert_eq!(oracle_modadd(&big(3), &big(4), &big(5)), big(2));
        assert_eq!(oracle_cmult(false, &big(11), &big(4), &big(7)), big(11));
        assert_eq!(oracle_cmult(true, &big(3), &big(4), &big(7)), big(5));
        assert_eq!(oracle_add(&big(3), &big(4)), big(7));
        assert_eq!(oracle_wrapping_sub(&big(3), &big(5), 4), big(14));
        assert_eq!(oracle_wrapping_sub(&big(6), &big(2), 4), big(4));
        assert!(oracle_less(&big(3), &big(5)));
    }

    #[test]
    fn modexp_agrees_with_library_modpow() {
        for n in 2..40u64 {
            for a in 0..n {
                for x in 0..20u64 {
                    assert_eq!(
                        oracle_modexp(&big(a), &big(x), &big(n)),
                        big(a).modpow(&big(x), &big(n))
                    );
                }
            }
        }
    }
}
