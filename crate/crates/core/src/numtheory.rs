//! Classical precomputation: gcd, modular powers and inverses.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberTheoryError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("{value} has no inverse modulo {modulus} (gcd = {gcd})")]
    NotCoprime { value: u64, modulus: u64, gcd: u64 },
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> Result<u64, NumberTheoryError> {
    if modulus < 2 {
        return Err(NumberTheoryError::ModulusTooSmall(modulus));
    }
    let mut acc = 1;
    let mut sq = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, sq, modulus);
        }
        sq = mul_mod(sq, sq, modulus);
        exp >>= 1;
    }
    Ok(acc)
}

/// The unique `u` in `1..modulus` with `value * u ≡ 1 (mod modulus)`,
/// found with the extended Euclidean algorithm.
pub fn mod_inverse(value: u64, modulus: u64) -> Result<u64, NumberTheoryError> {
    if modulus < 2 {
        return Err(NumberTheoryError::ModulusTooSmall(modulus));
    }
    // Invariant: r_i ≡ s_i * value (mod modulus).
    let (mut r0, mut r1) = (modulus as i128, (value % modulus) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(NumberTheoryError::NotCoprime {
            value,
            modulus,
            gcd: r0 as u64,
        });
    }
    Ok(s0.rem_euclid(modulus as i128) as u64)
}
