//! Exact integer helpers: factorials, multinomials, primality and reduction
//! of rationals into a prime field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::LinalgError;

/// `n!` as a big integer.
pub fn factorial(n: i64) -> Result<BigInt, LinalgError> {
    if n < 0 {
        return Err(LinalgError::NegativeArgument(n));
    }
    Ok((1..=n).fold(BigInt::one(), |acc, x| acc * x))
}

/// `(a_1 + ... + a_r)! / (a_1! ... a_r!)`.
pub fn multinomial(parts: &[i64]) -> Result<BigInt, LinalgError> {
    if let Some(&bad) = parts.iter().find(|&&a| a < 0) {
        return Err(LinalgError::NegativeArgument(bad));
    }
    // product of binomials keeps the intermediates small
    let mut acc = BigInt::one();
    let mut total: i64 = 0;
    for &a in parts {
        for t in 1..=a {
            total += 1;
            acc = acc * total / t;
        }
    }
    Ok(acc)
}

/// Deterministic trial division; adequate for every prime this crate meets.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd primes in `[lo, hi]`, ascending.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&q| q % 2 == 1 && is_prime(q)).collect()
}

pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(p as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(p as i128) as u64)
}

/// Least nonnegative residue of a big integer.
pub fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// `num * den^{-1}` in `F_p`.
pub fn reduce_mod_p(q: &BigRational, p: u64) -> Result<u64, LinalgError> {
    let den = bigint_mod(q.denom(), p);
    if den == 0 {
        return Err(LinalgError::PDividesDenominator { p, value: q.to_string() });
    }
    let inv = mod_inverse(den, p).ok_or(LinalgError::PDividesDenominator { p, value: q.to_string() })?;
    let num = bigint_mod(q.numer(), p);
    Ok(((num as u128 * inv as u128) % p as u128) as u64)
}

/// Sign `(-1)^e` as a big integer.
pub fn sign_pow(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}
