//! Exact integer arithmetic used by the post-processing: gcd, inverses,
//! signed residues, continued fractions, CRT and small brute-force oracles.
//!
//! Everything here is integer or rational; floating point never enters.

use serde::Serialize;

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Extended Euclid: returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b)`.
pub fn ext_gcd(a: u64, b: u64) -> Result<(u64, i64, i64)> {
    if a == 0 && b == 0 {
        return Err(Error::invalid("ext_gcd(0, 0) is undefined"));
    }
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut u0, mut u1) = (1i128, 0i128);
    let (mut v0, mut v1) = (0i128, 1i128);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (u0, u1) = (u1, u0 - quot * u1);
        (v0, v1) = (v1, v0 - quot * v1);
    }
    Ok((r0 as u64, u0 as i64, v0 as i64))
}

/// Inverse of `c` modulo `n`.
pub fn modinv(c: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if n == 1 {
        return Ok(0);
    }
    let c = c % n;
    let (g, u, _) = ext_gcd(c, n).map_err(|_| Error::NotCoprime { value: c, modulus: n, gcd: n })?;
    if g != 1 {
        return Err(Error::NotCoprime { value: c, modulus: n, gcd: g });
    }
    Ok((u as i128).rem_euclid(n as i128) as u64)
}

pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut sq = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, sq, n);
        }
        sq = mul_mod(sq, sq, n);
        exp >>= 1;
    }
    acc
}

/// Number of bits needed to write `n` (0 for 0).
pub fn bit_length(n: u64) -> u32 {
    u64::BITS - n.leading_zeros()
}

/// `z mod q` represented in `(-q/2, q/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignedResidue {
    pub value: i64,
    pub modulus: u64,
}

pub fn signed_residue(z: i64, q: u64) -> Result<SignedResidue> {
    if q == 0 {
        return Err(Error::invalid("signed residue modulo 0"));
    }
    Ok(SignedResidue { value: signed_rem(z as i128, q as i128) as i64, modulus: q })
}

/// Representative of `z mod q` in `(-q/2, q/2]`.
pub(crate) fn signed_rem(z: i128, q: i128) -> i128 {
    let r = z.rem_euclid(q);
    if 2 * r > q {
        r - q
    } else {
        r
    }
}

/// A fraction `numerator/denominator` in lowest terms drawn from the
/// continued-fraction expansion of some `c/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub numerator: u64,
    pub denominator: u64,
    /// Index of the partial quotient that produced this fraction.
    pub index: usize,
}

/// Partial quotients of the continued fraction of `num/den`.
pub fn continued_fraction(mut num: u64, mut den: u64) -> Vec<u64> {
    let mut terms = Vec::new();
    while den != 0 {
        terms.push(num / den);
        (num, den) = (den, num % den);
    }
    terms
}

/// All convergents of `num/den`, in order.
pub fn convergents(num: u64, den: u64) -> Vec<Convergent> {
    let mut out = Vec::new();
    let (mut p_prev, mut p) = (0u128, 1u128);
    let (mut q_prev, mut q) = (1u128, 0u128);
    for (index, &a) in continued_fraction(num, den).iter().enumerate() {
        let a = a as u128;
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, q) = (q, a * q + q_prev);
        out.push(Convergent { numerator: p as u64, denominator: q as u64, index });
    }
    out
}

/// Fraction `d/r` in lowest terms with `r < bound` and `|c/q - d/r| <= 1/(2q)`,
/// choosing the smallest such denominator. `None` when there is none.
///
/// Scans the convergents of `c/q` together with the intermediate fractions
/// between consecutive convergents. The smallest-denominator fraction inside
/// the interval is a best approximation of the first kind, so it always
/// appears in that scan.
pub fn nearest_fraction(c: u64, q: u64, bound: u64) -> Option<Convergent> {
    if q == 0 || c >= q || bound < 2 {
        return None;
    }
    let within = |d: u128, r: u128| -> bool {
        // |c/q - d/r| <= 1/(2q)  <=>  2|c r - d q| <= r
        let lhs = (c as u128 * r).abs_diff(d * q as u128);
        2 * lhs <= r
    };
    let (mut p_prev, mut p) = (0u128, 1u128);
    let (mut q_prev, mut qq) = (1u128, 0u128);
    for (index, &a) in continued_fraction(c, q).iter().enumerate() {
        let a = a as u128;
        // intermediate fractions (p_prev + j p)/(q_prev + j qq), j = 1..=a;
        // j = a is the next convergent itself
        let start = if index == 0 { a } else { 1 };
        for j in start..=a {
            let num = p_prev + j * p;
            let den = q_prev + j * qq;
            if den >= bound as u128 {
                return None;
            }
            if within(num, den) {
                return Some(Convergent { numerator: num as u64, denominator: den as u64, index });
            }
        }
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, qq) = (qq, a * qq + q_prev);
    }
    None
}

/// Solves the system `x = r_i (mod m_i)` for pairwise coprime moduli.
/// Returns `(x, M)` with `0 <= x < M = prod m_i`.
pub fn crt(residues: &[(u64, u64)]) -> Result<(u64, u64)> {
    let mut value = 0u128;
    let mut modulus = 1u128;
    for &(r, m) in residues {
        if m == 0 {
            return Err(Error::invalid("CRT modulus 0"));
        }
        let g = gcd(modulus as u64, m);
        if g != 1 {
            return Err(Error::NotCoprime { value: m, modulus: modulus as u64, gcd: g });
        }
        let r = (r % m) as u128;
        let m128 = m as u128;
        // value + modulus * t = r (mod m)
        let inv = modinv((modulus % m128) as u64, m)? as u128;
        let diff = (r + m128 - value % m128) % m128;
        let t = diff * inv % m128;
        value += modulus * t;
        modulus *= m128;
        if modulus > u64::MAX as u128 {
            return Err(Error::invalid("CRT modulus overflows 64 bits"));
        }
    }
    Ok((value as u64, modulus as u64))
}

/// Least `r >= 1` with `x^r = 1 (mod n)`, by iteration.
pub fn brute_order(x: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid("order needs n >= 2"));
    }
    let g = gcd(x % n, n);
    if g != 1 {
        return Err(Error::NotCoprime { value: x, modulus: n, gcd: g });
    }
    let x = x % n;
    let mut acc = x;
    let mut r = 1;
    while acc != 1 {
        acc = mul_mod(acc, x, n);
        r += 1;
    }
    Ok(r)
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Euler's totient by trial division.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Shape of a factoring input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum NClass {
    Even,
    Prime,
    PrimePower { p: u64, k: u32 },
    /// Odd, with at least two distinct prime factors.
    CompositeOk,
}

pub fn classify_n(n: u64) -> Result<NClass> {
    if n < 2 {
        return Err(Error::invalid(format!("cannot classify {n}")));
    }
    if n.is_multiple_of(2) {
        return Ok(NClass::Even);
    }
    match factorize(n).as_slice() {
        [(_, 1)] => Ok(NClass::Prime),
        [(p, k)] => Ok(NClass::PrimePower { p: *p, k: *k }),
        _ => Ok(NClass::CompositeOk),
    }
}
