//! Exact arithmetic kernels.
//!
//! Everything downstream (homology solving, Hecke operators, point counts,
//! L-factor algebra) is built on the types in this module: arbitrary-precision
//! rationals, elements of quadratic fields stored as exact pairs, small finite
//! fields F_{p^r} with a deterministic modulus, Dirichlet characters with exact
//! root-of-unity values, and integer polynomials.
//!
//! No floating point is used anywhere in this module; the one numerical path
//! in the crate is the Weil root check in `lfactors`.

pub mod dirichlet;
pub mod fq;
pub mod poly;
pub mod quad;
pub mod reconstruct;

pub use dirichlet::DirichletChar;
pub use fq::{Fq, Fq2, Fq2Elem, FqElem};
pub use poly::IntPolynomial;
pub use quad::QuadElem;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number: reduced fraction with positive denominator.
pub type BigRat = BigRational;

/// Build a rational from small integers.
pub fn rat(n: i64, d: i64) -> BigRat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Build a rational integer.
pub fn rat_int(n: i64) -> BigRat {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// Prime expected (odd where stated) and not provided.
    NotOddPrime(u64),
    NotPrime(u64),
    /// A finite-field modulus failed the internal irreducibility check.
    ReducibleModulus,
    /// Mixing elements of incompatible quadratic fields.
    MixedDiscriminants(i64, i64),
    BadCharacter(String),
}

impl std::fmt::Display for ArithError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArithError::NotOddPrime(p) => write!(f, "{} is not an odd prime", p),
            ArithError::NotPrime(p) => write!(f, "{} is not prime", p),
            ArithError::ReducibleModulus => write!(f, "finite field modulus is reducible"),
            ArithError::MixedDiscriminants(a, b) => {
                write!(f, "incompatible quadratic fields: sqrt({}) vs sqrt({})", a, b)
            }
            ArithError::BadCharacter(s) => write!(f, "invalid Dirichlet character: {}", s),
        }
    }
}

impl std::error::Error for ArithError {}

/// Deterministic trial-division primality test; fine at desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// gcd on u64.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Modular inverse of `a` mod `m` (m > 1), if it exists.
pub fn mod_inv_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r.abs() != 1 {
        return None;
    }
    // old_r may be -1 when inputs were swapped by sign; normalize.
    let inv = old_s * old_r.signum();
    Some(inv.rem_euclid(m as i128) as u64)
}

/// a*b mod m without overflow for m < 2^63.
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a^e mod m.
pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Legendre-style quadratic character of `a` mod an odd prime `p`,
/// with values in {-1, 0, 1}. Completely multiplicative in `a`.
pub fn quadratic_character(a: i64, p: u64) -> Result<i32, ArithError> {
    if p == 2 || !is_prime(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    let s = pow_mod(r, (p - 1) / 2, p);
    Ok(if s == 1 { 1 } else { -1 })
}

/// Smallest primitive root modulo an odd prime.
pub fn primitive_root(p: u64) -> Result<u64, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    for g in 2..p {
        if factors.iter().all(|&q| pow_mod(g, phi / q, p) != 1) {
            return Ok(g);
        }
    }
    unreachable!("every prime has a primitive root")
}

/// Deterministic xorshift-style generator for randomized exact tests and
/// the sampling subcommands. Not cryptographic.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Uniform in [lo, hi] inclusive.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.below((hi - lo + 1) as u64) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    }

    #[test]
    fn quadratic_character_examples() {
        assert_eq!(quadratic_character(1, 7).unwrap(), 1);
        assert_eq!(quadratic_character(0, 7).unwrap(), 0);
        // squares mod 7 are {1, 2, 4}
        assert_eq!(quadratic_character(3, 7).unwrap(), -1);
        assert!(quadratic_character(3, 8).is_err());
        assert!(quadratic_character(3, 2).is_err());
    }

    #[test]
    fn quadratic_character_matches_enumeration() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            let squares: std::collections::HashSet<u64> =
                (1..p).map(|x| mul_mod(x, x, p)).collect();
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(quadratic_character(a as i64, p).unwrap(), expect, "a={} p={}", a, p);
            }
        }
    }

    #[test]
    fn quadratic_character_multiplicative() {
        let p = 43;
        for a in -20i64..20 {
            for b in -20i64..20 {
                let lhs = quadratic_character(a * b, p).unwrap();
                let rhs = quadratic_character(a, p).unwrap() * quadratic_character(b, p).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn mod_inverse_roundtrip() {
        for m in [7u64, 12, 245, 1 << 31] {
            for a in 1..50u64 {
                match mod_inv_u64(a, m) {
                    Some(inv) => assert_eq!(mul_mod(a % m, inv, m), 1 % m),
                    None => assert!(gcd_u64(a, m) > 1),
                }
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7).unwrap(), 3);
        for p in [3u64, 5, 7, 11, 13, 101] {
            let g = primitive_root(p).unwrap();
            let mut seen = std::collections::HashSet::new();
            let mut x = 1;
            for _ in 0..p - 1 {
                x = mul_mod(x, g, p);
                seen.insert(x);
            }
            assert_eq!(seen.len() as u64, p - 1);
        }
    }
}
