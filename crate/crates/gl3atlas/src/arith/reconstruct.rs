//! Chinese remaindering and rational reconstruction.
//!
//! The exact linear algebra runs modulo word-size primes; results are lifted
//! to Q by CRT plus Wang-style rational reconstruction and then verified
//! exactly, so the modular shortcuts never leak into the final answers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Primes just under 2^31, so products of two residues fit in u64.
pub const SOLVE_PRIMES: [u64; 12] = [
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549, 2147483543,
    2147483497, 2147483489, 2147483477, 2147483423, 2147483399,
];

/// Combine residues `(r_i mod m_i)` into the residue mod the product.
/// Moduli must be pairwise coprime.
pub fn crt(residues: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for &(r, p) in residues {
        let pb = BigInt::from(p);
        let rb = BigInt::from(r);
        if m.is_one() {
            x = rb;
            m = pb;
            continue;
        }
        // solve x' = x (mod m), x' = r (mod p)
        let minv = mod_inverse_big(&m, &pb).expect("CRT moduli not coprime");
        let diff = (&rb - &x).mod_floor(&pb);
        let t = (diff * minv).mod_floor(&pb);
        x += &m * t;
        m *= pb;
        x = x.mod_floor(&m);
    }
    (x, m)
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Symmetric lift of `x mod m` into (-m/2, m/2].
pub fn symmetric_lift(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Rational reconstruction: find n/d with n = x*d (mod m), |n| <= bound,
/// 0 < d <= bound, gcd(d, m) = 1, where bound = floor(sqrt(m/2)).
/// Returns None if no such fraction exists.
pub fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m / BigInt::from(2)).sqrt();
    let mut r0 = m.clone();
    let mut r1 = x.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if !num.gcd(&den).is_one() {
        return None;
    }
    Some((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crt_two_primes() {
        let p1 = SOLVE_PRIMES[0];
        let p2 = SOLVE_PRIMES[1];
        let value = BigInt::from(-123456789i64);
        let r1 = value.mod_floor(&BigInt::from(p1));
        let r2 = value.mod_floor(&BigInt::from(p2));
        let (x, m) = crt(&[
            (r1.to_string().parse().unwrap(), p1),
            (r2.to_string().parse().unwrap(), p2),
        ]);
        assert_eq!(symmetric_lift(&x, &m), value);
    }

    #[test]
    fn rational_reconstruction_roundtrip() {
        let p1 = BigInt::from(SOLVE_PRIMES[0]);
        let p2 = BigInt::from(SOLVE_PRIMES[1]);
        let m = &p1 * &p2;
        for (n, d) in [(1i64, 3i64), (-7, 2), (22, 7), (-100003, 99991), (0, 1)] {
            let nb = BigInt::from(n);
            let db = BigInt::from(d);
            let dinv = mod_inverse_big(&db, &m).unwrap();
            let x = (nb.mod_floor(&m) * dinv).mod_floor(&m);
            let (rn, rd) = rational_reconstruct(&x, &m).unwrap();
            assert_eq!((rn, rd), (nb, db), "n={} d={}", n, d);
        }
    }

    #[test]
    fn reconstruction_fails_for_huge_numerator() {
        // x random-looking: overwhelmingly unlikely to be a small fraction mod
        // a single word-size prime times another.
        let m = BigInt::from(SOLVE_PRIMES[0]) * BigInt::from(SOLVE_PRIMES[1]);
        let x = BigInt::parse_bytes(b"1234567890123456789012345678", 10).unwrap().mod_floor(&m);
        if let Some((n, d)) = rational_reconstruct(&x, &m) {
            // if it does reconstruct, it must round-trip
            let dinv = mod_inverse_big(&d, &m).unwrap();
            assert_eq!((n.mod_floor(&m) * dinv).mod_floor(&m), x);
        }
    }
}
