//! Factor census of Hecke characteristic polynomials.
//!
//! Everything asserted downstream only needs the irreducible factors of
//! degree at most four (rational eigenvalues, quadratic eigenvalue fields,
//! one quartic block), so instead of a general factorization we:
//!
//!   1. factor the squarefree part of charpoly modulo one large prime
//!      (~2^62, so symmetric lifts cover every coefficient a bounded-root
//!      factor can have),
//!   2. enumerate subset products of total degree <= 4, lift symmetrically,
//!      and discard anything violating the root bound |alpha| <= 1+p+p^2
//!      (every Hecke eigenvalue of E_p or D_p obeys it),
//!   3. verify survivors by exact division over Z, with multiplicity.
//!
//! Degrees are processed upward and found factors divided out completely,
//! so recorded factors are irreducible over Q: a reducible candidate would
//! have had a proper factor removed first and cannot divide the remainder.
//! Whatever is left is reported as an unresolved block, never guessed.

use super::{HeckeError, HeckeMatrix};
use crate::arith::IntPolynomial;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use std::collections::BTreeMap;
use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub charpoly: IntPolynomial,
    /// (irreducible factor over Q, multiplicity), sorted by degree then
    /// coefficients.
    pub factors: Vec<(IntPolynomial, usize)>,
    /// Degree of the cofactor not resolved into factors of degree <= 4.
    pub unresolved_degree: usize,
}

impl SpectrumReport {
    /// Number of rational eigenvalues counted with multiplicity.
    pub fn rational_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|(f, _)| f.degree() == Some(1))
            .map(|(_, m)| *m)
            .sum()
    }

    pub fn rational_eigenvalues(&self) -> Vec<(BigInt, usize)> {
        self.factors
            .iter()
            .filter(|(f, _)| f.degree() == Some(1))
            .map(|(f, m)| (-f.coeff(0), *m))
            .collect()
    }

    /// degree -> dimension contributed (degree times multiplicity summed).
    pub fn degree_census(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for (f, m) in &self.factors {
            let d = f.degree().unwrap_or(0);
            *out.entry(d).or_insert(0) += d * m;
        }
        out
    }

    pub fn multiplicity_of(&self, g: &IntPolynomial) -> usize {
        self.factors.iter().find(|(f, _)| f == g).map(|(_, m)| *m).unwrap_or(0)
    }
}

/// Squarefree part of the discriminant of a monic quadratic X^2 + bX + c,
/// i.e. the d with roots in Q(sqrt(d)). None if the quadratic is reducible.
pub fn quadratic_field(f: &IntPolynomial) -> Option<i64> {
    if f.degree() != Some(2) || !f.is_monic() {
        return None;
    }
    let b = f.coeff(1);
    let c = f.coeff(0);
    let disc = &b * &b - BigInt::from(4) * &c;
    let d = disc.to_i64().expect("desk-scale discriminant");
    if d == 0 {
        return None;
    }
    let mut squarefree = d;
    let mut k = 2i64;
    while k * k <= squarefree.abs() {
        while squarefree % (k * k) == 0 {
            squarefree /= k * k;
        }
        k += 1;
    }
    // perfect square discriminant => rational roots, not a field
    if squarefree == 1 {
        None
    } else {
        Some(squarefree)
    }
}

/// Census of the characteristic polynomial of a Hecke operator, using the
/// eigenvalue bound 1 + p + p^2.
pub fn spectrum_fields(h: &HeckeMatrix) -> Result<SpectrumReport, HeckeError> {
    let f = super::charpoly(h);
    let bound = BigInt::from(1 + h.p + h.p * h.p);
    Ok(factor_bounded(&f, &bound))
}

/// Factor out all irreducible factors of degree <= 4 whose roots are bounded
/// by `root_bound` in absolute value.
pub fn factor_bounded(f: &IntPolynomial, root_bound: &BigInt) -> SpectrumReport {
    assert!(f.is_monic(), "factor census expects a monic polynomial");
    let ell = big_prime();
    let mut remainder = f.clone();
    let mut factors: Vec<(IntPolynomial, usize)> = Vec::new();

    let candidates = candidate_factors(f, root_bound, ell);
    for cand in candidates {
        if remainder.degree() == Some(0) {
            break;
        }
        let mult = remainder.multiplicity_of(&cand);
        if mult > 0 {
            for _ in 0..mult {
                remainder = remainder.div_rem_monic(&cand).0;
            }
            factors.push((cand, mult));
        }
    }
    let unresolved_degree = remainder.degree().unwrap_or(0);
    // sanity: found factors times remainder reproduces the input
    debug_assert!({
        let mut prod = remainder.clone();
        for (g, m) in &factors {
            for _ in 0..*m {
                prod = prod.mul(g);
            }
        }
        prod == *f
    });
    SpectrumReport { charpoly: f.clone(), factors, unresolved_degree }
}

/// Candidate degree <= 4 factors: subset products of the mod-ell factors of
/// the squarefree part, lifted symmetrically and filtered by coefficient
/// bounds binom(d,k) * R^k. Sorted by degree then coefficients.
fn candidate_factors(f: &IntPolynomial, root_bound: &BigInt, ell: u64) -> Vec<IntPolynomial> {
    let fb = f.reduce_mod(ell);
    if fb.len() != f.coeffs().len() {
        // ell divides the leading coefficient; cannot happen for monic f
        panic!("modular image degenerated");
    }
    let sqf = squarefree_part(&fb, ell);
    let small_factors = factor_small_degrees(&sqf, ell, 4);

    // coefficient bounds per degree
    let bounds: Vec<Vec<BigInt>> = (0..=4usize)
        .map(|d| {
            (0..=d)
                .map(|k| binom(d, k) * root_bound.pow(k as u32))
                .collect()
        })
        .collect();

    let mut set = std::collections::HashSet::new();
    let mut out = Vec::new();
    // DFS over subset products of total degree <= 4
    let mut stack: Vec<(usize, Vec<u64>, usize)> = vec![(0, vec![1], 0)];
    while let Some((idx, prod, deg)) = stack.pop() {
        if deg >= 1 {
            if let Some(lifted) = lift_and_filter(&prod, deg, &bounds[deg], ell) {
                if set.insert(lifted.clone()) {
                    out.push(lifted);
                }
            }
        }
        for (j, (g, gd)) in small_factors.iter().enumerate().skip(idx) {
            if deg + gd > 4 {
                continue;
            }
            let np = poly_mul_mod(&prod, g, ell);
            stack.push((j + 1, np, deg + gd));
        }
    }
    out.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    out
}

fn binom(n: usize, k: usize) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

fn lift_and_filter(
    prod: &[u64],
    deg: usize,
    bounds: &[BigInt],
    ell: u64,
) -> Option<IntPolynomial> {
    if prod.len() != deg + 1 {
        return None;
    }
    let half = ell / 2;
    let mut coeffs = Vec::with_capacity(deg + 1);
    for (k, &c) in prod.iter().enumerate() {
        let lifted: i64 = if c > half { -((ell - c) as i64) } else { c as i64 };
        if k < deg {
            // coefficient of X^k bounds: binom(d, d-k) * R^{d-k}
            let b = &bounds[deg - k];
            if BigInt::from(lifted).abs() > *b {
                return None;
            }
        }
        coeffs.push(BigInt::from(lifted));
    }
    if coeffs[deg] != BigInt::one() {
        return None;
    }
    Some(IntPolynomial::from_coeffs(coeffs))
}

// ---- dense polynomial arithmetic mod a (large) prime ----

fn poly_trim(v: &mut Vec<u64>) {
    while matches!(v.last(), Some(0)) {
        v.pop();
    }
}

fn poly_mul_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] as u128 + x as u128 * y as u128 % p as u128) as u64 % p;
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_rem_mod(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    // f monic
    let d = f.len() - 1;
    let mut r = a.to_vec();
    while r.len() > d {
        let lead = *r.last().unwrap();
        let k = r.len() - 1 - d;
        if lead != 0 {
            for i in 0..d {
                let sub = crate::arith::mul_mod(f[i], lead, p);
                r[k + i] = (r[k + i] + p - sub) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    poly_trim(&mut r);
    r
}

fn poly_make_monic(a: &[u64], p: u64) -> Vec<u64> {
    let mut v = a.to_vec();
    poly_trim(&mut v);
    if v.is_empty() {
        return v;
    }
    let inv = crate::arith::mod_inv_u64(*v.last().unwrap(), p).unwrap();
    for x in &mut v {
        *x = crate::arith::mul_mod(*x, inv, p);
    }
    v
}

fn poly_gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let bm = poly_make_monic(&b, p);
        let r = poly_rem_mod(&a, &bm, p);
        a = b;
        b = r;
    }
    poly_make_monic(&a, p)
}

fn poly_derivative_mod(a: &[u64], p: u64) -> Vec<u64> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let mut out: Vec<u64> = a[1..]
        .iter()
        .enumerate()
        .map(|(i, &c)| crate::arith::mul_mod(c, (i as u64 + 1) % p, p))
        .collect();
    poly_trim(&mut out);
    out
}

fn poly_powmod(base: &[u64], exp: &BigInt, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem_mod(base, f, p);
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            acc = poly_rem_mod(&poly_mul_mod(&acc, &b, p), f, p);
        }
        if i + 1 < bits {
            b = poly_rem_mod(&poly_mul_mod(&b, &b, p), f, p);
        }
    }
    acc
}

/// Squarefree part f / gcd(f, f').
fn squarefree_part(f: &[u64], p: u64) -> Vec<u64> {
    let df = poly_derivative_mod(f, p);
    if df.is_empty() {
        // cannot happen for our charpolys: p is astronomically larger than
        // the degree, so f' = 0 would force f constant
        return poly_make_monic(f, p);
    }
    let g = poly_gcd_mod(f, &df, p);
    if g.len() == 1 {
        return poly_make_monic(f, p);
    }
    poly_div_exact_mod(&poly_make_monic(f, p), &g, p)
}

fn poly_div_exact_mod(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    // long division, remainder known zero, f monic
    let d = f.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0u64; r.len().saturating_sub(d)];
    while r.len() > d {
        let lead = *r.last().unwrap();
        let k = r.len() - 1 - d;
        q[k] = lead;
        if lead != 0 {
            for i in 0..d {
                let sub = crate::arith::mul_mod(f[i], lead, p);
                r[k + i] = (r[k + i] + p - sub) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    poly_trim(&mut q);
    q
}

/// Distinct-degree + equal-degree factorization restricted to factor degrees
/// <= max_d, on a squarefree monic input. Returns (factor, degree) pairs.
fn factor_small_degrees(f: &[u64], p: u64, max_d: usize) -> Vec<(Vec<u64>, usize)> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let mut xp = vec![0u64, 1]; // will hold X^{p^k} mod f
    let pb = BigInt::from(p);
    for d in 1..=max_d {
        if rest.len() - 1 < d {
            break;
        }
        xp = poly_powmod(&xp, &pb, &rest, p);
        // gcd(X^{p^d} - X, rest)
        let mut diff = xp.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        let g = poly_gcd_mod(&diff, &rest, p);
        if g.len() > 1 {
            for part in equal_degree_split(&g, d, p) {
                out.push((part, d));
            }
            rest = poly_div_exact_mod(&rest, &g, p);
            // X^{p^d} was computed mod the old rest; reduce mod the new one
            xp = poly_rem_mod(&xp, &rest, p);
            if rest.len() <= 1 {
                break;
            }
        }
    }
    out.sort();
    out
}

/// Cantor-Zassenhaus equal-degree splitting (odd p), deterministic seed.
fn equal_degree_split(f: &[u64], d: usize, p: u64) -> Vec<Vec<u64>> {
    let deg = f.len() - 1;
    if deg == d {
        return vec![poly_make_monic(f, p)];
    }
    let mut rng = crate::arith::SplitMix64::new(0xC25EED ^ deg as u64);
    let exp = (BigInt::from(p).pow(d as u32) - BigInt::one()) / BigInt::from(2);
    loop {
        // random polynomial of degree < deg
        let mut a: Vec<u64> = (0..deg).map(|_| rng.below(p)).collect();
        poly_trim(&mut a);
        if a.len() <= 1 {
            continue;
        }
        let mut b = poly_powmod(&a, &exp, f, p);
        if b.is_empty() {
            continue;
        }
        b[0] = (b[0] + p - 1) % p;
        poly_trim(&mut b);
        let g = poly_gcd_mod(&b, f, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = poly_div_exact_mod(f, &g, p);
            let mut out = equal_degree_split(&g, d, p);
            out.extend(equal_degree_split(&h, d, p));
            return out;
        }
    }
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = crate::arith::pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = crate::arith::mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest prime below 2^62: symmetric lifts cover every coefficient a
/// degree <= 4 factor with roots <= 1+173+173^2 can have.
fn big_prime() -> u64 {
    static P: OnceLock<u64> = OnceLock::new();
    *P.get_or_init(|| {
        let mut n = (1u64 << 62) - 1;
        while !is_prime_u64(n) {
            n -= 2;
        }
        n
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), crate::arith::is_prime(n), "n={}", n);
        }
        assert!(is_prime_u64(2147483647));
        assert!(!is_prime_u64((1 << 62) - 1));
    }

    #[test]
    fn factor_known_product() {
        // (X^2 - 2X + 5)(X - 1)^2 (X - 7)
        let q = IntPolynomial::from_i64(&[5, -2, 1]);
        let l1 = IntPolynomial::from_i64(&[-1, 1]);
        let l7 = IntPolynomial::from_i64(&[-7, 1]);
        let f = q.mul(&l1).mul(&l1).mul(&l7);
        let rep = factor_bounded(&f, &BigInt::from(10));
        assert_eq!(rep.unresolved_degree, 0);
        assert_eq!(rep.multiplicity_of(&q), 1);
        assert_eq!(rep.multiplicity_of(&l1), 2);
        assert_eq!(rep.multiplicity_of(&l7), 1);
        assert_eq!(rep.rational_count(), 3);
    }

    #[test]
    fn quartic_factor_found() {
        // X^4 + 1 is irreducible over Q; roots have absolute value 1
        let quartic = IntPolynomial::from_i64(&[1, 0, 0, 0, 1]);
        let f = quartic.mul(&IntPolynomial::from_i64(&[-2, 1]));
        let rep = factor_bounded(&f, &BigInt::from(3));
        assert_eq!(rep.unresolved_degree, 0);
        assert_eq!(rep.multiplicity_of(&quartic), 1);
    }

    #[test]
    fn unresolved_degree_reported() {
        // X^5 - X - 1 is irreducible over Q (degree 5 > 4)
        let quintic = IntPolynomial::from_i64(&[-1, -1, 0, 0, 0, 1]);
        let f = quintic.mul(&IntPolynomial::from_i64(&[-1, 1]));
        let rep = factor_bounded(&f, &BigInt::from(4));
        assert_eq!(rep.unresolved_degree, 5);
        assert_eq!(rep.rational_count(), 1);
    }

    #[test]
    fn quadratic_field_classification() {
        let f = IntPolynomial::from_i64(&[52, 10, 1]); // X^2 + 10X + 52, disc -108
        assert_eq!(quadratic_field(&f), Some(-3));
        let g = IntPolynomial::from_i64(&[-1, 0, 1]); // (X-1)(X+1)
        assert_eq!(quadratic_field(&g), None);
        let h = IntPolynomial::from_i64(&[-1, -4, 1]); // disc 20 -> 5
        assert_eq!(quadratic_field(&h), Some(5));
    }

    #[test]
    fn root_bound_filter_respected() {
        // (X - 100) divides, but the bound 10 must exclude it from factors
        let f = IntPolynomial::from_i64(&[-100, 1]).mul(&IntPolynomial::from_i64(&[-2, 1]));
        let rep = factor_bounded(&f, &BigInt::from(10));
        assert_eq!(rep.multiplicity_of(&IntPolynomial::from_i64(&[-2, 1])), 1);
        assert_eq!(rep.unresolved_degree, 1);
    }
}
