//! Exact characteristic polynomials of Hecke matrices.
//!
//! Production path: Hessenberg reduction and the standard recurrence modulo
//! word-size primes, CRT-lifted until the symmetric lifts stabilize, then
//! verified against one extra prime. Hecke eigenvalues are algebraic
//! integers, so the true polynomial has integer coefficients; stabilization
//! plus the extra-prime check certifies the lift.
//!
//! `charpoly_exact_dense` is the independent oracle: Faddeev-LeVerrier over
//! exact rationals, feasible up to dimension ~20.

use super::HeckeMatrix;
use crate::arith::reconstruct::{crt, symmetric_lift, SOLVE_PRIMES};
use crate::arith::{mod_inv_u64, mul_mod, BigRat, IntPolynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn charpoly(h: &HeckeMatrix) -> IntPolynomial {
    charpoly_rational(&h.mat)
}

/// Multi-modular characteristic polynomial of a rational matrix with
/// integral charpoly.
pub fn charpoly_rational(mat: &[Vec<BigRat>]) -> IntPolynomial {
    let n = mat.len();
    if n == 0 {
        return IntPolynomial::one();
    }
    let mut residues: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut prev_lift: Option<Vec<BigInt>> = None;
    for &p in SOLVE_PRIMES.iter().chain(EXTRA_PRIMES.iter()) {
        let Some(reduced) = reduce_matrix_mod(mat, p) else { continue };
        residues.push((p, charpoly_mod_p(reduced, p)));
        let lift = lift_coeffs(&residues, n);
        if let (Some(prev), Some(cur)) = (&prev_lift, &lift) {
            if prev == cur {
                // stabilized; cur already includes the verifying prime
                return IntPolynomial::from_coeffs(cur.clone());
            }
        }
        prev_lift = lift;
    }
    panic!("characteristic polynomial did not stabilize; coefficients too large");
}

const EXTRA_PRIMES: [u64; 20] = [
    2147483353, 2147483323, 2147483269, 2147483249, 2147483237, 2147483179, 2147483171,
    2147483137, 2147483123, 2147483077, 2147483069, 2147483059, 2147483053, 2147483033,
    2147483029, 2147482951, 2147482949, 2147482943, 2147482937, 2147482921,
];

fn reduce_matrix_mod(mat: &[Vec<BigRat>], p: u64) -> Option<Vec<Vec<u64>>> {
    let pb = BigInt::from(p);
    let mut out = Vec::with_capacity(mat.len());
    for row in mat {
        let mut r = Vec::with_capacity(row.len());
        for x in row {
            let den = x.denom().mod_floor(&pb);
            if den.is_zero() {
                return None; // bad prime for this matrix
            }
            let num = x.numer().mod_floor(&pb);
            let den_u = big_to_u64(&den);
            let num_u = big_to_u64(&num);
            r.push(mul_mod(num_u, mod_inv_u64(den_u, p)?, p));
        }
        out.push(r);
    }
    Some(out)
}

fn big_to_u64(x: &BigInt) -> u64 {
    // x is already reduced into [0, p)
    x.to_string().parse::<u64>().unwrap()
}

fn lift_coeffs(residues: &[(u64, Vec<u64>)], n: usize) -> Option<Vec<BigInt>> {
    if residues.is_empty() {
        return None;
    }
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let rs: Vec<(u64, u64)> = residues.iter().map(|(p, cs)| (cs[k], *p)).collect();
        let (x, m) = crt(&rs);
        out.push(symmetric_lift(&x, &m));
    }
    Some(out)
}

/// Characteristic polynomial mod p via Hessenberg form; coefficients low
/// degree first, monic.
pub fn charpoly_mod_p(mut a: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = a.len();
    // reduce to upper Hessenberg by similarity transformations
    for col in 0..n.saturating_sub(2) {
        // find a nonzero subdiagonal pivot
        let Some(piv) = (col + 1..n).find(|&r| a[r][col] != 0) else { continue };
        if piv != col + 1 {
            a.swap(piv, col + 1);
            for row in a.iter_mut() {
                row.swap(piv, col + 1);
            }
        }
        let inv = mod_inv_u64(a[col + 1][col], p).unwrap();
        for r in col + 2..n {
            let f = mul_mod(a[r][col], inv, p);
            if f == 0 {
                continue;
            }
            // row_r -= f * row_{col+1}
            for c in 0..n {
                let sub = mul_mod(f, a[col + 1][c], p);
                a[r][c] = (a[r][c] + p - sub) % p;
            }
            // col_{col+1} += f * col_r
            for row in a.iter_mut() {
                let add = mul_mod(f, row[r], p);
                row[col + 1] = (row[col + 1] + add) % p;
            }
        }
    }
    // recurrence on leading principal minors of (xI - H)
    let mut polys: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
    polys.push(vec![1]);
    for m in 1..=n {
        // p_m = (x - h_{m-1,m-1}) p_{m-1} - sum_i h_{i-1,m-1} (prod subdiag) p_{i-1}
        let mut pm = poly_shift_scale(&polys[m - 1], a[m - 1][m - 1], p);
        let mut prod = 1u64;
        for i in (1..m).rev() {
            prod = mul_mod(prod, a[i][i - 1], p);
            if prod == 0 {
                break;
            }
            let coef = mul_mod(a[i - 1][m - 1], prod, p);
            if coef == 0 {
                continue;
            }
            poly_sub_scaled(&mut pm, &polys[i - 1], coef, p);
        }
        polys.push(pm);
    }
    polys.pop().unwrap()
}

/// (x - c) * f
fn poly_shift_scale(f: &[u64], c: u64, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; f.len() + 1];
    for (i, &a) in f.iter().enumerate() {
        out[i + 1] = (out[i + 1] + a) % p;
        let sub = mul_mod(c, a, p);
        out[i] = (out[i] + p - sub) % p;
    }
    out
}

fn poly_sub_scaled(f: &mut [u64], g: &[u64], c: u64, p: u64) {
    for (slot, &b) in f.iter_mut().zip(g.iter()) {
        let sub = mul_mod(c, b, p);
        *slot = (*slot + p - sub) % p;
    }
}

/// Faddeev-LeVerrier over exact rationals; the independent dense oracle.
pub fn charpoly_exact_dense(mat: &[Vec<BigRat>]) -> IntPolynomial {
    let n = mat.len();
    if n == 0 {
        return IntPolynomial::one();
    }
    let mut coeffs = vec![BigRat::zero(); n + 1];
    coeffs[n] = BigRat::one();
    let mut m = super::ratmat::identity(n);
    for k in 1..=n {
        let am = super::ratmat::mat_mul(mat, &m);
        let tr: BigRat = (0..n).map(|i| am[i][i].clone()).sum();
        let c = -tr / BigRational::from_integer(BigInt::from(k as i64));
        coeffs[n - k] = c.clone();
        m = am;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    let ints: Vec<BigInt> = coeffs
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "charpoly of a Hecke matrix must be integral");
            c.to_integer()
        })
        .collect();
    IntPolynomial::from_coeffs(ints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_int, SplitMix64};

    fn to_rat(m: &[Vec<i64>]) -> Vec<Vec<BigRat>> {
        m.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    #[test]
    fn zero_matrix() {
        let m = to_rat(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(charpoly_rational(&m), IntPolynomial::from_i64(&[0, 0, 1]));
    }

    #[test]
    fn companion_matrix() {
        // companion of X^2 - 2X + 5
        let m = to_rat(&[vec![0, -5], vec![1, 2]]);
        assert_eq!(charpoly_rational(&m), IntPolynomial::from_i64(&[5, -2, 1]));
        assert_eq!(charpoly_exact_dense(&m), IntPolynomial::from_i64(&[5, -2, 1]));
    }

    #[test]
    fn multimodular_matches_dense_oracle_random() {
        let mut rng = SplitMix64::new(2024);
        for n in [1usize, 2, 3, 5, 8, 12, 17, 20] {
            let m: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.range_i64(-30, 30)).collect())
                .collect();
            let m = to_rat(&m);
            assert_eq!(charpoly_rational(&m), charpoly_exact_dense(&m), "n={}", n);
        }
    }

    #[test]
    fn rational_entries() {
        // [[1/2, 1], [0, 1/3]] has charpoly (X - 1/2)(X - 1/3) which is NOT
        // integral; the dense path asserts integrality, so test the modular
        // path against a matrix scaled to integrality instead:
        // A = [[1/2, 3/2], [1/2, 1/2]] has trace 1 and det -1/2... use a
        // conjugated integer matrix: P D P^{-1} keeps an integral charpoly.
        let a = vec![
            vec![crate::arith::rat(7, 2), crate::arith::rat(-5, 2)],
            vec![crate::arith::rat(5, 2), crate::arith::rat(-3, 2)],
        ];
        // eigenvalues of [[7/2,-5/2],[5/2,-3/2]]: trace 2, det -21/4+25/4=1
        // => X^2 - 2X + 1
        assert_eq!(charpoly_rational(&a), IntPolynomial::from_i64(&[1, -2, 1]));
    }

    #[test]
    fn hessenberg_on_singular_pivots() {
        // matrices that force pivot searches and skips
        let m = to_rat(&[vec![0, 0, 1], vec![0, 0, 0], vec![1, 0, 0]]);
        // eigenvalues: 1, -1, 0
        assert_eq!(charpoly_rational(&m), IntPolynomial::from_i64(&[0, -1, 0, 1]));
    }
}
