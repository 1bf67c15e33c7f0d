//! Exact 3-dimensional lattice reduction for the reducing-vector search.
//!
//! `reduce_symbol` needs, for a nonsingular integer matrix M, a nonzero
//! integer vector w such that q = M^{-1} w has |q_i| < 1 for all i. The
//! lattice M^{-1} Z^3 has covolume 1/|det M| <= 1/2, so Minkowski guarantees
//! such a point strictly inside the unit sup-norm box. Raw box enumeration
//! over w is hopeless (entries of M are of size N*p), so we LLL-reduce the
//! basis M^{-1} e_i (Lovasz parameter 0.99, exact rational arithmetic) and
//! search small coefficient combinations of the reduced basis.

use crate::arith::{rat, BigRat};
use crate::mat3::Mat3;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Vec3 = [BigRat; 3];

fn dot(a: &Vec3, b: &Vec3) -> BigRat {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn sub_scaled(a: &Vec3, b: &Vec3, c: &BigRat) -> Vec3 {
    [&a[0] - c * &b[0], &a[1] - c * &b[1], &a[2] - c * &b[2]]
}

fn round_nearest(x: &BigRat) -> BigInt {
    // floor(x + 1/2); the denominator is always positive
    let num2: BigInt = x.numer() * 2 + x.denom();
    num2.div_floor(&(x.denom() * 2))
}

/// LLL with delta = 0.99 on three rational basis vectors.
fn lll3(mut b: [Vec3; 3]) -> [Vec3; 3] {
    let delta = rat(99, 100);
    let n = 3;
    let mut k = 1usize;
    let mut guard = 0u32;
    while k < n {
        guard += 1;
        assert!(guard < 10_000, "LLL failed to terminate");
        // size-reduce b[k], refreshing the Gram-Schmidt data each step
        for j in (0..k).rev() {
            let (_, mu) = gso(&b);
            let r = round_nearest(&mu[k][j]);
            if !r.is_zero() {
                let rb = BigRational::from_integer(r);
                b[k] = sub_scaled(&b[k], &b[j], &rb);
            }
        }
        let (star, mu) = gso(&b);
        // Lovasz condition
        let lhs = dot(&star[k], &star[k]);
        let mu2 = &mu[k][k - 1] * &mu[k][k - 1];
        let rhs = (&delta - &mu2) * dot(&star[k - 1], &star[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    b
}

fn gso(b: &[Vec3; 3]) -> ([Vec3; 3], [[BigRat; 3]; 3]) {
    let zero = || [BigRat::zero(), BigRat::zero(), BigRat::zero()];
    let mut star = [zero(), zero(), zero()];
    let mut mu = [
        [BigRat::zero(), BigRat::zero(), BigRat::zero()],
        [BigRat::zero(), BigRat::zero(), BigRat::zero()],
        [BigRat::zero(), BigRat::zero(), BigRat::zero()],
    ];
    for i in 0..3 {
        let mut v = b[i].clone();
        for j in 0..i {
            let denom = dot(&star[j], &star[j]);
            assert!(!denom.is_zero(), "degenerate lattice basis");
            mu[i][j] = dot(&b[i], &star[j]) / denom;
            v = sub_scaled(&v, &star[j], &mu[i][j]);
        }
        star[i] = v;
    }
    (star, mu)
}

/// A vector q in M^{-1} Z^3 with 0 < sup-norm(q) < 1, returned together with
/// the integer vector w = M q. None only if the bounded coefficient search
/// fails, which the Minkowski argument rules out for the inputs we feed it.
pub fn reducing_vector(m: &Mat3) -> Option<([BigRat; 3], [i64; 3])> {
    let d = m.det();
    assert!(d != 0, "reducing vector of a singular symbol");
    assert!(d.abs() > 1, "unimodular symbols are already reduced");
    let adj = m.adjugate();
    let db = BigRational::from_integer(BigInt::from(d));
    // columns of M^{-1} = adj / det
    let mut basis: [Vec3; 3] = [
        [BigRat::zero(), BigRat::zero(), BigRat::zero()],
        [BigRat::zero(), BigRat::zero(), BigRat::zero()],
        [BigRat::zero(), BigRat::zero(), BigRat::zero()],
    ];
    for (j, col) in basis.iter_mut().enumerate() {
        for (i, slot) in col.iter_mut().enumerate() {
            *slot = BigRational::from_integer(BigInt::from(adj.m[i][j])) / &db;
        }
    }
    let reduced = lll3(basis);

    let one = BigRat::one();
    let in_unit_box =
        |q: &Vec3| q.iter().all(|c| c.abs() < one) && !q.iter().all(|c| c.is_zero());

    let accept = |q: &Vec3| -> ([BigRat; 3], [i64; 3]) {
        // w = M q is integral because q lies in M^{-1} Z^3
        let mut w = [0i64; 3];
        for (row, slot) in w.iter_mut().enumerate() {
            let val: BigRat = (0..3)
                .map(|k| BigRational::from_integer(BigInt::from(m.m[row][k])) * &q[k])
                .sum();
            assert!(val.is_integer(), "w = Mq must be integral");
            *slot = int_to_i64(&val.to_integer());
        }
        (q.clone(), w)
    };

    for q in &reduced {
        if in_unit_box(q) {
            return Some(accept(q));
        }
    }
    // bounded search over combinations of the reduced basis
    for c0 in -3i64..=3 {
        for c1 in -3i64..=3 {
            for c2 in -3i64..=3 {
                if c0 == 0 && c1 == 0 && c2 == 0 {
                    continue;
                }
                let q: Vec3 = std::array::from_fn(|i| {
                    rat(c0, 1) * &reduced[0][i]
                        + rat(c1, 1) * &reduced[1][i]
                        + rat(c2, 1) * &reduced[2][i]
                });
                if in_unit_box(&q) {
                    return Some(accept(&q));
                }
            }
        }
    }
    None
}

fn int_to_i64(n: &BigInt) -> i64 {
    let s = n.to_string();
    s.parse::<i64>().expect("reducing vector entry exceeds i64")
}

/// Fast path: approximate LLL in f64 on the adjugate columns, tracking the
/// integer transform, with every candidate validated by the exact integer
/// test |adj(M) u|_inf < |det M|. A valid u IS the vector w = M (M^{-1} u'),
/// since q = M^{-1} w has coordinates (adj(M) w) / det. Returns None when
/// the approximate path finds nothing; the caller falls back to the exact
/// rational reduction above.
pub fn reducing_vector_fast(m: &Mat3) -> Option<[i64; 3]> {
    let d = m.det();
    let adj = m.adjugate();
    // exact admissibility test of a candidate w
    let ok = |w: [i64; 3]| -> bool {
        if w == [0, 0, 0] {
            return false;
        }
        for i in 0..3 {
            let mut acc: i128 = 0;
            for k in 0..3 {
                acc += adj.m[i][k] as i128 * w[k] as i128;
            }
            if acc.abs() >= d.unsigned_abs() as i128 {
                return false;
            }
        }
        true
    };
    // approximate lattice basis: columns of adj(M) (scale 1/d irrelevant)
    let mut b: [[f64; 3]; 3] = std::array::from_fn(|j| std::array::from_fn(|i| adj.m[i][j] as f64));
    let mut u: [[i64; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]; // u[j] = coeffs of b[j]
    let dotf = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let gso_f = |b: &[[f64; 3]; 3]| -> Option<([[f64; 3]; 3], [[f64; 3]; 3])> {
        let mut star = *b;
        let mut mu = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..i {
                let denom = dotf(&star[j], &star[j]);
                if denom <= 0.0 {
                    return None;
                }
                mu[i][j] = dotf(&b[i], &star[j]) / denom;
                for t in 0..3 {
                    let s = mu[i][j] * star[j][t];
                    star[i][t] -= s;
                }
            }
        }
        Some((star, mu))
    };
    let mut k = 1usize;
    let mut steps = 0u32;
    while k < 3 {
        steps += 1;
        if steps > 120 {
            return None; // give up; exact fallback takes over
        }
        for j in (0..k).rev() {
            let (_, mu) = gso_f(&b)?;
            let r = mu[k][j].round();
            if r != 0.0 && r.abs() < 9.0e15 {
                for t in 0..3 {
                    b[k][t] -= r * b[j][t];
                    u[k][t] = u[k][t].checked_sub((r as i64).checked_mul(u[j][t])?)?;
                }
            }
        }
        let (star, mu) = gso_f(&b)?;
        let lhs = dotf(&star[k], &star[k]);
        let rhs = (0.99 - mu[k][k - 1] * mu[k][k - 1]) * dotf(&star[k - 1], &star[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    // candidates: the reduced generators, then small combinations
    for j in 0..3 {
        if ok(u[j]) {
            return Some(u[j]);
        }
    }
    for c0 in -3i64..=3 {
        for c1 in -3i64..=3 {
            for c2 in -3i64..=3 {
                let w = [
                    c0 * u[0][0] + c1 * u[1][0] + c2 * u[2][0],
                    c0 * u[0][1] + c1 * u[1][1] + c2 * u[2][1],
                    c0 * u[0][2] + c1 * u[1][2] + c2 * u[2][2],
                ];
                if ok(w) {
                    return Some(w);
                }
            }
        }
    }
    None
}
