//! Brute-force reference counts, deliberately naive.
//!
//! These exist only to check `twisted_count`; they never share its derived
//! loci. `twisted_count_full` enumerates all of F_{q^4}^2 x F_q and tests
//! the fixed-point equations plus the surface equation directly (feasible
//! at r = 1). `twisted_count_xfilter` enumerates x over all of F_{q^4},
//! filters by x^{q^2} = -x, derives y, and counts t by scanning the F_q
//! subfield (feasible through r = 2 at p <= 5).
//!
//! F_{q^4} is modelled as the quadratic extension of F_{q^2} taken as an
//! `Fq` (r = 1) or as the extension of F_{p^{2r}} (r = 2); the oracle never
//! uses the eta/mu parametrization of the production path.

use super::{CountError, SurfaceParams};
use crate::arith::{Fq, Fq2, Fq2Elem};

/// Fully naive triple loop; r = 1 only.
pub fn twisted_count_full(s: &SurfaceParams, p: u64, k: u32) -> Result<u64, CountError> {
    let a_mod = s.reduce_mod(p)?;
    let q = p;
    // F_{q^4} = F_{p^4} directly
    let big = Fq::new(p, 4).map_err(|_| CountError::BadPrime(p))?;
    let a = big.from_int(a_mod as i64);
    let n = big.order();
    // Frobenius power table
    let frob_q: Vec<u64> =
        (0..n).map(|i| big.to_index(&big.pow(&big.from_index(i), q))).collect();
    // the F_q subfield inside F_{q^4}
    let subfield: Vec<u64> = (0..n).filter(|&i| frob_q[i as usize] == i).collect();
    assert_eq!(subfield.len() as u64, q);

    let mut count = 0u64;
    for xi in 0..n {
        for yi in 0..n {
            // phi^k (x^q, y^q) = (x, y)?
            let (fx, fy) = (frob_q[xi as usize], frob_q[yi as usize]);
            let (tx, ty) = apply_phi_k(&big, fx, fy, k);
            if (tx, ty) != (xi, yi) {
                continue;
            }
            let x = big.from_index(xi);
            let y = big.from_index(yi);
            let g = g_value(&big, &a, &x, &y);
            // count t in F_q with t^2 = g
            for &ti in &subfield {
                let t = big.from_index(ti);
                if big.square(&t) == g {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

fn apply_phi_k(f: &Fq, mut x: u64, mut y: u64, k: u32) -> (u64, u64) {
    // phi: (x, y) -> (y, -x)
    for _ in 0..k % 4 {
        let nx = y;
        let ny = f.to_index(&f.neg(&f.from_index(x)));
        x = nx;
        y = ny;
    }
    (x, y)
}

fn g_value(f: &Fq, a: &crate::arith::FqElem, x: &crate::arith::FqElem, y: &crate::arith::FqElem) -> crate::arith::FqElem {
    let one = f.one();
    let x2 = f.square(x);
    let y2 = f.square(y);
    let xy = f.mul(x, y);
    let quad = f.add(&f.sub(&x2, &y2), &f.mul(a, &xy));
    f.mul(&f.mul(&xy, &f.mul(&f.sub(&x2, &one), &f.sub(&y2, &one))), &quad)
}

/// x-filtered oracle over F_{q^4} modelled as a quadratic extension of
/// F_{q^2}; works for r <= 2 (at desk-scale primes).
pub fn twisted_count_xfilter(s: &SurfaceParams, p: u64, r: u32, k: u32) -> Result<u64, CountError> {
    let a_mod = s.reduce_mod(p)?;
    assert!(r <= 2, "oracle is feasible only through r = 2");
    let q = p.pow(r);
    // base F_{q^2}, extension F_{q^4}
    let base = Fq::new(p, 2 * r as usize).map_err(|_| CountError::BadPrime(p))?;
    let ext = Fq2::new(base.clone());
    let a = ext.embed(base.from_int(a_mod as i64));
    // the F_q subfield of F_{q^2}, for the t-count
    let tfield: Vec<crate::arith::FqElem> = (0..base.order())
        .map(|i| base.from_index(i))
        .filter(|z| base.pow(z, q) == *z)
        .collect();
    assert_eq!(tfield.len() as u64, q);

    let mut count = 0u64;
    if k % 2 == 0 {
        // both coordinates range over the locus z^q = +-z, computed once
        let locus: Vec<Fq2Elem> = (0..ext.order())
            .map(|i| ext.from_index(i))
            .filter(|z| {
                let zq = ext.pow(z, q);
                if k % 4 == 0 {
                    zq == *z
                } else {
                    zq == ext.neg(z)
                }
            })
            .collect();
        assert_eq!(locus.len() as u64, q);
        for x in &locus {
            for y in &locus {
                count += count_t(&ext, &base, &tfield, &a, x, y);
            }
        }
    } else {
        // y is determined by x; the residual condition x^{q^2} = -x is
        // verified directly on the derived pair
        for xi in 0..ext.order() {
            let x = ext.from_index(xi);
            let x_q = ext.pow(&x, q);
            let y = if k % 4 == 1 { ext.neg(&x_q) } else { x_q };
            let y_q = ext.pow(&y, q);
            let ok = if k % 4 == 1 { y_q == x } else { ext.neg(&y_q) == x };
            if !ok {
                continue;
            }
            count += count_t(&ext, &base, &tfield, &a, &x, &y);
        }
    }
    Ok(count)
}

fn count_t(
    ext: &Fq2,
    base: &Fq,
    tfield: &[crate::arith::FqElem],
    a: &Fq2Elem,
    x: &Fq2Elem,
    y: &Fq2Elem,
) -> u64 {
    let one = ext.one();
    let x2 = ext.square(x);
    let y2 = ext.square(y);
    let xy = ext.mul(x, y);
    let quad = ext.add(&ext.sub(&x2, &y2), &ext.mul(a, &xy));
    let g = ext.mul(&ext.mul(&xy, &ext.mul(&ext.sub(&x2, &one), &ext.sub(&y2, &one))), &quad);
    let mut c = 0u64;
    for t in tfield {
        let t2 = ext.embed(base.square(t));
        if t2 == g {
            c += 1;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::twisted_count;

    #[test]
    fn oracles_agree_with_production_p3_r1() {
        for (n, d) in [(2i64, 1i64), (1, 1), (1, 16)] {
            let s = SurfaceParams::from_pair(n, d);
            for k in 0..4u32 {
                let fast = twisted_count(&s, 3, 1, k).unwrap().count;
                assert_eq!(twisted_count_full(&s, 3, k).unwrap(), fast, "full a={}/{} k={}", n, d, k);
                assert_eq!(
                    twisted_count_xfilter(&s, 3, 1, k).unwrap(),
                    fast,
                    "xfilter a={}/{} k={}",
                    n,
                    d,
                    k
                );
            }
        }
    }

    #[test]
    fn oracles_agree_with_production_p3_r2() {
        let s = SurfaceParams::from_pair(2, 1);
        for k in 0..4u32 {
            let fast = twisted_count(&s, 3, 2, k).unwrap().count;
            assert_eq!(twisted_count_xfilter(&s, 3, 2, k).unwrap(), fast, "k={}", k);
        }
    }
}
