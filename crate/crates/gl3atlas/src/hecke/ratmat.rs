//! Small dense matrices over Q used for Hecke operators.

use crate::arith::BigRat;
use num_traits::{One, Zero};

pub type RatMat = Vec<Vec<BigRat>>;

pub fn identity(n: usize) -> RatMat {
    let mut m = vec![vec![BigRat::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRat::one();
    }
    m
}

pub fn mat_mul(a: &[Vec<BigRat>], b: &[Vec<BigRat>]) -> RatMat {
    let n = a.len();
    let k = b.len();
    let m = if k > 0 { b[0].len() } else { 0 };
    let mut out = vec![vec![BigRat::zero(); m]; n];
    for (i, out_row) in out.iter_mut().enumerate() {
        for (l, b_row) in b.iter().enumerate() {
            let alf = &a[i][l];
            if alf.is_zero() {
                continue;
            }
            for (j, slot) in out_row.iter_mut().enumerate() {
                *slot += alf * &b_row[j];
            }
        }
    }
    out
}

pub fn mat_add(a: &[Vec<BigRat>], b: &[Vec<BigRat>]) -> RatMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_scale(a: &[Vec<BigRat>], c: &BigRat) -> RatMat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn mat_sub(a: &[Vec<BigRat>], b: &[Vec<BigRat>]) -> RatMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mat_vec(a: &[Vec<BigRat>], v: &[BigRat]) -> Vec<BigRat> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(c, x)| c * x).sum())
        .collect()
}

/// Apply a monic integer polynomial to a square matrix.
pub fn poly_at_matrix(poly: &crate::arith::IntPolynomial, a: &[Vec<BigRat>]) -> RatMat {
    let n = a.len();
    let mut acc = vec![vec![BigRat::zero(); n]; n];
    // Horner: acc = ((c_d I) A + c_{d-1} I) A + ...
    let coeffs = poly.coeffs();
    for c in coeffs.iter().rev() {
        acc = mat_mul(&acc, a);
        let cr = BigRat::from_integer(c.clone());
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += &cr;
        }
    }
    acc
}

/// Kernel basis in reduced echelon form: one vector per free column, with
/// value one at that column.
pub fn rational_kernel(mat: &[Vec<BigRat>]) -> Vec<Vec<BigRat>> {
    if mat.is_empty() {
        return Vec::new();
    }
    let nrows = mat.len();
    let ncols = mat[0].len();
    let mut m: RatMat = mat.to_vec();
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        let inv = m[rank][col].clone().recip();
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, pv) in row.iter_mut().zip(pivot_row.iter()) {
                *x -= &f * pv;
            }
        }
        pivot_row_of_col[col] = Some(rank);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    let mut kernel = Vec::new();
    for free in 0..ncols {
        if pivot_row_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![BigRat::zero(); ncols];
        v[free] = BigRat::one();
        for (col, pr) in pivot_row_of_col.iter().enumerate() {
            if let Some(r) = pr {
                if !m[*r][free].is_zero() {
                    v[col] = -m[*r][free].clone();
                }
            }
        }
        kernel.push(v);
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_int, IntPolynomial};

    #[test]
    fn kernel_of_rank_one() {
        // rows (1,1,1): kernel dim 2
        let m = vec![vec![rat_int(1), rat_int(1), rat_int(1)]];
        let k = rational_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigRat = v.iter().sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn poly_at_matrix_quadratic() {
        // A = [[0,-5],[1,2]] is the companion of X^2 - 2X + 5, so m(A) = 0.
        let a = vec![vec![rat_int(0), rat_int(-5)], vec![rat_int(1), rat_int(2)]];
        let m = IntPolynomial::from_i64(&[5, -2, 1]);
        let z = poly_at_matrix(&m, &a);
        assert!(z.iter().all(|r| r.iter().all(|x| x.is_zero())));
    }
}
