//! Deformations of the rank-6 weight-2 polarized Hodge structure.
//!
//! In the frame (e1, e2, f1, f2, ebar1, ebar2) the polarization is the
//! symmetric block matrix Q = [[0,0,-I],[0,I,0],[-I,0,0]] and the Weil
//! operator is J = diag(-1,-1,1,1,-1,-1). A first-order deformation that
//! preserves Q is determined by a 2x2 block A through
//!
//!   N(A) = [[0,0,0],[A,0,0],[0,A^t,0]],
//!
//! and the integrability constraint is commutativity N(A)N(B) = N(B)N(A),
//! equivalent to A^t B symmetric, equivalent to the vanishing of the
//! symplectic form E(A,B) = a11 b12 - a12 b11 + a21 b22 - a22 b21. All
//! entries here are exact Gaussian rationals; every identity is checked
//! exactly.

use crate::arith::{rat, BigRat, QuadElem, SplitMix64};
use num_traits::Zero;

pub type GaussMat2 = [[QuadElem; 2]; 2];
pub type Mat6 = Vec<Vec<QuadElem>>;

pub fn zero2() -> GaussMat2 {
    [
        [QuadElem::zero(), QuadElem::zero()],
        [QuadElem::zero(), QuadElem::zero()],
    ]
}

pub fn from_entries(entries: [[(i64, i64); 2]; 2]) -> GaussMat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| {
        QuadElem::gaussian(entries[i][j].0, entries[i][j].1)
    }))
}

/// The polarization matrix Q.
pub fn polarization_q() -> Mat6 {
    let mut q = vec![vec![QuadElem::zero(); 6]; 6];
    for i in 0..2 {
        q[i][4 + i] = QuadElem::from_int(-1);
        q[4 + i][i] = QuadElem::from_int(-1);
        q[2 + i][2 + i] = QuadElem::from_int(1);
    }
    q
}

/// The Weil operator J = diag(-1,-1,1,1,-1,-1).
pub fn weil_j() -> Mat6 {
    let diag = [-1i64, -1, 1, 1, -1, -1];
    let mut j = vec![vec![QuadElem::zero(); 6]; 6];
    for i in 0..6 {
        j[i][i] = QuadElem::from_int(diag[i]);
    }
    j
}

/// The deformation matrix N(A), strictly block lower triangular.
pub fn make_n(a: &GaussMat2) -> Mat6 {
    let mut n = vec![vec![QuadElem::zero(); 6]; 6];
    for i in 0..2 {
        for j in 0..2 {
            // block (2,1): A
            n[2 + i][j] = a[i][j].clone();
            // block (3,2): A^t
            n[4 + i][2 + j] = a[j][i].clone();
        }
    }
    n
}

pub fn mat6_mul(x: &Mat6, y: &Mat6) -> Mat6 {
    let mut out = vec![vec![QuadElem::zero(); 6]; 6];
    for i in 0..6 {
        for (k, yrow) in y.iter().enumerate() {
            if x[i][k].is_zero() {
                continue;
            }
            for j in 0..6 {
                if !yrow[j].is_zero() {
                    out[i][j] = &out[i][j] + &(&x[i][k] * &yrow[j]);
                }
            }
        }
    }
    out
}

pub fn mat6_transpose(x: &Mat6) -> Mat6 {
    let mut out = vec![vec![QuadElem::zero(); 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            out[j][i] = x[i][j].clone();
        }
    }
    out
}

pub fn mat6_eq(x: &Mat6, y: &Mat6) -> bool {
    x == y
}

pub fn mat6_is_zero(x: &Mat6) -> bool {
    x.iter().all(|r| r.iter().all(|v| v.is_zero()))
}

pub fn mat6_add(x: &Mat6, y: &Mat6) -> Mat6 {
    (0..6)
        .map(|i| (0..6).map(|j| &x[i][j] + &y[i][j]).collect())
        .collect()
}

/// Exact test of M^t Q + Q M = 0.
pub fn polarization_preserved(m: &Mat6) -> bool {
    let q = polarization_q();
    let lhs = mat6_add(&mat6_mul(&mat6_transpose(m), &q), &mat6_mul(&q, m));
    mat6_is_zero(&lhs)
}

/// The symplectic form E(A,B) = a11 b12 - a12 b11 + a21 b22 - a22 b21.
pub fn symplectic_e(a: &GaussMat2, b: &GaussMat2) -> QuadElem {
    let t1 = &a[0][0] * &b[0][1];
    let t2 = &a[0][1] * &b[0][0];
    let t3 = &a[1][0] * &b[1][1];
    let t4 = &a[1][1] * &b[1][0];
    &(&t1 - &t2) + &(&t3 - &t4)
}

/// Exact test of N(A) N(B) = N(B) N(A).
pub fn griffiths_commute(a: &GaussMat2, b: &GaussMat2) -> bool {
    let na = make_n(a);
    let nb = make_n(b);
    mat6_eq(&mat6_mul(&na, &nb), &mat6_mul(&nb, &na))
}

/// A^t B symmetric, the matrix form of the commutation constraint.
pub fn transpose_product_symmetric(a: &GaussMat2, b: &GaussMat2) -> bool {
    // (A^t B)_{12} - (A^t B)_{21} = E(A, B); test the full symmetry anyway
    let atb = |i: usize, j: usize| -> QuadElem {
        &(&a[0][i] * &b[0][j]) + &(&a[1][i] * &b[1][j])
    };
    atb(0, 1) == atb(1, 0)
}

/// Random Gaussian-rational 2x2 matrix with small entries.
pub fn random_gauss_mat(rng: &mut SplitMix64) -> GaussMat2 {
    let entry = |rng: &mut SplitMix64| {
        let den = 1 + rng.below(3) as i64;
        QuadElem::new(
            -1,
            rat(rng.range_i64(-6, 6), den),
            rat(rng.range_i64(-6, 6), den),
        )
    };
    [
        [entry(rng), entry(rng)],
        [entry(rng), entry(rng)],
    ]
}

/// Scale-and-add of 2x2 blocks, for building commuting families.
pub fn mat2_lin_comb(c1: &QuadElem, a: &GaussMat2, c2: &QuadElem, b: &GaussMat2) -> GaussMat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| {
        &(c1 * &a[i][j]) + &(c2 * &b[i][j])
    }))
}

/// Dimension of the span of 2x2 blocks over the Gaussian rationals.
pub fn span_dimension(mats: &[GaussMat2]) -> usize {
    // flatten to 4-vectors and eliminate
    let mut rows: Vec<Vec<QuadElem>> = mats
        .iter()
        .map(|m| vec![m[0][0].clone(), m[0][1].clone(), m[1][0].clone(), m[1][1].clone()])
        .collect();
    let mut rank = 0;
    for col in 0..4 {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, piv);
        let inv = rows[rank][col].inv();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, pv) in row.iter_mut().zip(pivot_row.iter()) {
                *x = &*x - &(&f * pv);
            }
        }
        rank += 1;
    }
    rank
}

/// One run of the randomized identity suite; returns the number of sampled
/// pairs on success, an error message naming the failed identity otherwise.
pub fn run_identity_suite(samples: usize, seed: u64) -> Result<usize, String> {
    let mut rng = SplitMix64::new(seed);
    let q = polarization_q();
    let j = weil_j();
    // frame axioms: J^t Q J = Q
    let jqj = mat6_mul(&mat6_mul(&mat6_transpose(&j), &q), &j);
    if !mat6_eq(&jqj, &q) {
        return Err("J^t Q J = Q failed".into());
    }
    for trial in 0..samples {
        let a = random_gauss_mat(&mut rng);
        let b = random_gauss_mat(&mut rng);
        // every N(A) preserves the polarization
        if !polarization_preserved(&make_n(&a)) {
            return Err(format!("polarization broken at sample {}", trial));
        }
        // three-way equivalence
        let commute = griffiths_commute(&a, &b);
        let symmetric = transpose_product_symmetric(&a, &b);
        let e_zero = symplectic_e(&a, &b).is_zero();
        if commute != symmetric || symmetric != e_zero {
            return Err(format!(
                "equivalence broken at sample {}: commute={} symmetric={} e_zero={}",
                trial, commute, symmetric, e_zero
            ));
        }
        // alternating and antisymmetric
        if !symplectic_e(&a, &a).is_zero() {
            return Err(format!("E(A,A) != 0 at sample {}", trial));
        }
        let eab = symplectic_e(&a, &b);
        let eba = symplectic_e(&b, &a);
        if !(&eab + &eba).is_zero() {
            return Err(format!("E not antisymmetric at sample {}", trial));
        }
    }
    // commuting families built from an isotropic plane stay 2-dimensional
    for trial in 0..samples / 10 + 5 {
        let a = random_gauss_mat(&mut rng);
        let b = isotropic_partner(&a, &mut rng);
        if !griffiths_commute(&a, &b) {
            return Err(format!("isotropic partner does not commute at {}", trial));
        }
        let c1 = QuadElem::gaussian(rng.range_i64(-4, 4), rng.range_i64(-4, 4));
        let c2 = QuadElem::gaussian(rng.range_i64(-4, 4), rng.range_i64(-4, 4));
        let c = mat2_lin_comb(&c1, &a, &c2, &b);
        if !griffiths_commute(&a, &c) || !griffiths_commute(&b, &c) {
            return Err("combination left the commuting family".into());
        }
        let dim = span_dimension(&[a, b, c]);
        if dim > 2 {
            return Err(format!("commuting span has dimension {} > 2", dim));
        }
    }
    // positivity of the inner product Psi(v, Jv) on random real vectors
    let mut rng2 = SplitMix64::new(seed ^ 0xABCD);
    for _ in 0..samples.min(200) {
        if !psi_positive_on_random_real_vector(&mut rng2) {
            return Err("Psi(v, Jv) > 0 failed".into());
        }
    }
    Ok(samples)
}

/// Given A, produce B with E(A, B) = 0 so span{A, B} is isotropic.
fn isotropic_partner(a: &GaussMat2, rng: &mut SplitMix64) -> GaussMat2 {
    // choose three entries freely and solve E(A, B) = 0 for the last
    // nonzero-coefficient slot; fall back to a multiple of A
    let mut b = random_gauss_mat(rng);
    for (i, j, sign_entry) in [(0usize, 1usize, (0usize, 0usize)), (0, 0, (0, 1)), (1, 1, (1, 0)), (1, 0, (1, 1))] {
        let coeff = &a[sign_entry.0][sign_entry.1];
        if coeff.is_zero() {
            continue;
        }
        // E(A,B) = a11 b12 - a12 b11 + a21 b22 - a22 b21: solve for b[i][j]
        b[i][j] = QuadElem::zero();
        let e = symplectic_e(a, &b);
        // coefficient of b[i][j] in E
        let c = match (i, j) {
            (0, 1) => a[0][0].clone(),
            (0, 0) => -a[0][1].clone(),
            (1, 1) => a[1][0].clone(),
            (1, 0) => -a[1][1].clone(),
            _ => unreachable!(),
        };
        if c.is_zero() {
            continue;
        }
        b[i][j] = -(&e * &c.inv());
        debug_assert!(symplectic_e(a, &b).is_zero());
        return b;
    }
    a.clone()
}

/// Psi(v, Jv) > 0 for a random nonzero real vector: real combinations are
/// x_k f_k + y_k (e_k + ebar_k) + z_k i (e_k - ebar_k).
fn psi_positive_on_random_real_vector(rng: &mut SplitMix64) -> bool {
    let q = polarization_q();
    let i_unit = QuadElem::gaussian_i();
    let mut v = vec![QuadElem::zero(); 6];
    let mut nonzero = false;
    for k in 0..2 {
        let x = rng.range_i64(-5, 5);
        let y = rng.range_i64(-5, 5);
        let z = rng.range_i64(-5, 5);
        nonzero |= x != 0 || y != 0 || z != 0;
        v[2 + k] = QuadElem::from_int(x); // f_k
        // e_k and ebar_k components
        let yq = QuadElem::from_int(y);
        let zq = &QuadElem::from_int(z) * &i_unit;
        v[k] = &yq + &zq;
        v[4 + k] = &yq - &zq;
    }
    if !nonzero {
        return true;
    }
    // Psi(v, Jv) with J = -1 on the e/ebar blocks, +1 on f
    let jdiag = [-1i64, -1, 1, 1, -1, -1];
    let jv: Vec<QuadElem> =
        (0..6).map(|i| v[i].scale(&rat(jdiag[i], 1))).collect();
    let mut val = QuadElem::zero();
    for i in 0..6 {
        for k in 0..6 {
            if !q[i][k].is_zero() {
                val = &val + &(&(&v[i] * &q[i][k]) * &jv[k]);
            }
        }
    }
    // exact positivity of a rational value
    match val.as_rational() {
        Some(r) => r > &BigRat::zero(),
        None => false,
    }
}
