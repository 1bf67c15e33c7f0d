//! Point counting over finite fields: elliptic-curve traces and twisted
//! fixed-point counts on the affine surface family
//!
//!   t^2 = g_a(x, y) = x y (x^2 - 1)(y^2 - 1)(x^2 - y^2 + a x y),
//!
//! which carries the order-4 automorphism phi: (x, y, t) -> (y, -x, t).
//!
//! The count of points fixed by phi^k composed with the q-power Frobenius
//! reduces to sums over small loci:
//!   k = 0: (x, y) in F_q^2;
//!   k = 2: x^q = -x and y^q = -y, i.e. x, y in eta*F_q for eta with
//!          eta^2 = nu a non-square of F_q (so eta^q = -eta);
//!   k = 1, 3: x^{q^2} = -x and y = -x^q (resp. +x^q); the solutions are
//!          x = lambda*mu with lambda in F_{q^2} and mu^2 = nu' a non-square
//!          of F_{q^2}, and every quantity entering g lands in F_{q^2}:
//!          x^2 = lambda^2 nu', y^2 = (x^2)^q, and
//!          x y = -+ N(lambda) * nu'^{(q+1)/2}.
//! In all cases g takes values in F_q (phi-invariance of g), which the code
//! asserts, and the t-fiber over g contributes 1 + chi2(g) points (1 when
//! g = 0). No extension beyond F_{q^2} is ever materialized.

pub mod fit;
pub mod oracle;

pub use fit::{frobenius_fit, CandidateSet, FitDiagnostic, FitMode, FitOptions};

use crate::arith::{is_prime, BigRat, Fq, Fq2};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountError {
    /// p = 2, p divides the denominator of a, or p divides the conductor.
    BadPrime(u64),
    /// p makes the quadric factor of g_a degenerate (p | numerator(a^2+4)).
    DegenerateReduction(u64),
    WorkBudgetExceeded { p: u64, r: u32 },
    /// Internal assertion: a twisted g-value left F_q.
    NonRationalValue,
    NoCounts,
    VerifyFailed { p: u64, hypothesis: (i64, i64) },
}

impl std::fmt::Display for CountError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountError::BadPrime(p) => write!(f, "prime {} is not usable here", p),
            CountError::DegenerateReduction(p) => {
                write!(f, "surface family degenerates mod {}", p)
            }
            CountError::WorkBudgetExceeded { p, r } => {
                write!(f, "count at p={}, r={} exceeds the work budget", p, r)
            }
            CountError::NonRationalValue => {
                write!(f, "twisted g-value left the base field (internal bug)")
            }
            CountError::NoCounts => write!(f, "no counts available for the fit"),
            CountError::VerifyFailed { p, hypothesis } => {
                write!(f, "hypothesis {:?} rejected at p={}", hypothesis, p)
            }
        }
    }
}

impl std::error::Error for CountError {}

/// Long Weierstrass model with a conductor label, loaded from configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSpec {
    pub label: String,
    /// (a1, a2, a3, a4, a6)
    pub coeffs: [i64; 5],
    pub conductor: u64,
}

impl CurveSpec {
    pub fn new(label: &str, coeffs: [i64; 5], conductor: u64) -> CurveSpec {
        CurveSpec { label: label.to_string(), coeffs, conductor }
    }

    pub fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let [a1, a2, a3, a4, a6] = self.coeffs.map(|c| c as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    pub fn c4(&self) -> i128 {
        let (b2, b4, _, _) = self.b_invariants();
        b2 * b2 - 24 * b4
    }

    /// Sanity for configured curves: nonzero discriminant and conductor
    /// support inside the discriminant support.
    pub fn validate(&self) -> Result<(), String> {
        let disc = self.discriminant();
        if disc == 0 {
            return Err(format!("curve {} is singular", self.label));
        }
        let mut n = self.conductor as i128;
        let mut f = 2i128;
        while f * f <= n {
            if n % f == 0 {
                if disc % f != 0 {
                    return Err(format!(
                        "curve {}: conductor prime {} does not divide the discriminant",
                        self.label, f
                    ));
                }
                while n % f == 0 {
                    n /= f;
                }
            }
            f += 1;
        }
        if n > 1 && disc % n != 0 {
            return Err(format!(
                "curve {}: conductor prime {} does not divide the discriminant",
                self.label, n
            ));
        }
        Ok(())
    }
}

/// Trace of Frobenius a_p = p + 1 - #E(F_p), by completing the square and
/// summing the quadratic character of the resulting cubic.
pub fn ec_ap(curve: &CurveSpec, p: u64) -> Result<i64, CountError> {
    if p == 2 || !is_prime(p) || curve.conductor % p == 0 {
        return Err(CountError::BadPrime(p));
    }
    let (b2, b4, b6, _) = curve.b_invariants();
    let pm = p as i128;
    let rm = |v: i128| v.rem_euclid(pm) as u64;
    let (b2, b4, b6) = (rm(b2), rm(b4), rm(b6));
    let f = Fq::new(p, 1).expect("prime field");
    let chi = f.chi2_table();
    let mut sum = 0i64;
    for x in 0..p {
        // 4x^3 + b2 x^2 + 2 b4 x + b6
        let x2 = x * x % p;
        let x3 = x2 * x % p;
        let val = (4 * x3 % p + b2 * x2 % p + 2 * b4 % p * x % p + b6) % p;
        sum += chi[val as usize] as i64;
    }
    Ok(-sum)
}

/// The family parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceParams {
    pub a: BigRat,
}

impl SurfaceParams {
    pub fn new(a: BigRat) -> SurfaceParams {
        SurfaceParams { a }
    }

    pub fn from_pair(num: i64, den: i64) -> SurfaceParams {
        SurfaceParams { a: crate::arith::rat(num, den) }
    }

    /// Reduce a mod p; errors at p = 2, at p | denominator, and where the
    /// quadric factor x^2 - y^2 + a x y degenerates (p | numerator(a^2+4)).
    pub fn reduce_mod(&self, p: u64) -> Result<u64, CountError> {
        if p == 2 || !is_prime(p) {
            return Err(CountError::BadPrime(p));
        }
        let pb = BigInt::from(p);
        if self.a.denom().mod_floor(&pb).is_zero() {
            return Err(CountError::BadPrime(p));
        }
        let disc = &self.a * &self.a + crate::arith::rat_int(4);
        if disc.numer().mod_floor(&pb).is_zero() {
            return Err(CountError::DegenerateReduction(p));
        }
        let num = self.a.numer().mod_floor(&pb).to_u64().unwrap();
        let den = self.a.denom().mod_floor(&pb).to_u64().unwrap();
        Ok(crate::arith::mul_mod(num, crate::arith::mod_inv_u64(den, p).unwrap(), p))
    }

    /// Stable key for caches.
    pub fn key(&self) -> String {
        format!("{}/{}", self.a.numer(), self.a.denom())
    }
}

/// One raw fixed-point count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    pub a: BigRat,
    pub p: u64,
    pub r: u32,
    pub k: u32,
    pub count: u64,
}

/// Default enumeration budget: q^2 work per count.
pub fn within_budget(p: u64, r: u32) -> bool {
    match r {
        1 => p <= 173,
        2 => p <= 37,
        3 => p <= 13,
        _ => false,
    }
}

/// Character sum sum_{x,y in F_q} chi2(g_a(x,y)); the affine count of the
/// double cover is q^2 + this value.
pub fn surface_char_sum(s: &SurfaceParams, p: u64, r: u32) -> Result<i64, CountError> {
    surface_char_sum_in(s, &Fq::new(p, r as usize).map_err(|_| CountError::BadPrime(p))?)
}

/// Same, over an explicitly constructed field (used to check that counts do
/// not depend on the modulus choice).
pub fn surface_char_sum_in(s: &SurfaceParams, f: &Fq) -> Result<i64, CountError> {
    let p = f.p();
    if !within_budget(p, f.r() as u32) {
        return Err(CountError::WorkBudgetExceeded { p, r: f.r() as u32 });
    }
    let a = f.from_int(s.reduce_mod(p)? as i64);
    let chi = f.chi2_table();
    let q = f.order();
    let one = f.one();
    let mut sum = 0i64;
    for xi in 0..q {
        let x = f.from_index(xi);
        let x2 = f.square(&x);
        let x2m1 = f.sub(&x2, &one);
        if x.is_zero() || x2m1.is_zero() {
            // x in {0, 1, -1} kills a factor of g for every y
            continue;
        }
        for yi in 0..q {
            let y = f.from_index(yi);
            let y2 = f.square(&y);
            let y2m1 = f.sub(&y2, &one);
            let xy = f.mul(&x, &y);
            let quad = f.add(&f.sub(&x2, &y2), &f.mul(&a, &xy));
            let g = f.mul(&f.mul(&xy, &f.mul(&x2m1, &y2m1)), &quad);
            sum += chi[f.to_index(&g) as usize] as i64;
        }
    }
    Ok(sum)
}

/// Number of affine points fixed by phi^k composed with the q-power
/// Frobenius, q = p^r.
pub fn twisted_count(s: &SurfaceParams, p: u64, r: u32, k: u32) -> Result<CountRecord, CountError> {
    assert!(k < 4, "twist exponent is taken mod 4");
    if !within_budget(p, r) {
        return Err(CountError::WorkBudgetExceeded { p, r });
    }
    if let Some(c) = cache_get(s, p, r, k) {
        return Ok(CountRecord { a: s.a.clone(), p, r, k, count: c });
    }
    let f = Fq::new(p, r as usize).map_err(|_| CountError::BadPrime(p))?;
    let count = twisted_count_in(s, &f, k)?;
    cache_put(s, p, r, k, count);
    Ok(CountRecord { a: s.a.clone(), p, r, k, count })
}

/// Twisted count over an explicit base field model.
pub fn twisted_count_in(s: &SurfaceParams, f: &Fq, k: u32) -> Result<u64, CountError> {
    let p = f.p();
    let q = f.order();
    let a = f.from_int(s.reduce_mod(p)? as i64);
    let chi = f.chi2_table();
    let one = f.one();
    let count = match k % 4 {
        0 => {
            // points of the double cover over F_q^2
            let mut c = 0u64;
            for xi in 0..q {
                let x = f.from_index(xi);
                let x2 = f.square(&x);
                let x2m1 = f.sub(&x2, &one);
                if x.is_zero() || x2m1.is_zero() {
                    c += q; // g = 0 for the whole row: one point (t = 0) each
                    continue;
                }
                for yi in 0..q {
                    let y = f.from_index(yi);
                    let y2 = f.square(&y);
                    let y2m1 = f.sub(&y2, &one);
                    let xy = f.mul(&x, &y);
                    let quad = f.add(&f.sub(&x2, &y2), &f.mul(&a, &xy));
                    let g = f.mul(&f.mul(&xy, &f.mul(&x2m1, &y2m1)), &quad);
                    c += (1 + chi[f.to_index(&g) as usize] as i64) as u64;
                }
            }
            c
        }
        2 => {
            // x = lambda*eta, y = kappa*eta with eta^2 = nu: everything in F_q
            let nu = f.nonsquare();
            let mut c = 0u64;
            for li in 0..q {
                let lambda = f.from_index(li);
                let u = f.mul(&f.square(&lambda), &nu); // x^2
                let um1 = f.sub(&u, &one);
                for ki in 0..q {
                    let kappa = f.from_index(ki);
                    let v = f.mul(&f.square(&kappa), &nu); // y^2
                    let vm1 = f.sub(&v, &one);
                    let w = f.mul(&f.mul(&lambda, &kappa), &nu); // x y
                    let quad = f.add(&f.sub(&u, &v), &f.mul(&a, &w));
                    let g = f.mul(&f.mul(&w, &f.mul(&um1, &vm1)), &quad);
                    c += (1 + chi[f.to_index(&g) as usize] as i64) as u64;
                }
            }
            c
        }
        k_odd => {
            // x = lambda*mu over lambda in F_{q^2}, mu^2 = nu' non-square
            // there; y = -x^q for k = 1, +x^q for k = 3
            let ext = Fq2::new(f.clone());
            let nu2 = ext.nonsquare();
            let t = ext.pow(&nu2, (q + 1) / 2); // mu^{q+1}
            let negate = k_odd == 1;
            let mut c = 0u64;
            for li in 0..ext.order() {
                let lambda = ext.from_index(li);
                // u = x^2 = lambda^2 nu'
                let u = ext.mul(&ext.square(&lambda), &nu2);
                let ubar = ext.conj(&u);
                // (u - 1)(ubar - 1) = |u - 1|^2 in F_q
                let um1 = ext.sub(&u, &ext.one());
                let n_um1 = ext.norm(&um1);
                // v = x y = -+ N(lambda) * t
                let nl = ext.norm(&lambda);
                let mut v = ext.scale_base(&t, &nl);
                if negate {
                    v = ext.neg(&v);
                }
                // inner = (u - ubar) + a v
                let av = ext.scale_base(&v, &a);
                let inner = ext.add(&ext.sub(&u, &ubar), &av);
                // g = v * inner * n_um1
                let vi = ext.mul(&v, &inner);
                let g = ext.scale_base(&vi, &n_um1);
                if !g.b.is_zero() {
                    return Err(CountError::NonRationalValue);
                }
                c += (1 + chi[f.to_index(&g.a) as usize] as i64) as u64;
            }
            c
        }
    };
    Ok(count)
}

static COUNT_CACHE: OnceLock<Mutex<HashMap<(String, u64, u32, u32), u64>>> = OnceLock::new();

fn cache_get(s: &SurfaceParams, p: u64, r: u32, k: u32) -> Option<u64> {
    COUNT_CACHE
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .unwrap()
        .get(&(s.key(), p, r, k))
        .copied()
}

fn cache_put(s: &SurfaceParams, p: u64, r: u32, k: u32, count: u64) {
    COUNT_CACHE
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .unwrap()
        .insert((s.key(), p, r, k), count);
}

/// Seed the in-process count cache (CLI cache loading).
pub fn install_count(s: &SurfaceParams, p: u64, r: u32, k: u32, count: u64) {
    cache_put(s, p, r, k, count);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_35a() -> CurveSpec {
        CurveSpec::new("35a", [0, 1, 1, 9, 1], 35)
    }

    fn curve_49a() -> CurveSpec {
        CurveSpec::new("49a", [1, -1, 0, -2, -1], 49)
    }

    #[test]
    fn ec_ap_tiny_curve() {
        // y^2 = x^3 + x over F_3: affine points (0,0), (2,1), (2,2); with
        // infinity #E = 4, so a_3 = 3 + 1 - 4 = 0.
        let e = CurveSpec::new("test", [0, 0, 0, 1, 0], 64);
        assert_eq!(ec_ap(&e, 3).unwrap(), 0);
        assert!(matches!(ec_ap(&e, 2), Err(CountError::BadPrime(2))));
    }

    #[test]
    fn configured_curves_validate() {
        assert!(curve_35a().validate().is_ok());
        assert!(curve_49a().validate().is_ok());
        // 35a has discriminant -5^3 7^3, multiplicative at both primes
        assert_eq!(curve_35a().discriminant(), -42875);
        assert_eq!(curve_49a().discriminant(), -343);
    }

    #[test]
    fn hasse_bound_all_good_primes() {
        for curve in [curve_35a(), curve_49a()] {
            for p in (3..=199u64).filter(|&p| is_prime(p) && curve.conductor % p != 0) {
                let ap = ec_ap(&curve, p).unwrap();
                assert!((ap * ap) as u64 <= 4 * p, "Hasse fails for {} at {}", curve.label, p);
            }
        }
    }

    #[test]
    fn known_ap_values_cm_curve() {
        // conductor 49 curve has CM by Q(sqrt(-7)): a_p = 0 exactly at
        // primes inert in that field (quadratic character of p mod 7 = -1)
        let curve = curve_49a();
        for p in (3..=100u64).filter(|&p| is_prime(p) && p != 7) {
            let ap = ec_ap(&curve, p).unwrap();
            let chi = crate::arith::quadratic_character(p as i64, 7).unwrap();
            assert_eq!(ap == 0, chi == -1, "p={}", p);
        }
    }

    #[test]
    fn char_sum_vanishing_at_q3() {
        // over F_3 every x lies in {0, 1, -1}, so some factor of g vanishes
        for (n, d) in [(2i64, 1i64), (1, 1)] {
            let s = SurfaceParams::from_pair(n, d);
            assert_eq!(surface_char_sum(&s, 3, 1).unwrap(), 0);
        }
    }

    #[test]
    fn char_sum_a2_q5() {
        let s = SurfaceParams::from_pair(2, 1);
        // brute-force enumeration over F_5^2 x F_5
        let mut brute = 0i64;
        let f = Fq::new(5, 1).unwrap();
        for x in 0..5i64 {
            for y in 0..5i64 {
                let g = (x * y) * (x * x - 1) * (y * y - 1) * (x * x - y * y + 2 * x * y);
                brute += f.chi2(&f.from_int(g)) as i64;
            }
        }
        assert_eq!(brute, -4);
        assert_eq!(surface_char_sum(&s, 5, 1).unwrap(), -4);
    }

    #[test]
    fn twisted_count_examples_p3() {
        let s = SurfaceParams::from_pair(2, 1);
        // k=0 consistency with the character sum
        let k0 = twisted_count(&s, 3, 1, 0).unwrap();
        assert_eq!(k0.count as i64, 9 + surface_char_sum(&s, 3, 1).unwrap());
        // k=2: five points, worked out by hand on the 9-element locus
        let k2 = twisted_count(&s, 3, 1, 2).unwrap();
        assert_eq!(k2.count, 5);
    }

    #[test]
    fn counts_bounded_by_double_cover() {
        // a = 1 is skipped at p = 5: a^2 + 4 = 5 degenerates there
        let s = SurfaceParams::from_pair(2, 1);
        for k in 0..4u32 {
            let rec = twisted_count(&s, 5, 1, k).unwrap();
            let q2 = 25u64;
            assert!(rec.count <= 2 * q2);
        }
    }

    #[test]
    fn bad_and_degenerate_primes_rejected() {
        let s = SurfaceParams::from_pair(1, 16);
        assert!(matches!(twisted_count(&s, 2, 1, 0), Err(CountError::BadPrime(2))));
        // denominator: 2 only, so p = 3 is fine; a^2 + 4 = 1025/256 = 5^2*41/2^8
        assert!(matches!(twisted_count(&s, 5, 1, 0), Err(CountError::DegenerateReduction(5))));
        assert!(matches!(twisted_count(&s, 41, 1, 0), Err(CountError::DegenerateReduction(41))));
        assert!(twisted_count(&s, 3, 1, 0).is_ok());
        // a = 2: a^2+4 = 8, only p = 2 degenerates (already excluded)
        let s2 = SurfaceParams::from_pair(2, 1);
        assert!(twisted_count(&s2, 3, 1, 1).is_ok());
        // budget
        assert!(matches!(
            twisted_count(&s2, 179, 1, 0),
            Err(CountError::WorkBudgetExceeded { .. })
        ));
        assert!(matches!(
            twisted_count(&s2, 41, 2, 0),
            Err(CountError::WorkBudgetExceeded { .. })
        ));
    }

    #[test]
    fn count_independent_of_field_model() {
        let s = SurfaceParams::from_pair(2, 1);
        for (p, r) in [(3u64, 1usize), (5, 1), (3, 2), (5, 2)] {
            let f1 = Fq::new(p, r).unwrap();
            let f2 = Fq::with_alternative_modulus(p, r, 1).unwrap();
            if r > 1 {
                assert_ne!(f1.modulus(), f2.modulus());
            }
            for k in 0..4u32 {
                let c1 = twisted_count_in(&s, &f1, k).unwrap();
                let c2 = twisted_count_in(&s, &f2, k).unwrap();
                assert_eq!(c1, c2, "p={} r={} k={}", p, r, k);
            }
            assert_eq!(
                surface_char_sum_in(&s, &f1).unwrap(),
                surface_char_sum_in(&s, &f2).unwrap()
            );
        }
    }

    #[test]
    fn twist_direction_symmetry() {
        // k and 4-k swap under conjugating the twist direction; counts with
        // y = -x^q at k=1 match y = +x^q at k=3 and vice versa, so the
        // totals for k in {1,3} form the same multiset at p = 3 and 5.
        for (n, d) in [(2i64, 1i64), (1, 1)] {
            let s = SurfaceParams::from_pair(n, d);
            for p in [3u64, 5] {
                if s.reduce_mod(p).is_err() {
                    continue; // a = 1 degenerates at p = 5
                }
                let c1 = twisted_count(&s, p, 1, 1).unwrap().count;
                let c3 = twisted_count(&s, p, 1, 3).unwrap().count;
                let o1 = oracle::twisted_count_xfilter(&s, p, 1, 1).unwrap();
                let o3 = oracle::twisted_count_xfilter(&s, p, 1, 3).unwrap();
                assert_eq!(c1, o1);
                assert_eq!(c3, o3);
            }
        }
    }
}
