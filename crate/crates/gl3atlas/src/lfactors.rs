//! Local L-factor algebra.
//!
//! A degree-3 local factor is stored as the coefficient data (p, a, b) of
//! X^3 - a X^2 + p b X - p^3; the L-series variable is never materialized,
//! every comparison is a coefficient comparison. The unitary (cuspidal)
//! shape has b = conj(a). Duality inverts-and-twists the roots
//! (alpha -> p^2 / conj(alpha)), which on coefficients is
//! (a, b) -> (conj(b), conj(a)).
//!
//! The only floating point in the crate lives in `weil_check`, which tests
//! |root| = p numerically: that statement is not an algebraic identity in
//! the coefficients.

use crate::arith::{BigRat, DirichletChar, IntPolynomial, QuadElem};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LfactorError {
    BadPrime(u64),
    HasseViolation { a: i64, p: u64 },
}

impl std::fmt::Display for LfactorError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LfactorError::BadPrime(p) => write!(f, "prime {} not allowed here", p),
            LfactorError::HasseViolation { a, p } => {
                write!(f, "|{}| exceeds the Hasse bound at p={}", a, p)
            }
        }
    }
}

impl std::error::Error for LfactorError {}

/// Degree-3 Euler factor data: X^3 - a X^2 + p b X - p^3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCubic {
    pub p: u64,
    pub a: QuadElem,
    pub b: QuadElem,
}

impl std::fmt::Display for LocalCubic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "X^3 - ({})X^2 + {}({})X - {}", self.a, self.p, self.b, self.p.pow(3))
    }
}

/// Degree-2 factor data: X^2 - a X + p (the weight-2 shape).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalQuadratic {
    pub p: u64,
    pub a: i64,
}

impl LocalQuadratic {
    /// Cuspidal factors obey Hasse; a = p + 1 is the Eisenstein stand-in.
    pub fn new(p: u64, a: i64) -> Self {
        LocalQuadratic { p, a }
    }

    pub fn is_hasse_bounded(&self) -> bool {
        (self.a as i128) * (self.a as i128) <= 4 * self.p as i128
    }
}

/// The unitary-shaped cubic attached to a trace: b is the complex conjugate
/// of a (so b = a on totally real traces).
pub fn gl3_local(a: QuadElem, p: u64) -> LocalCubic {
    let b = a.complex_conj();
    LocalCubic { p, a, b }
}

/// The cubic whose roots are p^2 / conj(root): coefficientwise
/// (a, b) -> (conj(b), conj(a)).
pub fn dual_cubic(l: &LocalCubic) -> LocalCubic {
    LocalCubic { p: l.p, a: l.b.complex_conj(), b: l.a.complex_conj() }
}

/// For unitary-shaped factors, selfdual means the trace is fixed by complex
/// conjugation, i.e. totally real.
pub fn is_selfdual(l: &LocalCubic) -> bool {
    debug_assert_eq!(l.b, l.a.complex_conj(), "selfduality test expects the unitary shape");
    l.a == l.a.complex_conj()
}

/// Eigenvalue of the two lifts of a weight-2 form with trace a:
/// type 1 gives p a + 1, type 2 gives a + p^2.
pub fn eisenstein_lift(a: i64, p: u64, lift_type: u8) -> i64 {
    match lift_type {
        1 => p as i64 * a + 1,
        2 => a + (p * p) as i64,
        _ => panic!("lift type is 1 or 2"),
    }
}

/// The modulus-7 character eigenvalue formula:
/// chi(p) (psi(p) + p + psi(p)^2 p^2), exact in Q(sqrt(-3)).
pub fn v5_formula(chi: &DirichletChar, psi: &DirichletChar, p: u64) -> Result<QuadElem, LfactorError> {
    if p == 7 {
        return Err(LfactorError::BadPrime(7));
    }
    assert_eq!(chi.modulus(), 7);
    assert_eq!(psi.modulus(), 7);
    assert!(chi.order() <= 3 && psi.order() <= 3, "orders dividing 3");
    let pv = QuadElem::from_int(p as i64);
    let p2 = QuadElem::from_int((p * p) as i64);
    let psi_p = psi.value(p as i64);
    let psi2_p = psi.value(p as i64).pow(2);
    let inner = &(&psi_p + &pv) + &(&psi2_p * &p2);
    Ok(&chi.value(p as i64) * &inner)
}

/// The same number assembled as a sum of three character-twisted pieces:
/// chi psi(p) + chi(p) p + chi psi^2(p) p^2.
pub fn v5_galois_sum(
    chi: &DirichletChar,
    psi: &DirichletChar,
    p: u64,
) -> Result<QuadElem, LfactorError> {
    if p == 7 {
        return Err(LfactorError::BadPrime(7));
    }
    let pv = QuadElem::from_int(p as i64);
    let p2 = QuadElem::from_int((p * p) as i64);
    let cp = chi.value(p as i64);
    let pp = psi.value(p as i64);
    let t0 = &cp * &pp;
    let t1 = &cp * &pv;
    let t2 = &(&cp * &pp.pow(2)) * &p2;
    Ok(&(&t0 + &t1) + &t2)
}

/// Symmetric square of a weight-2 factor with trace a: roots alpha^2,
/// alpha beta = p, beta^2, i.e. X^3 - (a^2-p) X^2 + p (a^2-p) X - p^3.
pub fn sym2_local(a: i64, p: u64) -> Result<LocalCubic, LfactorError> {
    if (a as i128) * (a as i128) > 4 * p as i128 {
        return Err(LfactorError::HasseViolation { a, p });
    }
    let t = QuadElem::from_int(a * a - p as i64);
    Ok(LocalCubic { p, a: t.clone(), b: t })
}

/// All complex roots of the cubic satisfy | |root|/p - 1 | <= tol.
///
/// Simple roots go through Durand-Kerner in f64 (quadratic convergence, the
/// only numerical path in the crate). Root-finders lose most of their
/// accuracy on multiple roots, so the degenerate case is detected exactly
/// through the cubic discriminant and its roots are checked algebraically.
pub fn weil_check(l: &LocalCubic, tol: f64) -> bool {
    // exact monic coefficients X^3 + c2 X^2 + c1 X + c0
    let c2 = -l.a.clone();
    let c1 = l.b.scale(&crate::arith::rat_int(l.p as i64));
    let c0 = QuadElem::from_int(-((l.p * l.p * l.p) as i64));
    let disc = cubic_discriminant(&c2, &c1, &c0);
    if disc.is_zero() {
        return weil_check_degenerate(l.p, &c2, &c1, &c0);
    }
    let (ar, ai) = l.a.approx_complex();
    let (br, bi) = l.b.approx_complex();
    let p = l.p as f64;
    let coeffs = [
        (-p * p * p, 0.0),
        (p * br, p * bi),
        (-ar, -ai),
        (1.0, 0.0),
    ];
    let roots = durand_kerner(&coeffs);
    roots.iter().all(|&(re, im)| {
        let m = (re * re + im * im).sqrt();
        (m / p - 1.0).abs() <= tol
    })
}

/// 18 c2 c1 c0 - 4 c2^3 c0 + c2^2 c1^2 - 4 c1^3 - 27 c0^2.
fn cubic_discriminant(c2: &QuadElem, c1: &QuadElem, c0: &QuadElem) -> QuadElem {
    let t18 = QuadElem::from_int(18);
    let t4 = QuadElem::from_int(4);
    let t27 = QuadElem::from_int(27);
    let a = &(&t18 * c2) * &(c1 * c0);
    let b = &t4 * &(&c2.pow(3) * c0);
    let c = &c2.pow(2) * &c1.pow(2);
    let d = &t4 * &c1.pow(3);
    let e = &t27 * &c0.pow(2);
    &(&(&(&a - &b) + &c) - &d) - &e
}

/// Exact handling of cubics with repeated roots: recover the multiple root
/// in the quadratic field and test |root|^2 = p^2 with no floating point.
fn weil_check_degenerate(p: u64, c2: &QuadElem, c1: &QuadElem, c0: &QuadElem) -> bool {
    let p2 = QuadElem::from_int((p * p) as i64);
    let abs2_is_p2 = |r: &QuadElem| &(r * &r.complex_conj()) == &p2;
    let three = QuadElem::from_int(3);
    // triple root iff additionally c2^2 = 3 c1; then root = -c2 / 3
    let sep = &c2.pow(2) - &(&three * c1);
    if sep.is_zero() {
        let r = c2.scale(&crate::arith::rat(-1, 3));
        return abs2_is_p2(&r);
    }
    // double root r = (9 c0 - c2 c1) / (2 (c2^2 - 3 c1)), simple root
    // s = -c2 - 2r
    let nine = QuadElem::from_int(9);
    let num = &(&nine * c0) - &(c2 * c1);
    let r = &num * &sep.scale(&crate::arith::rat_int(2)).inv();
    let s = &(-c2.clone()) - &r.scale(&crate::arith::rat_int(2));
    abs2_is_p2(&r) && abs2_is_p2(&s)
}

type C = (f64, f64);

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn csub(a: C, b: C) -> C {
    (a.0 - b.0, a.1 - b.1)
}

fn cdiv(a: C, b: C) -> C {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn ceval(coeffs: &[C], z: C) -> C {
    let mut acc = (0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = cmul(acc, z);
        acc = (acc.0 + c.0, acc.1 + c.1);
    }
    acc
}

/// Roots of a monic polynomial given by coefficients low-first.
fn durand_kerner(coeffs: &[C]) -> Vec<C> {
    let n = coeffs.len() - 1;
    // initial guesses on a circle of radius near the root magnitude
    let radius = coeffs[0].0.abs().powf(1.0 / n as f64).max(1.0);
    let mut roots: Vec<C> = (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64) + 0.35;
            (radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    for _ in 0..200 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom = cmul(denom, csub(roots[i], roots[j]));
                }
            }
            let step = cdiv(ceval(coeffs, roots[i]), denom);
            roots[i] = csub(roots[i], step);
            delta = delta.max(step.0.abs() + step.1.abs());
        }
        if delta < 1e-12 {
            break;
        }
    }
    roots
}

/// Verdict of one prime in the modular-vs-Galois comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
    /// p divides the level, p = 2, or the surface degenerates mod p.
    Skipped(String),
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Match => write!(f, "match"),
            Verdict::Mismatch => write!(f, "mismatch"),
            Verdict::Skipped(why) => write!(f, "skipped ({})", why),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rows: Vec<(u64, Verdict)>,
}

impl CompareReport {
    pub fn matches(&self) -> usize {
        self.rows.iter().filter(|(_, v)| *v == Verdict::Match).count()
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|(_, v)| *v == Verdict::Mismatch).count()
    }

    pub fn all_matched_or_skipped(&self) -> bool {
        self.mismatches() == 0
    }
}

/// Compare modular traces against Galois-side candidate sets, per prime.
pub fn compare_report(
    modular: &[(u64, (i64, i64))],
    galois: &[crate::counting::CandidateSet],
    skipped: &[(u64, String)],
) -> CompareReport {
    let mut rows: Vec<(u64, Verdict)> = Vec::new();
    for &(p, ap) in modular {
        if let Some((_, why)) = skipped.iter().find(|(sp, _)| *sp == p) {
            rows.push((p, Verdict::Skipped(why.clone())));
            continue;
        }
        match galois.iter().find(|set| set.p == p) {
            Some(set) => {
                let v = if set.contains(ap) { Verdict::Match } else { Verdict::Mismatch };
                rows.push((p, v));
            }
            None => rows.push((p, Verdict::Skipped("no counts".into()))),
        }
    }
    rows.sort_by_key(|r| r.0);
    CompareReport { rows }
}

/// The six-value eigensystem of the modulus-7 block: values of `v5_formula`
/// over the pairs with psi nontrivial, sorted and deduplicated.
pub fn v5_orbit(p: u64) -> Result<Vec<QuadElem>, LfactorError> {
    let chis = DirichletChar::all_of_order_dividing(7, 3).expect("characters mod 7");
    let mut vals = Vec::new();
    for chi in &chis {
        for psi in &chis {
            if psi.is_trivial() {
                continue;
            }
            vals.push(v5_formula(chi, psi, p)?);
        }
    }
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals.dedup();
    Ok(vals)
}

/// Monic integer quadratic with the given exact value and its conjugate as
/// roots; None if trace or norm fail to be integers.
pub fn min_poly_pair(v: &QuadElem) -> Option<IntPolynomial> {
    v.min_poly()
}

/// The degree-6 integer polynomial with the six orbit values as roots.
pub fn v5_sextic(p: u64) -> Result<IntPolynomial, LfactorError> {
    let orbit = v5_orbit(p)?;
    let mut polys: Vec<IntPolynomial> = Vec::new();
    for v in &orbit {
        let m = v.min_poly().expect("orbit values are algebraic integers");
        if !polys.contains(&m) {
            polys.push(m);
        }
    }
    let mut f = IntPolynomial::one();
    for m in &polys {
        f = f.mul(m);
    }
    Ok(f)
}

/// Exact rational-to-i64 helper for report formatting.
pub fn rat_to_display(r: &BigRat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Convenience: |x| <= 2 sqrt(p) test used when validating quadratic data.
pub fn hasse_ok(a: i64, p: u64) -> bool {
    (a as i128) * (a as i128) <= 4 * p as i128
}

/// Rough numeric magnitude of an exact quadratic value, for reports only.
pub fn approx_abs(v: &QuadElem) -> f64 {
    let (re, im) = v.approx_complex();
    (re * re + im * im).sqrt()
}

/// Trace down to Z when the value is a rational integer.
pub fn as_integer(v: &QuadElem) -> Option<i64> {
    let r = v.as_rational()?;
    if r.denom() == &BigInt::from(1) {
        r.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn gl3_local_examples() {
        let l = gl3_local(QuadElem::gaussian(1, 2), 3);
        assert_eq!(l.b, QuadElem::gaussian(1, -2));
        let l = gl3_local(QuadElem::from_int(7), 17);
        assert_eq!(l.b, QuadElem::from_int(7));
        let l = gl3_local(QuadElem::zero(), 5);
        assert!(l.a.is_zero() && l.b.is_zero());
    }

    #[test]
    fn dual_is_involution_and_fixes_unitary_shape() {
        let l = gl3_local(QuadElem::gaussian(1, 2), 3);
        assert_eq!(dual_cubic(&dual_cubic(&l)), l);
        assert_eq!(dual_cubic(&l), l);
        let l = gl3_local(QuadElem::from_int(-5), 17);
        assert_eq!(dual_cubic(&l), l);
        // b = a (not conj(a)): dual differs in general
        let a = QuadElem::from_parts(-3, -5, 1, -3, 1); // -5 - 3 sqrt(-3)
        let v5ish = LocalCubic { p: 3, a: a.clone(), b: a };
        assert_ne!(dual_cubic(&v5ish), v5ish);
    }

    #[test]
    fn selfdual_iff_real_trace() {
        assert!(is_selfdual(&gl3_local(QuadElem::from_int(7), 17)));
        assert!(is_selfdual(&gl3_local(QuadElem::from_int(-5), 17)));
        assert!(!is_selfdual(&gl3_local(QuadElem::gaussian(1, 2), 3)));
        // totally real quadratic trace
        assert!(is_selfdual(&gl3_local(QuadElem::from_parts(2, 1, 1, 1, 1), 7)));
    }

    #[test]
    fn eisenstein_lift_values() {
        for p in [2u64, 3, 5, 7, 11] {
            let a = p as i64 + 1;
            let v = (1 + p + p * p) as i64;
            assert_eq!(eisenstein_lift(a, p, 1), v);
            assert_eq!(eisenstein_lift(a, p, 2), v);
        }
        assert_eq!(eisenstein_lift(0, 3, 1), 1);
        // the two lifts agree exactly at a = p + 1
        for p in [3u64, 5, 7] {
            for a in -10i64..=10 {
                let same = eisenstein_lift(a, p, 1) == eisenstein_lift(a, p, 2);
                assert_eq!(same, a == p as i64 + 1, "p={} a={}", p, a);
            }
        }
    }

    #[test]
    fn v5_formula_known_value() {
        // chi(3) = omega, psi(3) = omega^2 gives -5 - 3 sqrt(-3) at p = 3
        let chi = DirichletChar::new(7, 3, 1).unwrap();
        let psi = DirichletChar::new(7, 3, 2).unwrap();
        let v = v5_formula(&chi, &psi, 3).unwrap();
        assert_eq!(v, QuadElem::from_parts(-3, -5, 1, -3, 1));
        // trivial pair: 1 + p + p^2
        let t = DirichletChar::trivial(7);
        for p in [2u64, 3, 5, 11] {
            assert_eq!(
                v5_formula(&t, &t, p).unwrap(),
                QuadElem::from_int((1 + p + p * p) as i64)
            );
        }
        assert!(v5_formula(&chi, &psi, 7).is_err());
    }

    #[test]
    fn v5_sum_identity_all_pairs() {
        let chis = DirichletChar::all_of_order_dividing(7, 3).unwrap();
        for p in (2u64..=100).filter(|&p| crate::arith::is_prime(p) && p != 7) {
            for chi in &chis {
                for psi in &chis {
                    assert_eq!(
                        v5_formula(chi, psi, p).unwrap(),
                        v5_galois_sum(chi, psi, p).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn v5_orbit_at_3() {
        let orbit = v5_orbit(3).unwrap();
        assert_eq!(orbit.len(), 6);
        let a3 = QuadElem::from_parts(-3, -5, 1, -3, 1);
        let w = QuadElem::omega();
        let expected = [
            a3.clone(),
            a3.conj(),
            &a3 * &w,
            (&a3 * &w).conj(),
            &a3 * &w.conj(),
            &a3.conj() * &w,
        ];
        for e in &expected {
            assert!(orbit.contains(e), "missing {}", e);
        }
    }

    #[test]
    fn v5_sextic_at_3() {
        let f = v5_sextic(3).unwrap();
        assert_eq!(f.degree(), Some(6));
        // product of the three quadratics X^2+10X+52, X^2-14X+52, X^2+4X+52
        let q1 = IntPolynomial::from_i64(&[52, 10, 1]);
        let q2 = IntPolynomial::from_i64(&[52, -14, 1]);
        let q3 = IntPolynomial::from_i64(&[52, 4, 1]);
        assert_eq!(f, q1.mul(&q2).mul(&q3));
    }

    #[test]
    fn sym2_shape() {
        // a = 0: X^3 + pX^2 - p^2 X - p^3 = (X+p)^2 (X-p)
        let l = sym2_local(0, 5).unwrap();
        assert_eq!(l.a, QuadElem::from_int(-5));
        assert!(is_selfdual(&l));
        assert!(weil_check(&l, 1e-9));
        // direct substitution at (1, 5): a^2 - p = -4
        let l = sym2_local(1, 5).unwrap();
        assert_eq!(l.a, QuadElem::from_int(-4));
        assert!(sym2_local(5, 5).is_err());
    }

    #[test]
    fn sym2_weil_exhaustive() {
        for p in (2u64..=50).filter(|&p| crate::arith::is_prime(p)) {
            let bound = (4.0 * p as f64).sqrt() as i64;
            for a in -bound..=bound {
                let l = sym2_local(a, p).unwrap();
                assert!(weil_check(&l, 1e-9), "a={} p={}", a, p);
                assert!(is_selfdual(&l));
            }
        }
    }

    #[test]
    fn weil_check_fixture_like_values() {
        assert!(weil_check(&gl3_local(QuadElem::gaussian(-49, -188), 173), 1e-9));
        assert!(weil_check(&gl3_local(QuadElem::gaussian(1, 2), 3), 1e-9));
        // triple root boundary case
        assert!(weil_check(&gl3_local(QuadElem::from_int(21), 7), 1e-9));
        // and a clear failure
        assert!(!weil_check(&gl3_local(QuadElem::from_int(50), 3), 1e-9));
    }

    #[test]
    fn compare_report_verdicts() {
        use crate::counting::{frobenius_fit, FitMode, FitOptions, SurfaceParams};
        let s = SurfaceParams::from_pair(2, 1);
        let opts = FitOptions { rmax: 3, ..Default::default() };
        let good = frobenius_fit(&s, 3, FitMode::Verify, Some((1, 2)), &opts).unwrap();
        let report = compare_report(
            &[(3, (1, 2)), (2, (9, 9))],
            &[good],
            &[(2, "even prime".into())],
        );
        assert_eq!(report.rows.len(), 2);
        assert!(report.all_matched_or_skipped());
        assert_eq!(report.matches(), 1);
        // corrupted trace must be flagged
        let bad = frobenius_fit(&s, 3, FitMode::Verify, Some((1, 2)), &opts).unwrap();
        let report = compare_report(&[(3, (3, 0))], &[bad], &[]);
        assert_eq!(report.mismatches(), 1);
    }

    #[test]
    fn display_helpers() {
        assert_eq!(rat_to_display(&rat(3, 1)), "3");
        assert_eq!(rat_to_display(&rat(1, 16)), "1/16");
        assert_eq!(as_integer(&QuadElem::from_int(-7)), Some(-7));
        assert_eq!(as_integer(&QuadElem::gaussian(1, 1)), None);
    }
}
