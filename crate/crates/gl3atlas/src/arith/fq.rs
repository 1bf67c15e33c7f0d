//! Small finite fields F_{p^r} for r <= 4, and quadratic extensions of them.
//!
//! Elements are coefficient vectors over F_p with respect to the power basis
//! of a fixed monic irreducible modulus. The modulus is chosen
//! deterministically (lexicographically smallest, comparing coefficients from
//! the X^{r-1} one down), so a field built twice is bit-identical; every
//! counting result downstream is checked to be independent of this choice.
//!
//! The twisted point counts need the loci X^q = -X in F_{q^2}. Rather than
//! building F_{p^{4r}} towers, `Fq2` models F_{q^2} = F_q(eta) with
//! eta^2 = nu a non-square of F_q, for which eta^q = -eta; the solution set
//! is then eta * F_q and all arithmetic stays in the quadratic extension.

use super::{is_prime, mod_inv_u64, ArithError};

pub const MAX_EXT_DEGREE: usize = 4;

/// A field element: `r` coefficients mod p, unused slots zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FqElem {
    pub(crate) c: [u64; MAX_EXT_DEGREE],
}

impl FqElem {
    pub const ZERO: FqElem = FqElem { c: [0; MAX_EXT_DEGREE] };

    pub fn is_zero(&self) -> bool {
        self.c == [0; MAX_EXT_DEGREE]
    }

    pub fn coeffs(&self) -> &[u64; MAX_EXT_DEGREE] {
        &self.c
    }
}

/// Field descriptor for F_{p^r}; all element operations go through it.
#[derive(Clone, Debug)]
pub struct Fq {
    p: u64,
    r: usize,
    /// Monic modulus of degree r, low coefficients first (length r, the
    /// leading 1 implicit).
    modulus: Vec<u64>,
    /// Reduction table: X^{r+k} mod modulus for k = 0..r-2, as coefficient
    /// rows of length r.
    xpow: Vec<[u64; MAX_EXT_DEGREE]>,
}

impl Fq {
    /// F_{p^r} with the deterministic smallest modulus.
    pub fn new(p: u64, r: usize) -> Result<Fq, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        assert!((1..=MAX_EXT_DEGREE).contains(&r), "extension degree out of range");
        let modulus = smallest_irreducible(p, r, 0).ok_or(ArithError::ReducibleModulus)?;
        Ok(Self::from_modulus(p, r, modulus))
    }

    /// Same field with the `skip`-th smallest irreducible modulus instead;
    /// used to check that computed counts are model-independent.
    pub fn with_alternative_modulus(p: u64, r: usize, skip: usize) -> Result<Fq, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        let modulus = smallest_irreducible(p, r, skip).ok_or(ArithError::ReducibleModulus)?;
        Ok(Self::from_modulus(p, r, modulus))
    }

    /// Construct with an explicit monic modulus (length r, low first,
    /// leading 1 implicit). Errors if the modulus is reducible.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Fq, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        let r = modulus.len();
        assert!((1..=MAX_EXT_DEGREE).contains(&r));
        if !is_irreducible(p, &modulus) {
            return Err(ArithError::ReducibleModulus);
        }
        Ok(Self::from_modulus(p, r, modulus))
    }

    fn from_modulus(p: u64, r: usize, modulus: Vec<u64>) -> Fq {
        let mut fq = Fq { p, r, modulus, xpow: Vec::new() };
        // X^r = -modulus_low; X^{r+k} derived by shifting and reducing.
        let mut cur = [0u64; MAX_EXT_DEGREE];
        for i in 0..r {
            cur[i] = (p - fq.modulus[i] % p) % p;
        }
        for _ in 0..r.saturating_sub(1) {
            fq.xpow.push(cur);
            // multiply cur by X and reduce
            let top = cur[r - 1];
            let mut next = [0u64; MAX_EXT_DEGREE];
            for i in (1..r).rev() {
                next[i] = cur[i - 1];
            }
            next[0] = 0;
            if top != 0 {
                for i in 0..r {
                    let sub = (fq.modulus[i] % p) * top % p;
                    next[i] = (next[i] + p - sub) % p;
                }
            }
            cur = next;
        }
        fq
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.r as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    pub fn one(&self) -> FqElem {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = 1 % self.p;
        FqElem { c }
    }

    /// Embed an integer (the prime subfield).
    pub fn from_int(&self, n: i64) -> FqElem {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = n.rem_euclid(self.p as i64) as u64;
        FqElem { c }
    }

    /// Element from its dense index in [0, p^r): base-p digits.
    pub fn from_index(&self, mut idx: u64) -> FqElem {
        let mut c = [0; MAX_EXT_DEGREE];
        for slot in c.iter_mut().take(self.r) {
            *slot = idx % self.p;
            idx /= self.p;
        }
        FqElem { c }
    }

    pub fn to_index(&self, x: &FqElem) -> u64 {
        let mut idx = 0u64;
        for i in (0..self.r).rev() {
            idx = idx * self.p + x.c[i];
        }
        idx
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.r {
            let s = a.c[i] + b.c[i];
            c[i] = if s >= self.p { s - self.p } else { s };
        }
        FqElem { c }
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.r {
            c[i] = if a.c[i] >= b.c[i] { a.c[i] - b.c[i] } else { a.c[i] + self.p - b.c[i] };
        }
        FqElem { c }
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        self.sub(&FqElem::ZERO, a)
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let r = self.r;
        if r == 1 {
            let mut c = [0; MAX_EXT_DEGREE];
            c[0] = a.c[0] * b.c[0] % self.p;
            return FqElem { c };
        }
        // schoolbook product; coefficients stay below 4 * (p-1)^2 < 2^63
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..r {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] += a.c[i] * b.c[j];
            }
        }
        let mut c = [0u64; MAX_EXT_DEGREE];
        for i in 0..r {
            c[i] = prod[i] % self.p;
        }
        for k in 0..r - 1 {
            let hi = prod[r + k] % self.p;
            if hi == 0 {
                continue;
            }
            let row = &self.xpow[k];
            for i in 0..r {
                c[i] = (c[i] + hi * row[i]) % self.p;
            }
        }
        FqElem { c }
    }

    pub fn scalar_mul(&self, s: u64, a: &FqElem) -> FqElem {
        let s = s % self.p;
        let mut c = [0; MAX_EXT_DEGREE];
        for i in 0..self.r {
            c[i] = a.c[i] * s % self.p;
        }
        FqElem { c }
    }

    pub fn square(&self, a: &FqElem) -> FqElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut base = *a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: &FqElem) -> FqElem {
        assert!(!a.is_zero(), "inverse of zero in F_{{{}^{}}}", self.p, self.r);
        if self.r == 1 {
            let mut c = [0; MAX_EXT_DEGREE];
            c[0] = mod_inv_u64(a.c[0], self.p).unwrap();
            return FqElem { c };
        }
        self.pow(a, self.order() - 2)
    }

    /// The field automorphism x -> x^p.
    pub fn frobenius(&self, a: &FqElem) -> FqElem {
        self.pow(a, self.p)
    }

    /// Quadratic character of the field: 1 on nonzero squares, -1 on
    /// non-squares, 0 at zero.
    pub fn chi2(&self, a: &FqElem) -> i32 {
        if a.is_zero() {
            return 0;
        }
        let s = self.pow(a, (self.order() - 1) / 2);
        if s == self.one() {
            1
        } else {
            -1
        }
    }

    /// Lookup table of chi2 indexed by element index; the counting loops use
    /// this instead of powering.
    pub fn chi2_table(&self) -> Vec<i8> {
        let q = self.order();
        let mut t = vec![-1i8; q as usize];
        t[0] = 0;
        // mark squares
        for idx in 1..q {
            let x = self.from_index(idx);
            let s = self.square(&x);
            t[self.to_index(&s) as usize] = 1;
        }
        t
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    /// Smallest-index non-square, for building quadratic extensions.
    pub fn nonsquare(&self) -> FqElem {
        for idx in 1..self.order() {
            let x = self.from_index(idx);
            if self.chi2(&x) == -1 {
                return x;
            }
        }
        unreachable!("odd-order field has non-squares")
    }
}

/// Irreducibility over F_p via gcd(f, X^{p^i} - X) for i <= deg/2.
fn is_irreducible(p: u64, modulus: &[u64]) -> bool {
    let r = modulus.len();
    let mut f: Vec<u64> = modulus.to_vec();
    f.push(1);
    for i in 1..=r / 2 {
        // X^{p^i} mod f
        let mut x = vec![0u64, 1];
        for _ in 0..i {
            x = polymod_pow(&x, p, &f, p);
        }
        // gcd(f, x - X)
        let mut g = x;
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        trim(&mut g);
        if poly_gcd_deg(&f, &g, p) > 0 {
            return false;
        }
    }
    true
}

fn trim(v: &mut Vec<u64>) {
    while matches!(v.last(), Some(0)) {
        v.pop();
    }
}

fn polymod_mul(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&mut prod, f, p);
    prod
}

fn poly_rem(a: &mut Vec<u64>, f: &[u64], p: u64) {
    let d = f.len() - 1;
    while a.len() > d {
        let lead = *a.last().unwrap() % p;
        let k = a.len() - 1 - d;
        if lead != 0 {
            for i in 0..d {
                let sub = f[i] % p * lead % p;
                a[k + i] = (a[k + i] + p - sub) % p;
            }
        }
        a.pop();
        trim(a);
        if a.is_empty() {
            return;
        }
    }
    trim(a);
}

fn polymod_pow(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = polymod_mul(&acc, &base, f, p);
        }
        base = polymod_mul(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd_deg(a: &[u64], b: &[u64], p: u64) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        // a mod b, after making b monic
        let lead_inv = mod_inv_u64(*b.last().unwrap() % p, p).unwrap();
        let d = b.len() - 1;
        if d == 0 {
            return 0;
        }
        let mut monic: Vec<u64> = b[..d].iter().map(|&c| c % p * lead_inv % p).collect();
        monic.push(1);
        let mut r = a.clone();
        poly_rem(&mut r, &monic, p);
        a = b;
        b = r;
    }
    if a.is_empty() {
        0
    } else {
        a.len() - 1
    }
}

/// The `skip`-th monic irreducible of degree r over F_p, ordering candidates
/// X^r + a_{r-1} X^{r-1} + ... + a_0 by the tuple (a_{r-1}, ..., a_0).
fn smallest_irreducible(p: u64, r: usize, mut skip: usize) -> Option<Vec<u64>> {
    if r == 1 {
        // X + a; all are irreducible
        return if (skip as u64) < p { Some(vec![skip as u64]) } else { None };
    }
    let total = p.checked_pow(r as u32)?;
    for code in 0..total {
        // decode the tuple (a_{r-1}, ..., a_0), a_{r-1} most significant
        let mut m = vec![0u64; r];
        let mut cc = code;
        for i in 0..r {
            let weight = p.pow((r - 1 - i) as u32);
            m[r - 1 - i] = cc / weight;
            cc %= weight;
        }
        if is_irreducible(p, &m) {
            if skip == 0 {
                return Some(m);
            }
            skip -= 1;
        }
    }
    None
}

/// F_{q^2} = F_q(eta), eta^2 = nu with nu the smallest non-square of F_q.
/// Elements are pairs (a, b) meaning a + b*eta. The q-power Frobenius is
/// (a, b) -> (a, -b) since eta^q = -eta.
#[derive(Clone, Debug)]
pub struct Fq2 {
    base: Fq,
    nu: FqElem,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fq2Elem {
    pub a: FqElem,
    pub b: FqElem,
}

impl Fq2 {
    pub fn new(base: Fq) -> Fq2 {
        assert!(base.p() != 2, "quadratic extension model needs odd characteristic");
        let nu = base.nonsquare();
        Fq2 { base, nu }
    }

    pub fn base(&self) -> &Fq {
        &self.base
    }

    pub fn nu(&self) -> &FqElem {
        &self.nu
    }

    pub fn order(&self) -> u64 {
        self.base.order() * self.base.order()
    }

    pub fn zero(&self) -> Fq2Elem {
        Fq2Elem { a: FqElem::ZERO, b: FqElem::ZERO }
    }

    pub fn one(&self) -> Fq2Elem {
        Fq2Elem { a: self.base.one(), b: FqElem::ZERO }
    }

    pub fn embed(&self, a: FqElem) -> Fq2Elem {
        Fq2Elem { a, b: FqElem::ZERO }
    }

    pub fn eta(&self) -> Fq2Elem {
        Fq2Elem { a: FqElem::ZERO, b: self.base.one() }
    }

    pub fn from_index(&self, idx: u64) -> Fq2Elem {
        let q = self.base.order();
        Fq2Elem { a: self.base.from_index(idx % q), b: self.base.from_index(idx / q) }
    }

    pub fn to_index(&self, x: &Fq2Elem) -> u64 {
        self.base.to_index(&x.b) * self.base.order() + self.base.to_index(&x.a)
    }

    pub fn add(&self, x: &Fq2Elem, y: &Fq2Elem) -> Fq2Elem {
        Fq2Elem { a: self.base.add(&x.a, &y.a), b: self.base.add(&x.b, &y.b) }
    }

    pub fn sub(&self, x: &Fq2Elem, y: &Fq2Elem) -> Fq2Elem {
        Fq2Elem { a: self.base.sub(&x.a, &y.a), b: self.base.sub(&x.b, &y.b) }
    }

    pub fn neg(&self, x: &Fq2Elem) -> Fq2Elem {
        Fq2Elem { a: self.base.neg(&x.a), b: self.base.neg(&x.b) }
    }

    pub fn mul(&self, x: &Fq2Elem, y: &Fq2Elem) -> Fq2Elem {
        // (a + b eta)(c + d eta) = ac + bd nu + (ad + bc) eta
        let f = &self.base;
        let ac = f.mul(&x.a, &y.a);
        let bd = f.mul(&x.b, &y.b);
        let ad = f.mul(&x.a, &y.b);
        let bc = f.mul(&x.b, &y.a);
        Fq2Elem { a: f.add(&ac, &f.mul(&bd, &self.nu)), b: f.add(&ad, &bc) }
    }

    pub fn square(&self, x: &Fq2Elem) -> Fq2Elem {
        self.mul(x, x)
    }

    pub fn pow(&self, x: &Fq2Elem, mut e: u64) -> Fq2Elem {
        let mut base = *x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            e >>= 1;
        }
        acc
    }

    /// The q-power Frobenius of F_{q^2} over F_q: conjugation.
    pub fn conj(&self, x: &Fq2Elem) -> Fq2Elem {
        Fq2Elem { a: x.a, b: self.base.neg(&x.b) }
    }

    /// Scale by a base-field element.
    pub fn scale_base(&self, x: &Fq2Elem, s: &FqElem) -> Fq2Elem {
        Fq2Elem { a: self.base.mul(&x.a, s), b: self.base.mul(&x.b, s) }
    }

    /// Norm to F_q: x * x^q = a^2 - nu b^2.
    pub fn norm(&self, x: &Fq2Elem) -> FqElem {
        let f = &self.base;
        let a2 = f.square(&x.a);
        let b2 = f.square(&x.b);
        f.sub(&a2, &f.mul(&self.nu, &b2))
    }

    pub fn chi2(&self, x: &Fq2Elem) -> i32 {
        if x.a.is_zero() && x.b.is_zero() {
            return 0;
        }
        let s = self.pow(x, (self.order() - 1) / 2);
        if s == self.one() {
            1
        } else {
            -1
        }
    }

    /// Smallest-index non-square of F_{q^2}.
    pub fn nonsquare(&self) -> Fq2Elem {
        for idx in 1..self.order() {
            let x = self.from_index(idx);
            if self.chi2(&x) == -1 {
                return x;
            }
        }
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SplitMix64;

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        let f = Fq::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0]); // X^2 + 1
        assert_eq!(f.order(), 9);
    }

    #[test]
    fn f9_cubic_roots() {
        // X^3 + X = X (X^2 + 1) has exactly 3 roots in F_9.
        let f = Fq::new(3, 2).unwrap();
        let n = f
            .elements()
            .filter(|x| {
                let x3 = f.mul(&f.square(x), x);
                f.add(&x3, x).is_zero()
            })
            .count();
        assert_eq!(n, 3);
    }

    #[test]
    fn frobenius_order_two_on_quadratic() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = Fq::new(p, 2).unwrap();
            for x in f.elements() {
                let fx = f.frobenius(&x);
                assert_eq!(f.frobenius(&fx), x);
            }
        }
    }

    #[test]
    fn field_axioms_randomized() {
        let mut rng = SplitMix64::new(42);
        for p in [2u64, 3, 5, 7, 11, 13] {
            for r in 1..=4usize {
                let f = Fq::new(p, r).unwrap();
                let q = f.order();
                for _ in 0..60 {
                    let a = f.from_index(rng.below(q));
                    let b = f.from_index(rng.below(q));
                    let c = f.from_index(rng.below(q));
                    // associativity and commutativity
                    assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                    assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                    assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
                    // distributivity
                    assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                    // inverses
                    if !a.is_zero() {
                        assert_eq!(f.mul(&a, &f.inv(&a)), f.one());
                    }
                }
            }
        }
    }

    #[test]
    fn fermat_exhaustive_small_orders() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            for r in 1..=4usize {
                let q = p.pow(r as u32);
                if q > 2500 {
                    continue;
                }
                let f = Fq::new(p, r).unwrap();
                for x in f.elements() {
                    assert_eq!(f.pow(&x, q), x, "x^q != x for p={} r={}", p, r);
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_prime_field() {
        let f = Fq::new(5, 3).unwrap();
        let fixed = f.elements().filter(|x| f.frobenius(x) == *x).count();
        assert_eq!(fixed, 5);
    }

    #[test]
    fn chi2_table_matches_powering() {
        let f = Fq::new(7, 2).unwrap();
        let t = f.chi2_table();
        for x in f.elements() {
            assert_eq!(t[f.to_index(&x) as usize] as i32, f.chi2(&x));
        }
        // exactly (q-1)/2 squares
        assert_eq!(t.iter().filter(|&&v| v == 1).count(), 24);
    }

    #[test]
    fn alternative_modulus_gives_isomorphic_counts() {
        let f1 = Fq::new(3, 2).unwrap();
        let f2 = Fq::with_alternative_modulus(3, 2, 1).unwrap();
        assert_ne!(f1.modulus(), f2.modulus());
        // same number of squares in both models
        let s1 = f1.elements().filter(|x| f1.chi2(x) == 1).count();
        let s2 = f2.elements().filter(|x| f2.chi2(x) == 1).count();
        assert_eq!(s1, s2);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // X^2 - 1 = (X-1)(X+1)
        assert!(Fq::with_modulus(5, vec![4, 0]).is_err());
        // X^2 + 2 is irreducible mod 5
        assert!(Fq::with_modulus(5, vec![2, 0]).is_ok());
    }

    #[test]
    fn fq2_eta_antifixed_by_frobenius() {
        for p in [3u64, 5, 13] {
            for r in 1..=2usize {
                let f = Fq::new(p, r).unwrap();
                let q = f.order();
                let e = Fq2::new(f);
                // eta^q = -eta, computed honestly by powering
                let eta_q = e.pow(&e.eta(), q);
                assert_eq!(eta_q, e.neg(&e.eta()));
                // and conj agrees with powering on random elements
                let mut rng = SplitMix64::new(p);
                for _ in 0..20 {
                    let x = e.from_index(rng.below(e.order()));
                    assert_eq!(e.conj(&x), e.pow(&x, q));
                }
            }
        }
    }

    #[test]
    fn fq2_norm_lands_in_base() {
        let f = Fq::new(5, 1).unwrap();
        let e = Fq2::new(f);
        for idx in 0..e.order() {
            let x = e.from_index(idx);
            let n = e.norm(&x);
            let via_mul = e.mul(&x, &e.conj(&x));
            assert_eq!(via_mul.b, FqElem::ZERO);
            assert_eq!(via_mul.a, n);
        }
    }
}
