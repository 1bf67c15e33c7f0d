//! Elements of quadratic fields Q(sqrt(d)), stored exactly.
//!
//! A `QuadElem` is x + y*sqrt(d) with x, y rational and d a squarefree
//! non-unit integer tag. Values with y = 0 are plain rationals and compare
//! equal across tags, so the roots of unity of order 1 and 2 can live in any
//! field. Orders 3 and 6 live over d = -3, order 4 over d = -1.

use super::{rat, rat_int, ArithError, BigRat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone)]
pub struct QuadElem {
    d: i64,
    x: BigRat,
    y: BigRat,
}

impl PartialEq for QuadElem {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y && (self.y.is_zero() || self.d == other.d)
    }
}

impl Eq for QuadElem {}

impl std::hash::Hash for QuadElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
        if !self.y.is_zero() {
            self.d.hash(state);
        }
    }
}

impl QuadElem {
    /// x + y*sqrt(d). `d` must be squarefree and not 0 or 1.
    pub fn new(d: i64, x: BigRat, y: BigRat) -> Self {
        assert!(d != 0 && d != 1 && is_squarefree(d), "bad discriminant tag {}", d);
        QuadElem { d, x, y }
    }

    pub fn from_rat(x: BigRat) -> Self {
        // The tag is irrelevant for rational values; equality ignores it.
        QuadElem { d: -1, x, y: BigRat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn from_parts(d: i64, x0: i64, x1: i64, y0: i64, y1: i64) -> Self {
        Self::new(d, rat(x0, x1), rat(y0, y1))
    }

    /// i = sqrt(-1).
    pub fn gaussian_i() -> Self {
        Self::from_parts(-1, 0, 1, 1, 1)
    }

    /// x + y*i in Z[i].
    pub fn gaussian(x: i64, y: i64) -> Self {
        Self::from_parts(-1, x, 1, y, 1)
    }

    /// omega = (-1 + sqrt(-3)) / 2, a primitive cube root of unity.
    pub fn omega() -> Self {
        Self::from_parts(-3, -1, 2, 1, 2)
    }

    /// A primitive root of unity of order n, for n in {1, 2, 3, 4, 6}.
    pub fn root_of_unity(n: u64) -> Self {
        match n {
            1 => Self::from_int(1),
            2 => Self::from_int(-1),
            3 => Self::omega(),
            4 => Self::gaussian_i(),
            // e^(i pi / 3) = (1 + sqrt(-3)) / 2 = -omega^2
            6 => Self::from_parts(-3, 1, 2, 1, 2),
            _ => panic!("no exact quadratic model for order-{} roots of unity", n),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn x(&self) -> &BigRat {
        &self.x
    }

    pub fn y(&self) -> &BigRat {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Real in every embedding: rational, or irrational over d > 0.
    pub fn is_totally_real(&self) -> bool {
        self.is_rational() || self.d > 0
    }

    pub fn as_rational(&self) -> Option<&BigRat> {
        if self.is_rational() {
            Some(&self.x)
        } else {
            None
        }
    }

    /// The field conjugate x - y*sqrt(d). For imaginary d this is complex
    /// conjugation.
    pub fn conj(&self) -> Self {
        QuadElem { d: self.d, x: self.x.clone(), y: -self.y.clone() }
    }

    /// Complex conjugation in the standard embedding: the field conjugate
    /// for imaginary d, the identity on totally real values.
    pub fn complex_conj(&self) -> Self {
        if self.d < 0 {
            self.conj()
        } else {
            self.clone()
        }
    }

    /// Field norm x^2 - d*y^2.
    pub fn norm(&self) -> BigRat {
        &self.x * &self.x - rat_int(self.d) * &self.y * &self.y
    }

    /// Trace 2x.
    pub fn trace(&self) -> BigRat {
        rat_int(2) * &self.x
    }

    fn common_d(&self, other: &Self) -> Result<i64, ArithError> {
        if self.is_rational() {
            Ok(other.d)
        } else if other.is_rational() || self.d == other.d {
            Ok(self.d)
        } else {
            Err(ArithError::MixedDiscriminants(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        let d = self.common_d(other)?;
        Ok(QuadElem { d, x: &self.x + &other.x, y: &self.y + &other.y })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        let d = self.common_d(other)?;
        let x = &self.x * &other.x + rat_int(d) * &self.y * &other.y;
        let y = &self.x * &other.y + &self.y * &other.x;
        Ok(QuadElem { d, x, y })
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        QuadElem { d: self.d, x: &self.x * c, y: &self.y * c }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero QuadElem");
        self.conj().scale(&n.recip())
    }

    /// Numerical value in the standard embedding: sqrt(d) -> i*sqrt(|d|)
    /// for d < 0, the positive square root for d > 0. Used only by the
    /// floating-point Weil check.
    pub fn approx_complex(&self) -> (f64, f64) {
        let xf = rat_to_f64(&self.x);
        let yf = rat_to_f64(&self.y);
        if self.d < 0 {
            (xf, yf * ((-self.d) as f64).sqrt())
        } else {
            (xf + yf * (self.d as f64).sqrt(), 0.0)
        }
    }
}

fn is_squarefree(d: i64) -> bool {
    let mut m = d.unsigned_abs();
    let mut f = 2u64;
    while f * f <= m {
        if m % (f * f) == 0 {
            return false;
        }
        while m % f == 0 {
            m /= f;
        }
        f += 1;
    }
    true
}

pub(crate) fn rat_to_f64(r: &BigRat) -> f64 {
    // Good enough for the tolerance checks we run; inputs are desk-scale.
    let num = bigint_to_f64(r.numer());
    let den = bigint_to_f64(r.denom());
    num / den
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let s = n.to_string();
    s.parse::<f64>().unwrap_or(if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        self.checked_add(rhs).expect("QuadElem add: incompatible fields")
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        self + &(-rhs.clone())
    }
}

impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        self.checked_mul(rhs).expect("QuadElem mul: incompatible fields")
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { d: self.d, x: -self.x, y: -self.y }
    }
}

impl PartialOrd for QuadElem {
    /// Ordering is only used to sort value lists deterministically.
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(
            self.x
                .cmp(&other.x)
                .then_with(|| self.y.cmp(&other.y))
                .then_with(|| self.effective_d().cmp(&other.effective_d())),
        )
    }
}

impl QuadElem {
    fn effective_d(&self) -> i64 {
        if self.is_rational() {
            0
        } else {
            self.d
        }
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        if self.x.is_zero() {
            return write!(f, "{}*sqrt({})", self.y, self.d);
        }
        if self.y.is_positive() {
            write!(f, "{}+{}*sqrt({})", self.x, self.y, self.d)
        } else {
            write!(f, "{}{}*sqrt({})", self.x, self.y, self.d)
        }
    }
}

/// Equality that treats rational values as field-independent is what `==`
/// provides; this helper additionally compares under conjugation.
pub fn conjugate_pair(a: &QuadElem, b: &QuadElem) -> bool {
    a == &b.conj()
}

impl QuadElem {
    /// Minimal polynomial over Q, monic of degree 1 or 2, when the element is
    /// an algebraic integer (integral x +/- y*sqrt(d) with integer trace and
    /// norm). Returns None when trace or norm is non-integral.
    pub fn min_poly(&self) -> Option<super::IntPolynomial> {
        use super::IntPolynomial;
        if self.is_rational() {
            if !self.x.is_integer() {
                return None;
            }
            return Some(IntPolynomial::from_coeffs(vec![
                -self.x.to_integer(),
                BigInt::one(),
            ]));
        }
        let t = self.trace();
        let n = self.norm();
        if !t.is_integer() || !n.is_integer() {
            return None;
        }
        Some(IntPolynomial::from_coeffs(vec![
            n.to_integer(),
            -t.to_integer(),
            BigInt::one(),
        ]))
    }
}
