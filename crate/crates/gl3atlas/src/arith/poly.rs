//! Integer polynomials in one variable, dense representation.
//!
//! Coefficients are stored low degree first with no trailing zeros, so the
//! zero polynomial is the empty vector. These carry characteristic and
//! minimal polynomials; the only division we ever need is by monic divisors,
//! which stays in Z[X].

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial { coeffs: vec![BigInt::one()] }
    }

    /// X - c.
    pub fn linear(c: i64) -> Self {
        IntPolynomial::from_coeffs(vec![BigInt::from(-c), BigInt::one()])
    }

    /// Low degree first; trailing zeros are trimmed.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        matches!(self.coeffs.last(), Some(c) if c.is_one())
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        IntPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder by a monic divisor; exact in Z[X].
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "division requires a monic divisor");
        let d = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            quot[i - d] = c.clone();
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let idx = i - d + j;
                rem[idx] = &rem[idx] - &c * b;
            }
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// True when `divisor` (monic) divides self exactly.
    pub fn divisible_by(&self, divisor: &Self) -> bool {
        self.div_rem_monic(divisor).1.is_zero()
    }

    /// Largest k with divisor^k | self (monic divisor of positive degree).
    pub fn multiplicity_of(&self, divisor: &Self) -> usize {
        assert!(divisor.degree().map_or(false, |d| d > 0));
        let mut k = 0;
        let mut f = self.clone();
        loop {
            let (q, r) = f.div_rem_monic(divisor);
            if !r.is_zero() {
                return k;
            }
            k += 1;
            f = q;
            if f.degree().is_none() {
                return k;
            }
        }
    }

    /// Content (gcd of coefficients), zero polynomial has content 0.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = num_integer::gcd(g, c.abs());
        }
        g
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i as u64 + 1))
                .collect(),
        )
    }

    /// Coefficients reduced mod p, low degree first, trimmed.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        let mut v: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| {
                let r = c % &pb;
                let r = if r.is_negative() { r + &pb } else { r };
                // remainder < p fits u64
                r.to_string().parse::<u64>().unwrap()
            })
            .collect();
        while matches!(v.last(), Some(0)) {
            v.pop();
        }
        v
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{}", abs)?;
            }
            if i >= 1 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "X")?;
                if i >= 2 {
                    write!(f, "^{}", i)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_divide() {
        let a = IntPolynomial::from_i64(&[5, -2, 1]); // X^2 - 2X + 5
        let b = IntPolynomial::from_i64(&[-1, 1]); // X - 1
        let prod = a.mul(&b);
        let (q, r) = prod.div_rem_monic(&b);
        assert!(r.is_zero());
        assert_eq!(q, a);
        assert_eq!(prod.degree(), Some(3));
    }

    #[test]
    fn multiplicity() {
        let m = IntPolynomial::from_i64(&[-7, 1]); // X - 7
        let f = m.mul(&m).mul(&m).mul(&IntPolynomial::from_i64(&[1, 1]));
        assert_eq!(f.multiplicity_of(&m), 3);
        assert_eq!(f.multiplicity_of(&IntPolynomial::from_i64(&[1, 1])), 1);
        assert_eq!(f.multiplicity_of(&IntPolynomial::from_i64(&[2, 1])), 0);
    }

    #[test]
    fn eval_horner() {
        let f = IntPolynomial::from_i64(&[1, 0, -3, 2]); // 2X^3 - 3X^2 + 1
        assert_eq!(f.eval(&BigInt::from(2)), BigInt::from(5));
        assert_eq!(f.eval(&BigInt::from(-1)), BigInt::from(-4));
    }

    #[test]
    fn display_form() {
        let f = IntPolynomial::from_i64(&[-27, 3, -1, 1]);
        assert_eq!(format!("{}", f), "X^3 - X^2 + 3*X - 27");
    }
}
