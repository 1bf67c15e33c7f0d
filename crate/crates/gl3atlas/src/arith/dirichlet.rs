//! Dirichlet characters of prime modulus with exact root-of-unity values.
//!
//! A character is stored by the exponent it assigns to the smallest primitive
//! root: chi(g) = zeta_n^e for a fixed primitive n-th root of unity zeta_n.
//! Orders are restricted to {1, 2, 3, 4, 6} so every value is an exact
//! `QuadElem`. Only prime moduli are supported; the level-49 character
//! formulas use modulus 7 and order 3.

use super::{gcd_u64, is_prime, primitive_root, ArithError, QuadElem};

#[derive(Clone, Debug)]
pub struct DirichletChar {
    modulus: u64,
    order: u64,
    exponent: u64,
    /// dlog[a] = k with g^k = a (mod m), for a coprime to m.
    dlog: Vec<u64>,
}

impl DirichletChar {
    /// The character mod `modulus` (prime) of order `order` sending the
    /// smallest primitive root to zeta_order^exponent. `exponent` must be a
    /// unit mod `order` for the character to have exact order `order`;
    /// exponent 0 with order 1 gives the trivial character.
    pub fn new(modulus: u64, order: u64, exponent: u64) -> Result<Self, ArithError> {
        if !is_prime(modulus) {
            return Err(ArithError::BadCharacter(format!("modulus {} is not prime", modulus)));
        }
        if !matches!(order, 1 | 2 | 3 | 4 | 6) {
            return Err(ArithError::BadCharacter(format!(
                "order {} has no exact quadratic root-of-unity model",
                order
            )));
        }
        if (modulus - 1) % order != 0 {
            return Err(ArithError::BadCharacter(format!(
                "order {} does not divide {} - 1",
                order, modulus
            )));
        }
        let exponent = exponent % order;
        if order > 1 && gcd_u64(exponent, order) != 1 {
            return Err(ArithError::BadCharacter(format!(
                "exponent {} is not a unit mod order {}",
                exponent, order
            )));
        }
        let g = primitive_root(modulus)?;
        let mut dlog = vec![0u64; modulus as usize];
        let mut x = 1u64;
        for k in 0..modulus - 1 {
            dlog[x as usize] = k;
            x = x * g % modulus;
        }
        Ok(DirichletChar { modulus, order, exponent, dlog })
    }

    pub fn trivial(modulus: u64) -> Self {
        Self::new(modulus, 1, 0).expect("trivial character")
    }

    /// All characters mod `modulus` of order dividing `n` (n in {1,2,3,4,6}).
    pub fn all_of_order_dividing(modulus: u64, n: u64) -> Result<Vec<Self>, ArithError> {
        // Characters of order dividing n correspond to exponents 0..n on the
        // primitive root, each of exact order n / gcd(e, n).
        let mut out = Vec::new();
        for e in 0..n {
            let ord = n / gcd_u64(e.max(1), n).max(1);
            let ord = if e == 0 { 1 } else { ord };
            out.push(Self::new(modulus, ord.max(1), e % ord.max(1))?);
        }
        Ok(out)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// chi(n): an exact root of unity, or 0 when gcd(n, modulus) > 1.
    pub fn value(&self, n: i64) -> QuadElem {
        let a = n.rem_euclid(self.modulus as i64) as u64;
        if a == 0 {
            return QuadElem::zero();
        }
        let k = self.dlog[a as usize];
        let e = k % self.order * self.exponent % self.order;
        QuadElem::root_of_unity(self.order).pow(e as u32)
    }

    /// The square chi^2.
    pub fn squared(&self) -> Self {
        let e2 = self.exponent * 2 % self.order;
        let ord = if e2 == 0 { 1 } else { self.order / gcd_u64(e2, self.order) };
        Self::new(self.modulus, ord, e2 % ord).expect("square of valid character")
    }
}

/// Standalone evaluation form of `DirichletChar::value`.
pub fn char_value(chi: &DirichletChar, n: i64) -> QuadElem {
    chi.value(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The order-3 character mod 7 with psi(3) = omega^2.
    fn psi() -> DirichletChar {
        // 3 is the smallest primitive root mod 7, so exponent 2 does it.
        DirichletChar::new(7, 3, 2).unwrap()
    }

    #[test]
    fn identity_value() {
        assert_eq!(psi().value(1), QuadElem::one());
    }

    #[test]
    fn psi_of_two_is_omega() {
        // 2 = 3^2 mod 7, so psi(2) = omega^4 = omega.
        let w = QuadElem::omega();
        assert_eq!(psi().value(3), w.pow(2));
        assert_eq!(psi().value(2), w);
    }

    #[test]
    fn psi_of_six_is_one() {
        // 6 = 3^3 mod 7, omega^6 = 1.
        assert_eq!(psi().value(6), QuadElem::one());
    }

    #[test]
    fn vanishes_off_units() {
        assert!(psi().value(0).is_zero());
        assert!(psi().value(7).is_zero());
        assert!(psi().value(14).is_zero());
    }

    #[test]
    fn completely_multiplicative() {
        let chi = psi();
        for a in -10i64..10 {
            for b in -10i64..10 {
                let lhs = chi.value(a * b);
                let rhs = &chi.value(a) * &chi.value(b);
                assert_eq!(lhs, rhs, "a={} b={}", a, b);
            }
        }
    }

    #[test]
    fn order_four_character() {
        let chi = DirichletChar::new(5, 4, 1).unwrap();
        // 2 is the smallest primitive root mod 5
        assert_eq!(chi.value(2), QuadElem::gaussian_i());
        assert_eq!(chi.value(4), QuadElem::from_int(-1));
    }

    #[test]
    fn squared_character() {
        let chi = psi();
        let chi2 = chi.squared();
        for n in 1..7i64 {
            assert_eq!(chi2.value(n), chi.value(n).pow(2));
        }
        let quad = DirichletChar::new(7, 2, 1).unwrap();
        assert!(quad.squared().is_trivial());
    }

    #[test]
    fn bad_constructions_rejected() {
        assert!(DirichletChar::new(8, 2, 1).is_err());
        assert!(DirichletChar::new(7, 5, 1).is_err());
        assert!(DirichletChar::new(7, 4, 1).is_err()); // 4 does not divide 6
    }
}
