//! The level-49 eigenvalue block over Q(sqrt(-3)) and the relation between
//! the two Hecke operators on it.
//!
//!   cargo run --release --example hecke_eigenvalues
//!
//! E_2 acts on a 6-dimensional invariant subspace with three conjugate
//! pairs of eigenvalues; at p = 3 the eigenvalues are the six values of
//! chi(3)(psi(3) + 3 + 9 psi(3)^2) over character pairs mod 7 with psi
//! nontrivial. On the block where chi is trivial the operators E_3 and D_3
//! agree exactly (b_3 = a_3 differs from its conjugate, which rules out a
//! unitary, hence cuspidal, origin for these classes).

use gl3atlas::arith::IntPolynomial;
use gl3atlas::hecke::{dp_relation, eigenvalue_check, shared_hecke, spectrum_fields, Convention, HeckeKind};
use gl3atlas::homology::shared_basis;
use gl3atlas::lfactors::v5_orbit;

fn main() {
    let conv = Convention::Standard;
    let e2 = shared_hecke(49, 2, HeckeKind::E, conv).unwrap();
    println!("E_2 at level 49 (dimension {}):", e2.dim());
    let rep = spectrum_fields(&e2).unwrap();
    for (f, m) in &rep.factors {
        println!("  ({})^{}", f, m);
    }

    println!("\nthe six-value orbit at p = 3:");
    for v in v5_orbit(3).unwrap() {
        println!("  {}", v);
    }

    let e3 = shared_hecke(49, 3, HeckeKind::E, conv).unwrap();
    let m_a3 = IntPolynomial::from_i64(&[52, 10, 1]);
    println!(
        "\nX^2+10X+52 divides charpoly(E_3) with multiplicity {}",
        eigenvalue_check(&e3, &m_a3).unwrap()
    );

    shared_hecke(49, 3, HeckeKind::D, conv).unwrap();
    let basis = shared_basis(49);
    for (label, coeffs) in [("X^2+10X+52", [52i64, 10, 1]), ("X^2-14X+52", [52, -14, 1]), ("X^2+4X+52", [52, 4, 1])] {
        let m = IntPolynomial::from_i64(&coeffs);
        let class = dp_relation(&basis, 3, &m, conv).unwrap();
        println!("dual relation on the {} block: {}", label, class);
    }
}
