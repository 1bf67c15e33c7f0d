//! The full eigenvalue census of E_2 at level 245: the 83-dimensional space
//! splits into 25 rational classes, congruence blocks over Q(sqrt(2)),
//! Q(sqrt(17)) and Q(sqrt(-3)), and one quartic-field block.
//!
//!   cargo run --release --example level_245_spectrum
//!
//! Expect roughly a minute: the level-245 solve dominates.

use gl3atlas::hecke::{charpoly, shared_hecke, spectrum, spectrum_fields, Convention, HeckeKind};
use gl3atlas::lfactors::v5_sextic;

fn main() {
    let e2 = shared_hecke(245, 2, HeckeKind::E, Convention::Standard).unwrap();
    let rep = spectrum_fields(&e2).unwrap();
    println!("E_2 at level 245, dimension {}:", e2.dim());
    println!("  rational eigenvalues (with multiplicity): {}", rep.rational_count());
    for (v, m) in rep.rational_eigenvalues() {
        println!("    {} (x{})", v, m);
    }
    for (f, m) in &rep.factors {
        if f.degree() == Some(2) {
            let d = spectrum::quadratic_field(f).unwrap();
            println!("  ({})^{}  over Q(sqrt({}))", f, m, d);
        } else if f.degree() == Some(4) {
            println!("  ({})^{}  quartic field block", f, m);
        }
    }
    println!("  unresolved degree: {}", rep.unresolved_degree);

    let e3 = shared_hecke(245, 3, HeckeKind::E, Convention::Standard).unwrap();
    let sextic = v5_sextic(3).unwrap();
    println!(
        "\nsix-value sextic {} divides charpoly(E_3): {}",
        sextic,
        charpoly(&e3).divisible_by(&sextic)
    );
}
