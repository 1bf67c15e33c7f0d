//! First-order deformations of the rank-6 weight-2 polarized Hodge frame:
//! polarization-preserving deformations are the block matrices N(A), and
//! integrability cuts them down to symplectically isotropic planes.
//!
//!   cargo run --example hodge_deformations

use gl3atlas::hodge::{
    from_entries, griffiths_commute, make_n, polarization_preserved, run_identity_suite,
    symplectic_e,
};

fn main() {
    let a = from_entries([[(1, 0), (0, 1)], [(0, 0), (2, -1)]]);
    let b = from_entries([[(0, 0), (1, 0)], [(0, 0), (0, 0)]]);
    println!("polarization preserved by N(A): {}", polarization_preserved(&make_n(&a)));
    println!("E(A, B) = {}", symplectic_e(&a, &b));
    println!("N(A), N(B) commute: {}", griffiths_commute(&a, &b));

    match run_identity_suite(1000, 20240917) {
        Ok(n) => println!("identity suite: {} exact samples, all equivalences hold", n),
        Err(e) => println!("identity suite FAILED: {}", e),
    }
}
