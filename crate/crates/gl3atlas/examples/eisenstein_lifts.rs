//! Weight-2 forms lifted into the degree-3 homology: the two lifts of a
//! trace a_p have eigenvalues p a_p + 1 and a_p + p^2, and oldforms repeat
//! at multiple levels.
//!
//!   cargo run --release --example eisenstein_lifts
//!
//! The configured curves of conductors 35 and 49 feed the lift values; the
//! level-245 space picks up the level-35 classes three times each and the
//! weight-2 Eisenstein value 1 + p + p^2 seven times.

use gl3atlas::arith::IntPolynomial;
use gl3atlas::cli::fixtures::builtin_curves;
use gl3atlas::counting::ec_ap;
use gl3atlas::hecke::{charpoly, shared_hecke, Convention, HeckeKind};
use gl3atlas::lfactors::eisenstein_lift;

fn main() {
    let curves = builtin_curves();
    for (label, level) in [("35a", 35u32), ("49a", 49)] {
        let curve = curves.iter().find(|c| c.label == label).unwrap();
        println!("curve {} inside level {}:", label, level);
        for p in [3u64, 11, 13] {
            if level as u64 % p == 0 {
                continue;
            }
            let ap = ec_ap(curve, p).unwrap();
            let e = shared_hecke(level, p, HeckeKind::E, Convention::Standard).unwrap();
            let cp = charpoly(&e);
            let l1 = eisenstein_lift(ap, p, 1);
            let l2 = eisenstein_lift(ap, p, 2);
            println!(
                "  p={:<3} a_p={:<3} lifts {} (mult {}), {} (mult {})",
                p,
                ap,
                l1,
                cp.multiplicity_of(&IntPolynomial::linear(l1)),
                l2,
                cp.multiplicity_of(&IntPolynomial::linear(l2)),
            );
        }
    }

    println!("\noldform multiplicities at level 245:");
    let c35 = curves.iter().find(|c| c.label == "35a").unwrap();
    for p in [3u64, 11, 13] {
        let e = shared_hecke(245, p, HeckeKind::E, Convention::Standard).unwrap();
        let cp = charpoly(&e);
        let eis = (1 + p + p * p) as i64;
        let ap = ec_ap(c35, p).unwrap();
        println!(
            "  p={:<3} 1+p+p^2={} (mult {})   35a lifts {} (mult {}), {} (mult {})",
            p,
            eis,
            cp.multiplicity_of(&IntPolynomial::linear(eis)),
            eisenstein_lift(ap, p, 1),
            cp.multiplicity_of(&IntPolynomial::linear(eisenstein_lift(ap, p, 1))),
            eisenstein_lift(ap, p, 2),
            cp.multiplicity_of(&IntPolynomial::linear(eisenstein_lift(ap, p, 2))),
        );
    }
}
