//! The two-sided check: published Hecke traces at levels 128, 160, 205
//! against the surface parameters a = 2, 1, 1/16.
//!
//!   cargo run --release --example table_verification
//!
//! On the modular side the minimal polynomial of each trace must divide the
//! characteristic polynomial of E_p; on the Galois side the trace must be
//! accepted by the twisted-count fit. Expect a few minutes of counting.

use gl3atlas::arith::QuadElem;
use gl3atlas::cli::fixtures::builtin_fixtures;
use gl3atlas::counting::{frobenius_fit, FitMode, FitOptions, SurfaceParams};
use gl3atlas::hecke::{eigenvalue_check, shared_hecke, Convention, HeckeKind};

fn main() {
    for (level, a) in [(128u32, (2i64, 1i64)), (160, (1, 1)), (205, (1, 16))] {
        let table = builtin_fixtures().into_iter().find(|t| t.level == level).unwrap();
        let s = SurfaceParams::from_pair(a.0, a.1);
        println!("level {} vs a = {}/{}:", level, a.0, a.1);
        for p in table.good_primes_upto(13) {
            let (re, im) = table.trace(p).unwrap();
            let m = QuadElem::gaussian(re, im).min_poly().unwrap();
            let e = shared_hecke(level, p, HeckeKind::E, Convention::Standard).unwrap();
            let mult = eigenvalue_check(&e, &m).unwrap();
            let galois = if p == 2 || s.reduce_mod(p).is_err() {
                "skipped".to_string()
            } else {
                let opts = FitOptions { rmax: if p <= 13 { 3 } else { 2 }, ..Default::default() };
                match frobenius_fit(&s, p, FitMode::Verify, Some((re, im)), &opts) {
                    Ok(_) => "accepted".into(),
                    Err(e) => format!("REJECTED ({})", e),
                }
            };
            println!(
                "  p={:<3} a_p = ({:>4},{:>4})   modular multiplicity {}   trace fit {}",
                p, re, im, mult, galois
            );
        }
    }
}
