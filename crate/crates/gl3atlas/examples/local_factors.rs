//! Local L-factor algebra on the shipped tables: every good entry gives the
//! degree-3 factor X^3 - a_p X^2 + p conj(a_p) X - p^3, which is fixed by
//! the Tate-twisted duality, selfdual exactly when a_p is real, and has all
//! roots of absolute value p.
//!
//!   cargo run --example local_factors

use gl3atlas::arith::QuadElem;
use gl3atlas::cli::fixtures::builtin_fixtures;
use gl3atlas::lfactors::{dual_cubic, gl3_local, is_selfdual, sym2_local, weil_check};

fn main() {
    for table in builtin_fixtures() {
        println!("level {}:", table.level);
        for (&p, &(re, im)) in &table.ap {
            let l = gl3_local(QuadElem::gaussian(re, im), p);
            println!(
                "  p={:<4} {}  selfdual={} dual-fixed={} weil(1e-9)={}",
                p,
                l,
                is_selfdual(&l),
                dual_cubic(&l) == l,
                weil_check(&l, 1e-9)
            );
        }
    }

    println!("\nsymmetric squares of weight-2 traces at p = 7:");
    for a in -5i64..=5 {
        let l = sym2_local(a, 7).unwrap();
        println!("  a={:<3} {}  weil={}", a, l, weil_check(&l, 1e-9));
    }
}
