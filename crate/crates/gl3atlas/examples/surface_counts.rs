//! Twisted fixed-point counts on the double-cover surface family and the
//! trace reconstruction they support.
//!
//!   cargo run --release --example surface_counts
//!
//! For a = 2 and p = 3 the table lists the number of affine points fixed by
//! phi^k composed with the q-power Frobenius (q = 3, 9, 27), then scans the
//! Weil disc for Gaussian-integer traces consistent with those counts.

use gl3atlas::counting::{frobenius_fit, twisted_count, FitMode, FitOptions, SurfaceParams};

fn main() {
    let s = SurfaceParams::from_pair(2, 1);
    let p = 3u64;
    println!("counts for a = 2, p = {}:", p);
    println!("{:>4} {:>4} {:>8}", "r", "k", "count");
    for r in 1..=3u32 {
        for k in 0..4u32 {
            let rec = twisted_count(&s, p, r, k).unwrap();
            println!("{:>4} {:>4} {:>8}", r, k, rec.count);
        }
    }

    let opts = FitOptions { rmax: 3, ..Default::default() };
    let set = frobenius_fit(&s, p, FitMode::Extract, None, &opts).unwrap();
    println!(
        "\nconsistent traces in the Weil disc |a| <= {}: {} candidates in {} unit orbits",
        3 * p,
        set.candidates.len(),
        set.orbit_count()
    );
    let verified = frobenius_fit(&s, p, FitMode::Verify, Some((1, 2)), &opts).unwrap();
    let d = &verified.diagnostics[0];
    println!(
        "verify 1+2i: accepted with unit ({},{}), odd corrections {:?}",
        d.unit.0, d.unit.1, d.odd
    );
}
