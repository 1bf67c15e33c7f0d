//! Exact computations connecting two sides of a correspondence: Hecke
//! eigenvalues on the homology of congruence subgroups of SL(3,Z), and
//! Frobenius traces reconstructed from point counts on a one-parameter
//! family of double-cover surfaces. Local L-factors built from the two
//! sides are compared coefficient by coefficient.
//!
//! Everything except the numerical Weil root check runs in exact
//! arithmetic. See the examples directory for runnable entry points into
//! each capability, and the `cli` module for the command-line driver.

pub mod arith;
pub mod cli;
pub mod counting;
pub mod hecke;
pub mod hodge;
pub mod homology;
pub mod lfactors;
pub mod mat3;
pub mod projspace;

use std::sync::atomic::{AtomicUsize, Ordering};

static MAX_THREADS: AtomicUsize = AtomicUsize::new(0);

/// Cap the worker count used by the parallel sections (0 = automatic).
/// Results are bit-identical for every setting; this only trades wall time.
pub fn set_max_threads(n: usize) {
    MAX_THREADS.store(n, Ordering::Relaxed);
}

pub(crate) fn worker_count(jobs: usize) -> usize {
    let cap = MAX_THREADS.load(Ordering::Relaxed);
    let auto = std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1);
    let n = if cap == 0 { auto } else { cap.min(auto) };
    n.clamp(1, jobs.max(1)).min(8)
}
