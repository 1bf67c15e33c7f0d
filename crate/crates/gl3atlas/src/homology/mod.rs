//! The homology space H = H_3(Gamma_0(N), Q) as the solution space of a
//! linear system on functions P^2(Z/N) -> Q.
//!
//! A function f lies in H exactly when, for every point (x:y:z),
//!
//!   (1)  f(x:y:z) = -f(-y:x:z)
//!   (2)  f(x:y:z) =  f(z:x:y)
//!   (3)  f(x:y:z) + f(-y:x-y:z) + f(y-x:-x:z) = 0
//!
//! Relations (1) and (2) come from integer matrices of order 4 and 3; the two
//! displayed terms of (3) are B and B^2 for the order-3 matrix
//! B = [[0,-1,0],[1,-1,0],[0,0,1]], which forces the third slot of the last
//! term to be z. The variant with y in that slot (`RelationVariant::YSlot`)
//! does not even define a self-map of the plane and is kept only as the
//! negative control.
//!
//! The solver first collapses relations (1)-(2) into signed orbits, then
//! eliminates the relation-(3) rows modulo independent word-size primes,
//! reconstructs a rational echelon basis, and certifies it exactly: every
//! returned vector is verified against the integer relation rows, and the
//! dimension is pinned by combining that lower bound with the modular rank
//! upper bound.

mod solve;

pub use solve::naive_nullity_mod_p;

use crate::arith::BigRat;
use crate::mat3::Mat3;
use crate::projspace::{PointIndex, PointTable, ProjError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Order-4 matrix realizing (x,y,z) -> (-y, x, z).
pub const REL1_MAT: Mat3 = Mat3 { m: [[0, -1, 0], [1, 0, 0], [0, 0, 1]] };
/// Order-3 matrix realizing (x,y,z) -> (z, x, y).
pub const REL2_MAT: Mat3 = Mat3 { m: [[0, 0, 1], [1, 0, 0], [0, 1, 0]] };
/// Order-3 matrix realizing (x,y,z) -> (-y, x-y, z).
pub const REL3_MAT: Mat3 = Mat3 { m: [[0, -1, 0], [1, -1, 0], [0, 0, 1]] };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationVariant {
    /// Third slot of the last term of relation (3) is z; the consistent
    /// group action, used everywhere.
    ZSlot,
    /// Third slot y. Not a group action; building the system fails on any
    /// point with gcd(x, y, N) > 1. Negative control only.
    YSlot,
}

#[derive(Debug)]
pub enum HomologyError {
    Variant(ProjError),
    LevelMismatch { expected: u32, got: u32 },
    Unsolvable(String),
}

impl std::fmt::Display for HomologyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HomologyError::Variant(e) => write!(f, "relation system not well defined: {}", e),
            HomologyError::LevelMismatch { expected, got } => {
                write!(f, "level mismatch: expected {}, got {}", expected, got)
            }
            HomologyError::Unsolvable(s) => write!(f, "kernel computation failed: {}", s),
        }
    }
}

impl std::error::Error for HomologyError {}

/// The raw constraint rows over point indices, three families per point,
/// coefficients merged per point.
pub struct RelationSystem {
    table: Arc<PointTable>,
    variant: RelationVariant,
    rows: Vec<Vec<(PointIndex, i64)>>,
}

impl RelationSystem {
    pub fn level(&self) -> u32 {
        self.table.level()
    }

    pub fn table(&self) -> &Arc<PointTable> {
        &self.table
    }

    /// Number of rows before any deduplication: 3 * |P^2(Z/N)|.
    pub fn raw_row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(PointIndex, i64)>] {
        &self.rows
    }

    pub fn variant(&self) -> RelationVariant {
        self.variant
    }
}

/// Build the relation system for level N with the standard (z-slot) variant.
pub fn relation_system(n: u32) -> RelationSystem {
    relation_system_with_variant(shared_table(n), RelationVariant::ZSlot)
        .expect("z-slot relation system is always well defined")
}

pub fn relation_system_with_variant(
    table: Arc<PointTable>,
    variant: RelationVariant,
) -> Result<RelationSystem, HomologyError> {
    let b2 = REL3_MAT * REL3_MAT;
    let npts = table.len() as u32;
    let mut rows = Vec::with_capacity(3 * npts as usize);
    for i in 0..npts {
        let a_img = table.act_unchecked(&REL1_MAT, i).expect("unit determinant");
        rows.push(merge_terms(vec![(i, 1), (a_img, 1)]));
        let c_img = table.act_unchecked(&REL2_MAT, i).expect("unit determinant");
        rows.push(merge_terms(vec![(i, 1), (c_img, -1)]));
        let b_img = table.act_unchecked(&REL3_MAT, i).expect("unit determinant");
        let last = match variant {
            RelationVariant::ZSlot => table.act_unchecked(&b2, i).expect("unit determinant"),
            RelationVariant::YSlot => {
                let p = table.point(i);
                let (x, y) = (p.x as i64, p.y as i64);
                table
                    .index_of([y - x, -x, y])
                    .map_err(HomologyError::Variant)?
            }
        };
        rows.push(merge_terms(vec![(i, 1), (b_img, 1), (last, 1)]));
    }
    Ok(RelationSystem { table, variant, rows })
}

fn merge_terms(mut terms: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

/// Signed orbit structure of the group generated by relations (1) and (2);
/// shared by the solver and by Hecke evaluation.
pub struct OrbitData {
    /// point -> orbit id (orbits numbered by increasing minimal point).
    pub orbit_of: Vec<u32>,
    /// point -> sign relative to the value at the orbit's minimal point.
    pub sign_of: Vec<i8>,
    /// orbit id -> minimal point index.
    pub orbit_min: Vec<u32>,
    /// orbit id -> the orbit is forced to carry the value zero.
    pub forced_zero: Vec<bool>,
}

impl OrbitData {
    pub fn n_orbits(&self) -> usize {
        self.orbit_min.len()
    }
}

/// Shared per-level context: the point table, the signed orbits, and the
/// deduplicated relation-(3) rows in orbit coordinates.
pub struct HomologyCtx {
    pub table: Arc<PointTable>,
    pub orbits: OrbitData,
    /// Deduplicated relation rows over orbit ids, integer coefficients;
    /// includes the collapsed remnants of every relation family.
    pub orbit_rows: Vec<Vec<(u32, i64)>>,
}

impl HomologyCtx {
    pub fn level(&self) -> u32 {
        self.table.level()
    }
}

/// A class in H: values determined by an integer vector over orbit minima.
/// `value(point) = sign(point) * g[orbit(point)] / denom`; basis vectors are
/// stored primitive with denom 1.
#[derive(Clone)]
pub struct CohomClass {
    ctx: Arc<HomologyCtx>,
    backing: Backing,
}

#[derive(Clone)]
enum Backing {
    /// Consistent with relations (1)-(2) by construction.
    Orbit { g: Vec<BigInt>, denom: BigInt },
    /// Arbitrary sparse function on points, for membership testing.
    Points(HashMap<PointIndex, BigRat>),
}

impl CohomClass {
    pub fn level(&self) -> u32 {
        self.ctx.level()
    }

    pub fn ctx(&self) -> &Arc<HomologyCtx> {
        &self.ctx
    }

    /// Arbitrary function on points (need not satisfy any relation).
    pub fn from_point_values(ctx: Arc<HomologyCtx>, vals: Vec<(PointIndex, BigRat)>) -> Self {
        CohomClass { ctx, backing: Backing::Points(vals.into_iter().collect()) }
    }

    pub fn zero(ctx: Arc<HomologyCtx>) -> Self {
        let n = ctx.orbits.n_orbits();
        CohomClass {
            ctx,
            backing: Backing::Orbit { g: vec![BigInt::zero(); n], denom: BigInt::from(1) },
        }
    }

    pub fn value(&self, i: PointIndex) -> BigRat {
        match &self.backing {
            Backing::Orbit { g, denom } => {
                let orb = self.ctx.orbits.orbit_of[i as usize] as usize;
                let s = self.ctx.orbits.sign_of[i as usize];
                let num = if s >= 0 { g[orb].clone() } else { -g[orb].clone() };
                BigRational::new(num, denom.clone())
            }
            Backing::Points(map) => map.get(&i).cloned().unwrap_or_else(BigRat::zero),
        }
    }

    /// Fast integer numerator at a point (orbit-backed classes only).
    pub fn int_value(&self, i: PointIndex) -> Option<BigInt> {
        match &self.backing {
            Backing::Orbit { g, .. } => {
                let orb = self.ctx.orbits.orbit_of[i as usize] as usize;
                let s = self.ctx.orbits.sign_of[i as usize];
                Some(if s >= 0 { g[orb].clone() } else { -g[orb].clone() })
            }
            Backing::Points(_) => None,
        }
    }

    /// Sparse view over point indices, materialized on demand.
    pub fn entries(&self) -> Vec<(PointIndex, BigRat)> {
        let mut out = Vec::new();
        for i in 0..self.ctx.table.len() as u32 {
            let v = self.value(i);
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        out
    }

    pub fn is_zero_class(&self) -> bool {
        match &self.backing {
            Backing::Orbit { g, .. } => g.iter().all(|v| v.is_zero()),
            Backing::Points(map) => map.values().all(|v| v.is_zero()),
        }
    }
}

/// Exact membership test: all three relation families at every point.
pub fn is_in_space(f: &CohomClass) -> bool {
    let table = &f.ctx.table;
    let b2 = REL3_MAT * REL3_MAT;
    for i in 0..table.len() as u32 {
        let v = f.value(i);
        let a_img = table.act_unchecked(&REL1_MAT, i).unwrap();
        if !( &v + f.value(a_img)).is_zero() {
            return false;
        }
        let c_img = table.act_unchecked(&REL2_MAT, i).unwrap();
        if v != f.value(c_img) {
            return false;
        }
        let b_img = table.act_unchecked(&REL3_MAT, i).unwrap();
        let b2_img = table.act_unchecked(&b2, i).unwrap();
        if !(&v + f.value(b_img) + f.value(b2_img)).is_zero() {
            return false;
        }
    }
    true
}

/// An exact echelonized basis of H, in the coordinates described on
/// `CohomClass`. Basis vectors are primitive integer vectors, pivots are the
/// first points (in lexicographic order) where each vector is nonzero, and
/// the pivot entries are positive.
pub struct Basis {
    pub ctx: Arc<HomologyCtx>,
    /// dim x n_orbits integer matrix, one row per basis vector.
    pub g_rows: Vec<Vec<BigInt>>,
    /// pivot orbit of each vector, strictly increasing.
    pub pivot_orbits: Vec<u32>,
    /// the minimal point of each pivot orbit.
    pub pivot_points: Vec<u32>,
    /// value of vector i at its own pivot point (positive).
    pub pivot_scale: Vec<BigInt>,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.g_rows.len()
    }

    pub fn level(&self) -> u32 {
        self.ctx.level()
    }

    pub fn class(&self, i: usize) -> CohomClass {
        CohomClass {
            ctx: Arc::clone(&self.ctx),
            backing: Backing::Orbit { g: self.g_rows[i].clone(), denom: BigInt::from(1) },
        }
    }

    /// Numerator of vector `i` at a point (denominator is 1).
    pub fn value_at(&self, i: usize, pt: PointIndex) -> BigInt {
        let orb = self.ctx.orbits.orbit_of[pt as usize] as usize;
        let s = self.ctx.orbits.sign_of[pt as usize];
        if s >= 0 {
            self.g_rows[i][orb].clone()
        } else {
            -self.g_rows[i][orb].clone()
        }
    }
}

/// Compute an exact basis of the kernel. See module docs for the pipeline;
/// the result is certified, not heuristic.
pub fn kernel_basis(sys: &RelationSystem) -> Result<Arc<Basis>, HomologyError> {
    solve::kernel_basis_impl(sys)
}

/// Dimension of H at level N (convenience wrapper over the shared cache).
pub fn dimension(n: u32) -> usize {
    shared_basis(n).dim()
}

static TABLE_CACHE: OnceLock<Mutex<HashMap<u32, Arc<PointTable>>>> = OnceLock::new();
static BASIS_CACHE: OnceLock<Mutex<HashMap<u32, Arc<Basis>>>> = OnceLock::new();

/// Per-process shared point table for a level.
pub fn shared_table(n: u32) -> Arc<PointTable> {
    let cache = TABLE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return Arc::clone(t);
    }
    let t = Arc::new(PointTable::new(n));
    cache.lock().unwrap().entry(n).or_insert_with(|| Arc::clone(&t));
    t
}

/// Per-process shared basis for a level; computed once.
pub fn shared_basis(n: u32) -> Arc<Basis> {
    let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&n) {
        return Arc::clone(b);
    }
    let sys = relation_system(n);
    let b = kernel_basis(&sys).expect("kernel solver");
    cache.lock().unwrap().entry(n).or_insert_with(|| Arc::clone(&b));
    b
}

/// Install an externally loaded basis (e.g. from the CLI cache) into the
/// shared registry. Rejects level mismatches silently overwriting nothing.
pub fn install_shared_basis(b: Arc<Basis>) {
    let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache.lock().unwrap().entry(b.level()).or_insert(b);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use num_traits::Signed;

    #[test]
    fn raw_row_counts() {
        for n in [1u32, 2, 7, 12] {
            let sys = relation_system(n);
            assert_eq!(sys.raw_row_count(), 3 * sys.table().len());
        }
        // N=1: the single binding row is f + f = 0 from relation (1)
        let sys = relation_system(1);
        assert!(sys.rows().iter().any(|r| r == &vec![(0u32, 2i64)]));
    }

    #[test]
    fn relation_matrices_have_stated_orders() {
        let a4 = REL1_MAT * REL1_MAT * REL1_MAT * REL1_MAT;
        assert_eq!(a4, Mat3::IDENTITY);
        let c3 = REL2_MAT * REL2_MAT * REL2_MAT;
        assert_eq!(c3, Mat3::IDENTITY);
        let b3 = REL3_MAT * REL3_MAT * REL3_MAT;
        assert_eq!(b3, Mat3::IDENTITY);
        assert_eq!(REL1_MAT.det(), 1);
        assert_eq!(REL2_MAT.det(), 1);
        assert_eq!(REL3_MAT.det(), 1);
    }

    #[test]
    fn dimension_n1_is_zero() {
        assert_eq!(dimension(1), 0);
    }

    #[test]
    fn yslot_variant_is_not_well_defined() {
        // (0:0:1) maps to (0,0,0) under the printed third term; larger N with
        // square factors fail on more points.
        for n in [2u32, 6, 12] {
            let res = relation_system_with_variant(shared_table(n), RelationVariant::YSlot);
            assert!(res.is_err(), "N={}", n);
        }
    }

    #[test]
    fn basis_vectors_are_in_space_small_levels() {
        for n in [2u32, 3, 5, 7, 11] {
            let basis = shared_basis(n);
            for i in 0..basis.dim() {
                let f = basis.class(i);
                assert!(is_in_space(&f), "N={} vector {}", n, i);
                assert!(!f.is_zero_class());
            }
            let zero = CohomClass::zero(Arc::clone(&basis.ctx));
            assert!(is_in_space(&zero));
        }
    }

    #[test]
    fn delta_function_not_in_space() {
        let basis = shared_basis(7);
        let delta = CohomClass::from_point_values(
            Arc::clone(&basis.ctx),
            vec![(0, rat_int(1))],
        );
        assert!(!is_in_space(&delta));
    }

    #[test]
    fn production_dimension_matches_naive_oracle_small() {
        for n in 1..=14u32 {
            let sys = relation_system(n);
            let dim = kernel_basis(&sys).unwrap().dim();
            for p in [crate::arith::reconstruct::SOLVE_PRIMES[5], crate::arith::reconstruct::SOLVE_PRIMES[6]] {
                assert_eq!(naive_nullity_mod_p(&sys, p), dim, "N={} p={}", n, p);
            }
        }
    }

    #[test]
    fn echelon_structure() {
        let basis = shared_basis(11);
        assert!(basis.dim() > 0, "level 11 should be nontrivial");
        for i in 0..basis.dim() {
            // pivot entries positive, earlier pivots vanish on later vectors
            assert!(basis.pivot_scale[i].is_positive());
            for j in 0..basis.dim() {
                if i != j {
                    assert!(basis.g_rows[j][basis.pivot_orbits[i] as usize].is_zero());
                }
            }
        }
        let mut prev = None;
        for &p in &basis.pivot_orbits {
            if let Some(q) = prev {
                assert!(p > q);
            }
            prev = Some(p);
        }
    }
}
