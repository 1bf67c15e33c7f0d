//! Hecke operators on H via modular symbols.
//!
//! A modular symbol is (the class of) a nonsingular 3x3 integer matrix whose
//! columns span a cone; unimodular symbols evaluate against f in H at the
//! class of their first column. A non-unimodular symbol [v1,v2,v3] is
//! rewritten through the subdivision identity
//!
//!   [v1,v2,v3] = [w,v2,v3] + [v1,w,v3] + [v1,v2,w]
//!
//! for a vector w with M^{-1}w strictly inside the unit box; determinants
//! strictly decrease (Cramer), so recursion terminates at unimodular or
//! degenerate children.
//!
//! The operator E_p (attached to diag(p,1,1)) acts by
//! (T f)(q) = sum_B f(reduce(lift(q) * B)) over the p^2+p+1 Hermite coset
//! representatives of determinant p; D_p (attached to diag(p,p,1)) uses the
//! complementary list of determinant p^2. The matrix of T on a basis of H is
//! recovered from evaluations at the pivot points of the echelonized basis;
//! membership of the image in H is checked by sampled exact evaluation.
//!
//! The evaluation side/transpose convention is not canonical; both variants
//! are implemented (`Convention`) and the crate default is pinned by the
//! discriminating eigenvalue tests in the acceptance suite.

pub mod charpoly;
pub mod lll;
pub mod ratmat;
pub mod spectrum;

pub use charpoly::{charpoly, charpoly_exact_dense};
pub use spectrum::{spectrum_fields, SpectrumReport};

use crate::arith::{is_prime, BigRat, IntPolynomial};
use crate::homology::Basis;
use crate::mat3::Mat3;
use crate::projspace::{lift_to_sl3, PointIndex, PointTable};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeckeKind {
    /// diag(p,1,1): eigenvalue a_p.
    E,
    /// diag(p,p,1): eigenvalue b_p.
    D,
}

impl HeckeKind {
    pub fn tag(&self) -> &'static str {
        match self {
            HeckeKind::E => "E",
            HeckeKind::D => "D",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// Evaluate at the first column, compose by right multiplication.
    #[default]
    Standard,
    /// Transposed coset representatives, evaluation on (g^{-1})^t.
    Transposed,
}

impl Convention {
    pub fn tag(&self) -> &'static str {
        match self {
            Convention::Standard => "std",
            Convention::Transposed => "tr",
        }
    }
}

#[derive(Debug)]
pub enum HeckeError {
    CompositePrime(u64),
    /// p divides the level.
    BadPrime { p: u64, level: u32 },
    SingularSymbol,
    /// The bounded reducing-vector search failed (must not occur).
    ReducingVectorSearch(Mat3),
    /// T f landed outside H: wrong convention.
    ConventionError { level: u32, p: u64 },
    /// dp_relation kernel has dimension other than 2.
    AmbiguousKernel { dim: usize },
    NonMonic,
    Unsolvable(String),
}

impl std::fmt::Display for HeckeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeckeError::CompositePrime(p) => write!(f, "{} is not prime", p),
            HeckeError::BadPrime { p, level } => {
                write!(f, "prime {} divides the level {}", p, level)
            }
            HeckeError::SingularSymbol => write!(f, "modular symbol has determinant zero"),
            HeckeError::ReducingVectorSearch(m) => {
                write!(f, "reducing-vector search exhausted at {:?}", m)
            }
            HeckeError::ConventionError { level, p } => {
                write!(f, "operator image left H at level {}, p={}: wrong convention", level, p)
            }
            HeckeError::AmbiguousKernel { dim } => {
                write!(f, "minimal-polynomial kernel has dimension {} (expected 2)", dim)
            }
            HeckeError::NonMonic => write!(f, "polynomial must be monic"),
            HeckeError::Unsolvable(s) => write!(f, "{}", s),
        }
    }
}

impl std::error::Error for HeckeError {}

/// A modular symbol: nonsingular integer matrix, unimodular iff |det| = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModularSymbol(pub Mat3);

/// Signed integer combination of plane points produced by symbol reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSum {
    /// sorted by point index, coefficients nonzero
    pub terms: Vec<(PointIndex, i64)>,
}

impl SymbolSum {
    fn from_map(map: HashMap<PointIndex, i64>) -> Self {
        let mut terms: Vec<(PointIndex, i64)> =
            map.into_iter().filter(|&(_, c)| c != 0).collect();
        terms.sort_unstable_by_key(|t| t.0);
        SymbolSum { terms }
    }

    /// Signed sum of f over the terms (f given as numerators on points).
    pub fn pair_with<F: Fn(PointIndex) -> BigInt>(&self, f: F) -> BigInt {
        let mut acc = BigInt::zero();
        for &(pt, c) in &self.terms {
            acc += f(pt) * BigInt::from(c);
        }
        acc
    }
}

/// Hermite-form coset representatives: p^2+p+1 matrices of determinant p
/// (kind E) or p^2 (kind D).
pub fn coset_reps(p: u64, kind: HeckeKind) -> Result<Vec<Mat3>, HeckeError> {
    if !is_prime(p) {
        return Err(HeckeError::CompositePrime(p));
    }
    let pi = p as i64;
    let mut out = Vec::with_capacity((p * p + p + 1) as usize);
    match kind {
        HeckeKind::E => {
            for a in 0..pi {
                for b in 0..pi {
                    out.push(Mat3::new([[1, 0, a], [0, 1, b], [0, 0, pi]]));
                }
            }
            for a in 0..pi {
                out.push(Mat3::new([[1, a, 0], [0, pi, 0], [0, 0, 1]]));
            }
            out.push(Mat3::diag(pi, 1, 1));
        }
        HeckeKind::D => {
            for a in 0..pi {
                for b in 0..pi {
                    out.push(Mat3::new([[1, a, b], [0, pi, 0], [0, 0, pi]]));
                }
            }
            for b in 0..pi {
                out.push(Mat3::new([[pi, 0, 0], [0, 1, b], [0, 0, pi]]));
            }
            out.push(Mat3::diag(pi, pi, 1));
        }
    }
    Ok(out)
}

/// Internal convention space. The composition side, the evaluation point of
/// a unimodular symbol, and the determinant normalization are each
/// two-valued; the public `Convention` names the two ends that matter, and
/// the harness test at level 11 pins which one is the mathematics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct ConvSpec {
    pub comp: Comp,
    pub base: EvalBase,
    pub fix: DetFix,
}

/// How lift(q) composes with a coset representative B. Only the two ends
/// named by `Convention` are constructed outside the discriminating harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(dead_code)]
pub(crate) enum Comp {
    /// lift(q) * B
    RightB,
    /// B * adj(lift(q)) = B * lift(q)^{-1}
    LeftBAdj,
    /// lift(q) * B^t
    RightBT,
    /// B^t * adj(lift(q))
    LeftBTAdj,
}

/// Where a determinant +1 symbol evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum EvalBase {
    /// class of the first column of u
    Col1,
    /// class of the first column of adj(u) (the first column of u^{-1})
    AdjCol1,
}

/// How a determinant -1 symbol is normalized to determinant +1 before
/// evaluating: right-multiply by R and carry sign(R).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum DetFix {
    /// R swaps columns two and three: alternating, sign -1.
    SwapNegate,
    /// R = diag(-1,1,1): projective column scaling, sign +1.
    ScaleFirst,
}

impl Convention {
    pub(crate) fn spec(self) -> ConvSpec {
        match self {
            // selected by the level-11 discriminating harness (see
            // convention_harness_level_11): evaluation on the inverse lift,
            // left composition by the Hermite representatives
            Convention::Standard => ConvSpec {
                comp: Comp::LeftBAdj,
                base: EvalBase::AdjCol1,
                fix: DetFix::ScaleFirst,
            },
            // the "other side" reading: right composition by transposed
            // representatives, evaluation at the first column, sign by
            // column swap; fails the harness and is kept as the negative
            // control
            Convention::Transposed => ConvSpec {
                comp: Comp::RightBT,
                base: EvalBase::Col1,
                fix: DetFix::SwapNegate,
            },
        }
    }
}

/// Evaluation data of a unimodular symbol: point class and sign.
fn eval_unimodular(m: &Mat3, table: &PointTable, spec: ConvSpec) -> (PointIndex, i64) {
    let d = m.det();
    debug_assert_eq!(d.abs(), 1);
    let (u, sign) = if d == 1 {
        (*m, 1)
    } else {
        match spec.fix {
            DetFix::SwapNegate => (m.swap_columns(1, 2), -1),
            DetFix::ScaleFirst => {
                let mut s = *m;
                for row in 0..3 {
                    s.m[row][0] = -s.m[row][0];
                }
                (s, 1)
            }
        }
    };
    let v = match spec.base {
        EvalBase::Col1 => u.column(0),
        EvalBase::AdjCol1 => u.adjugate().column(0),
    };
    let idx = table.index_of(v).expect("unimodular columns are primitive");
    (idx, sign)
}

/// Reduce a symbol to a signed sum of unimodular evaluation points.
pub fn reduce_symbol(
    m: &Mat3,
    table: &PointTable,
    conv: Convention,
) -> Result<SymbolSum, HeckeError> {
    reduce_symbol_spec(m, table, conv.spec())
}

fn reduce_symbol_spec(
    m: &Mat3,
    table: &PointTable,
    spec: ConvSpec,
) -> Result<SymbolSum, HeckeError> {
    let d = m.det();
    if d == 0 {
        return Err(HeckeError::SingularSymbol);
    }
    let mut acc: HashMap<PointIndex, i64> = HashMap::new();
    let limit = d.unsigned_abs() as usize;
    reduce_rec(m, table, spec, &mut acc, 0, limit)?;
    Ok(SymbolSum::from_map(acc))
}

fn reduce_rec(
    m: &Mat3,
    table: &PointTable,
    spec: ConvSpec,
    acc: &mut HashMap<PointIndex, i64>,
    depth: usize,
    limit: usize,
) -> Result<(), HeckeError> {
    assert!(depth <= limit, "recursion depth exceeded |det| of the root symbol");
    let d = m.det();
    if d.abs() == 1 {
        let (pt, sign) = eval_unimodular(m, table, spec);
        *acc.entry(pt).or_insert(0) += sign;
        return Ok(());
    }
    let w = find_reducing_w(m)?;
    for slot in 0..3 {
        let child = m.with_column(slot, w);
        let cd = child.det();
        if cd == 0 {
            continue;
        }
        assert!(cd.abs() < d.abs(), "determinant must strictly decrease");
        reduce_rec(&child, table, spec, acc, depth + 1, limit)?;
    }
    Ok(())
}

/// Reducing vector: try the unit vectors first (q = column of M^{-1}),
/// then the approximate-but-exactly-validated lattice path, and only then
/// the exact rational lattice reduction.
fn find_reducing_w(m: &Mat3) -> Result<[i64; 3], HeckeError> {
    let d = m.det().abs();
    let adj = m.adjugate();
    'cols: for k in 0..3 {
        for i in 0..3 {
            if adj.m[i][k].abs() >= d {
                continue 'cols;
            }
        }
        // q = M^{-1} e_k has sup norm < 1; w = e_k
        let mut w = [0i64; 3];
        w[k] = 1;
        if adj.column(k) != [0, 0, 0] {
            return Ok(w);
        }
    }
    if let Some(w) = lll::reducing_vector_fast(m) {
        return Ok(w);
    }
    match lll::reducing_vector(m) {
        Some((_, w)) => Ok(w),
        None => Err(HeckeError::ReducingVectorSearch(*m)),
    }
}

/// The matrix of a Hecke operator on the echelonized basis of H:
/// column j holds the coordinates of T f_j.
#[derive(Debug, Clone)]
pub struct HeckeMatrix {
    pub level: u32,
    pub p: u64,
    pub kind: HeckeKind,
    pub convention: Convention,
    /// mat[i][j] with T f_j = sum_i mat[i][j] f_i.
    pub mat: Vec<Vec<BigRat>>,
}

impl HeckeMatrix {
    pub fn dim(&self) -> usize {
        self.mat.len()
    }
}

/// Combined symbol sum over all coset representatives for one point q.
fn operator_sum_at(
    q: PointIndex,
    reps: &[Mat3],
    table: &PointTable,
    spec: ConvSpec,
) -> Result<SymbolSum, HeckeError> {
    let lift = lift_to_sl3(&table.point(q), table.level());
    let adj = lift.adjugate(); // = lift^{-1}, det one
    let mut acc: HashMap<PointIndex, i64> = HashMap::new();
    for b in reps {
        let sym = match spec.comp {
            Comp::RightB => lift * *b,
            Comp::LeftBAdj => *b * adj,
            Comp::RightBT => lift * b.transpose(),
            Comp::LeftBTAdj => b.transpose() * adj,
        };
        let sum = reduce_symbol_spec(&sym, table, spec)?;
        for (pt, c) in sum.terms {
            *acc.entry(pt).or_insert(0) += c;
        }
    }
    Ok(SymbolSum::from_map(acc))
}

pub fn hecke_matrix(
    basis: &Basis,
    p: u64,
    kind: HeckeKind,
    conv: Convention,
) -> Result<HeckeMatrix, HeckeError> {
    let level = basis.level();
    if !is_prime(p) {
        return Err(HeckeError::CompositePrime(p));
    }
    if level as u64 % p == 0 {
        return Err(HeckeError::BadPrime { p, level });
    }
    let reps = coset_reps(p, kind)?;
    let spec = conv.spec();
    let table = &basis.ctx.table;
    let dim = basis.dim();

    // evaluation sums at the pivot points, computed in parallel chunks
    let sums = parallel_sums(&basis.pivot_points, &reps, table, spec)?;

    // coordinates by back-substitution off the pivot structure
    let mut mat = vec![vec![BigRat::zero(); dim]; dim];
    for j in 0..dim {
        for (i, row) in mat.iter_mut().enumerate() {
            let num = sums[i].pair_with(|pt| basis.value_at(j, pt));
            row[j] = BigRational::new(num, basis.pivot_scale[i].clone());
        }
    }

    // well-definedness: T f_j must agree with its basis expansion at sample
    // points away from the pivots
    let samples = sample_points(table, p, 24);
    for q in samples {
        let sum_q = operator_sum_at(q, &reps, table, spec)?;
        for j in 0..dim {
            let direct = BigRational::from_integer(sum_q.pair_with(|pt| basis.value_at(j, pt)));
            let mut via = BigRat::zero();
            for i in 0..dim {
                if !mat[i][j].is_zero() {
                    via += &mat[i][j] * BigRational::from_integer(basis.value_at(i, q));
                }
            }
            if direct != via {
                return Err(HeckeError::ConventionError { level, p });
            }
        }
    }

    Ok(HeckeMatrix { level, p, kind, convention: conv, mat })
}

fn parallel_sums(
    points: &[u32],
    reps: &[Mat3],
    table: &Arc<PointTable>,
    spec: ConvSpec,
) -> Result<Vec<SymbolSum>, HeckeError> {
    let n_workers = crate::worker_count(points.len());
    if n_workers <= 1 || points.len() < 4 {
        return points.iter().map(|&q| operator_sum_at(q, reps, table, spec)).collect();
    }
    let chunk = points.len().div_ceil(n_workers);
    let results: Vec<Result<Vec<SymbolSum>, HeckeError>> = std::thread::scope(|sc| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                sc.spawn(move || {
                    part.iter().map(|&q| operator_sum_at(q, reps, table, spec)).collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("hecke worker")).collect()
    });
    let mut out = Vec::with_capacity(points.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Deterministic sample of points for the membership check.
fn sample_points(table: &PointTable, p: u64, count: usize) -> Vec<PointIndex> {
    let n = table.len() as u64;
    let mut rng = crate::arith::SplitMix64::new(0x6a3f_9e11 ^ (table.level() as u64) << 17 ^ p);
    let mut out: Vec<PointIndex> = Vec::with_capacity(count);
    let mut seen = std::collections::HashSet::new();
    while out.len() < count.min(table.len()) {
        let q = rng.below(n) as PointIndex;
        if seen.insert(q) {
            out.push(q);
        }
    }
    out
}

static HECKE_CACHE: OnceLock<
    Mutex<HashMap<(u32, u64, HeckeKind, Convention), Arc<HeckeMatrix>>>,
> = OnceLock::new();

/// Shared, memoized operator for a level (the basis comes from the shared
/// registry).
pub fn shared_hecke(
    n: u32,
    p: u64,
    kind: HeckeKind,
    conv: Convention,
) -> Result<Arc<HeckeMatrix>, HeckeError> {
    let cache = HECKE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().unwrap().get(&(n, p, kind, conv)) {
        return Ok(Arc::clone(m));
    }
    let basis = crate::homology::shared_basis(n);
    let m = Arc::new(hecke_matrix(&basis, p, kind, conv)?);
    cache.lock().unwrap().entry((n, p, kind, conv)).or_insert_with(|| Arc::clone(&m));
    Ok(m)
}

/// Install an externally computed operator (CLI cache path).
pub fn install_shared_hecke(m: Arc<HeckeMatrix>) {
    let cache = HECKE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache.lock().unwrap().entry((m.level, m.p, m.kind, m.convention)).or_insert(m);
}

/// Largest k with m^k dividing the characteristic polynomial.
pub fn eigenvalue_check(h: &HeckeMatrix, m: &IntPolynomial) -> Result<usize, HeckeError> {
    if !m.is_monic() {
        return Err(HeckeError::NonMonic);
    }
    let f = charpoly(h);
    Ok(f.multiplicity_of(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpClass {
    /// D_p restricted to the block is t*I - E_p: b_p = conj(a_p), the
    /// cuspidal shape.
    Conjugate,
    /// D_p = E_p on the block: b_p = a_p.
    Equal,
    Other,
}

impl std::fmt::Display for DpClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DpClass::Conjugate => write!(f, "conjugate"),
            DpClass::Equal => write!(f, "equal"),
            DpClass::Other => write!(f, "other"),
        }
    }
}

/// Classify the relation between E_p and D_p on the rational kernel of
/// m(E_p), for a monic quadratic m dividing charpoly(E_p). The kernel must
/// be 2-dimensional; otherwise the caller disambiguates with a second prime
/// (see `dp_relation_refined`).
pub fn dp_relation(
    basis: &Basis,
    p: u64,
    m: &IntPolynomial,
    conv: Convention,
) -> Result<DpClass, HeckeError> {
    dp_relation_refined(basis, p, m, &[], conv)
}

/// Same, but intersect the kernel with kernels of m_k(E_{p_k}) for the
/// auxiliary (p_k, m_k) pairs first.
pub fn dp_relation_refined(
    basis: &Basis,
    p: u64,
    m: &IntPolynomial,
    refine: &[(u64, IntPolynomial)],
    conv: Convention,
) -> Result<DpClass, HeckeError> {
    if m.degree() != Some(2) || !m.is_monic() {
        return Err(HeckeError::NonMonic);
    }
    let level = basis.level();
    let e = shared_hecke(level, p, HeckeKind::E, conv)?;
    let d = shared_hecke(level, p, HeckeKind::D, conv)?;

    // stack m(E_p) with the refining blocks and take the joint kernel
    let mut stacked = ratmat::poly_at_matrix(m, &e.mat);
    for (p2, m2) in refine {
        let e2 = shared_hecke(level, *p2, HeckeKind::E, conv)?;
        stacked.extend(ratmat::poly_at_matrix(m2, &e2.mat));
    }
    let kernel = ratmat::rational_kernel(&stacked);
    if kernel.len() != 2 {
        return Err(HeckeError::AmbiguousKernel { dim: kernel.len() });
    }

    // coordinates in the kernel basis: the RREF structure puts a 1 at each
    // vector's free column and 0 at the other's
    let free = find_free_columns(&kernel);

    let restrict = |op: &HeckeMatrix| -> Option<[[BigRat; 2]; 2]> {
        let mut cols: Vec<[BigRat; 2]> = Vec::with_capacity(2);
        for v in &kernel {
            let image = ratmat::mat_vec(&op.mat, v);
            let coords = [image[free[0]].clone(), image[free[1]].clone()];
            // verify the image really lies in the kernel span
            for (idx, val) in image.iter().enumerate() {
                let expect = &coords[0] * &kernel[0][idx] + &coords[1] * &kernel[1][idx];
                if *val != expect {
                    return None;
                }
            }
            cols.push(coords);
        }
        Some([
            [cols[0][0].clone(), cols[1][0].clone()],
            [cols[0][1].clone(), cols[1][1].clone()],
        ])
    };

    let (Some(e_v), Some(d_v)) = (restrict(&e), restrict(&d)) else {
        return Ok(DpClass::Other);
    };

    // t = -(coefficient of X in m)
    let t = BigRational::from_integer(-m.coeff(1));
    let t_minus_e = [
        [&t - &e_v[0][0], -e_v[0][1].clone()],
        [-e_v[1][0].clone(), &t - &e_v[1][1]],
    ];
    if d_v == t_minus_e {
        Ok(DpClass::Conjugate)
    } else if d_v == e_v {
        Ok(DpClass::Equal)
    } else {
        Ok(DpClass::Other)
    }
}

fn find_free_columns(kernel: &[Vec<BigRat>]) -> Vec<usize> {
    use num_traits::One;
    // columns where the kernel basis is the identity
    let mut free = Vec::with_capacity(kernel.len());
    for (i, v) in kernel.iter().enumerate() {
        let col = v
            .iter()
            .enumerate()
            .position(|(c, x)| {
                x.is_one() && kernel.iter().enumerate().all(|(j, w)| j == i || w[c].is_zero())
            })
            .expect("RREF kernel has identity columns");
        free.push(col);
    }
    free
}
