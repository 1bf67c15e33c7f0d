//! Kernel solver for the relation system.
//!
//! Pipeline, per level:
//!   1. collapse relations (1)-(2) with a signed union-find over points;
//!      orbits identified with minus themselves are forced to zero.
//!   2. rewrite the relation-(3) rows on orbit coordinates and deduplicate.
//!   3. mod several word-size primes: peel rows of length 1 and 2 with a
//!      weighted union-find, randomly compress the remaining core rows, run
//!      dense elimination, and validate every candidate kernel vector
//!      against all core rows (so the random compression cannot silently
//!      lose rank).
//!   4. once two primes agree on dimension and pivot structure, CRT the
//!      echelonized kernels, reconstruct rational entries, clear
//!      denominators, and verify the integer vectors against the exact
//!      relation rows.
//!
//! The verified vectors give dim >= d; the modular kernel gives dim <= d;
//! together the output is certified exact.

use super::{Basis, HomologyCtx, HomologyError, OrbitData, RelationSystem, REL1_MAT, REL2_MAT};
use crate::arith::reconstruct::{crt, rational_reconstruct, symmetric_lift, SOLVE_PRIMES};
use crate::arith::{mod_inv_u64, mul_mod, SplitMix64};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashSet;
use std::sync::Arc;

pub(super) fn kernel_basis_impl(sys: &RelationSystem) -> Result<Arc<Basis>, HomologyError> {
    let table = Arc::clone(sys.table());
    let orbits = build_orbits(&table);
    let orbit_rows = build_orbit_rows(sys, &orbits);
    let ctx = Arc::new(HomologyCtx { table, orbits, orbit_rows });

    // first two primes in parallel; disagreements fall back to one at a time
    let mut solutions: Vec<(u64, ModPKernel)> = if crate::worker_count(2) >= 2 {
        let ctx_ref = &ctx;
        std::thread::scope(|sc| {
            let handles: Vec<_> = SOLVE_PRIMES[..2]
                .iter()
                .map(|&p| sc.spawn(move || (p, solve_mod_p(ctx_ref, p))))
                .collect();
            handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
        })
    } else {
        SOLVE_PRIMES[..2].iter().map(|&p| (p, solve_mod_p(&ctx, p))).collect()
    };
    let mut prime_iter = SOLVE_PRIMES[2..].iter();
    loop {
        while solutions.len() < 2 {
            let &p = prime_iter
                .next()
                .ok_or_else(|| HomologyError::Unsolvable("prime list exhausted".into()))?;
            solutions.push((p, solve_mod_p(&ctx, p)));
        }
        let agree = solutions[0].1.dim == solutions[1].1.dim
            && solutions[0].1.pivot_orbits == solutions[1].1.pivot_orbits;
        if !agree {
            // keep the later one, pull a third prime
            solutions.remove(0);
            continue;
        }
        match reconstruct_and_verify(&ctx, &solutions) {
            Some(basis) => return Ok(Arc::new(basis)),
            None => {
                // reconstruction needs more modulus; add a prime consistent
                // with the agreeing pair
                let &p = prime_iter
                    .next()
                    .ok_or_else(|| HomologyError::Unsolvable("reconstruction failed".into()))?;
                let sol = solve_mod_p(&ctx, p);
                if sol.dim == solutions[0].1.dim && sol.pivot_orbits == solutions[0].1.pivot_orbits {
                    solutions.push((p, sol));
                } else {
                    return Err(HomologyError::Unsolvable(
                        "modular solutions disagree persistently".into(),
                    ));
                }
            }
        }
    }
}

/// Signed union-find over relations (1) and (2).
pub(super) fn build_orbits(table: &crate::projspace::PointTable) -> OrbitData {
    let n = table.len();
    let mut uf = SignUf::new(n);
    for i in 0..n as u32 {
        let a_img = table.act_unchecked(&REL1_MAT, i).unwrap();
        uf.union(i, a_img, -1); // f(i) = -f(Ai)
        let c_img = table.act_unchecked(&REL2_MAT, i).unwrap();
        uf.union(i, c_img, 1); // f(i) = f(Ci)
    }
    // orbits numbered by increasing minimal point
    let mut orbit_min_of_root = vec![u32::MAX; n];
    for i in 0..n as u32 {
        let (r, _) = uf.find(i);
        if orbit_min_of_root[r as usize] == u32::MAX {
            orbit_min_of_root[r as usize] = i; // first visit in index order
        }
    }
    let mut orbit_min: Vec<u32> = Vec::new();
    let mut orbit_id_of_root = vec![u32::MAX; n];
    for root in 0..n {
        if orbit_min_of_root[root] != u32::MAX && uf.find(root as u32).0 == root as u32 {
            orbit_id_of_root[root] = orbit_min.len() as u32;
            orbit_min.push(orbit_min_of_root[root]);
        }
    }
    // sign of each point relative to the orbit's minimal point
    let mut orbit_of = vec![0u32; n];
    let mut sign_of = vec![0i8; n];
    let mut forced_zero = vec![false; orbit_min.len()];
    let mut min_sign = vec![0i8; orbit_min.len()];
    for i in 0..n as u32 {
        let (r, s) = uf.find(i);
        let orb = orbit_id_of_root[r as usize];
        orbit_of[i as usize] = orb;
        sign_of[i as usize] = s;
        if uf.zero[r as usize] {
            forced_zero[orb as usize] = true;
        }
        if orbit_min[orb as usize] == i {
            min_sign[orb as usize] = s;
        }
    }
    // renormalize signs to be relative to the minimal point, not the root
    for i in 0..n {
        sign_of[i] *= min_sign[orbit_of[i] as usize];
    }
    OrbitData { orbit_of, sign_of, orbit_min, forced_zero }
}

struct SignUf {
    parent: Vec<u32>,
    /// sign of the element relative to its parent.
    sign: Vec<i8>,
    zero: Vec<bool>,
}

impl SignUf {
    fn new(n: usize) -> Self {
        SignUf { parent: (0..n as u32).collect(), sign: vec![1; n], zero: vec![false; n] }
    }

    fn find(&mut self, i: u32) -> (u32, i8) {
        let p = self.parent[i as usize];
        if p == i {
            return (i, 1);
        }
        let (root, s) = self.find(p);
        let total = self.sign[i as usize] * s;
        self.parent[i as usize] = root;
        self.sign[i as usize] = total;
        (root, total)
    }

    /// Impose f(a) = s * f(b).
    fn union(&mut self, a: u32, b: u32, s: i8) {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            if sa != s * sb {
                self.zero[ra as usize] = true;
            }
            return;
        }
        // attach ra under rb: f(ra) = (s * sb / sa) f(rb); signs are units
        self.parent[ra as usize] = rb;
        self.sign[ra as usize] = s * sb * sa;
        if self.zero[ra as usize] {
            self.zero[rb as usize] = true;
        }
    }
}

/// Rewrite all rows on orbit coordinates, drop forced-zero orbits, and
/// deduplicate (content- and sign-normalized).
pub(super) fn build_orbit_rows(sys: &RelationSystem, orbits: &OrbitData) -> Vec<Vec<(u32, i64)>> {
    let mut seen: HashSet<Vec<(u32, i64)>> = HashSet::new();
    let mut out = Vec::new();
    for row in sys.rows() {
        let mut terms: Vec<(u32, i64)> = Vec::with_capacity(3);
        for &(pt, c) in row {
            let orb = orbits.orbit_of[pt as usize];
            if orbits.forced_zero[orb as usize] {
                continue;
            }
            let s = orbits.sign_of[pt as usize] as i64;
            terms.push((orb, c * s));
        }
        terms.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(u32, i64)> = Vec::with_capacity(terms.len());
        for (o, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == o => last.1 += c,
                _ => merged.push((o, c)),
            }
        }
        merged.retain(|t| t.1 != 0);
        if merged.is_empty() {
            continue;
        }
        // normalize: divide by content, first coefficient positive
        let content = merged.iter().fold(0i64, |g, t| num_integer::gcd(g, t.1.abs()));
        if content > 1 {
            for t in &mut merged {
                t.1 /= content;
            }
        }
        if merged[0].1 < 0 {
            for t in &mut merged {
                t.1 = -t.1;
            }
        }
        if seen.insert(merged.clone()) {
            out.push(merged);
        }
    }
    out
}

/// The mod-p kernel in reduced echelon form over orbit columns.
struct ModPKernel {
    dim: usize,
    pivot_orbits: Vec<u32>,
    /// dim x n_orbits, RREF, pivot entries 1.
    rows: Vec<Vec<u64>>,
}

fn solve_mod_p(ctx: &HomologyCtx, p: u64) -> ModPKernel {
    let n_orbits = ctx.orbits.n_orbits();
    let forced = &ctx.orbits.forced_zero;

    let mut uf = WeightedUf::new(n_orbits, p);
    for (orb, &f) in forced.iter().enumerate() {
        if f {
            uf.force_zero(orb as u32);
        }
    }

    // peel: resolve rows of length one and two until stable
    let mut rows: Vec<Vec<(u32, u64)>> = ctx
        .orbit_rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&(o, c)| (o, c.rem_euclid(p as i64) as u64))
                .filter(|&(_, c)| c != 0)
                .collect()
        })
        .collect();
    loop {
        let mut changed = false;
        let mut kept = Vec::with_capacity(rows.len());
        for row in rows.drain(..) {
            let reduced = uf.reduce_row(&row);
            match reduced.len() {
                0 => {}
                1 => {
                    uf.force_zero(reduced[0].0);
                    changed = true;
                }
                2 => {
                    // c1 x + c2 y = 0  =>  x = (-c2/c1) y
                    let (x, c1) = reduced[0];
                    let (y, c2) = reduced[1];
                    let w = mul_mod(p - c2, mod_inv_u64(c1, p).unwrap(), p);
                    uf.union(x, y, w);
                    changed = true;
                }
                _ => kept.push(reduced),
            }
        }
        rows = kept;
        if !changed {
            break;
        }
    }

    // core variables: live roots
    let mut core_col = vec![u32::MAX; n_orbits];
    let mut core_vars: Vec<u32> = Vec::new();
    for orb in 0..n_orbits as u32 {
        let (root, _) = uf.find(orb);
        if root == orb && !uf.zero[orb as usize] {
            core_col[orb as usize] = core_vars.len() as u32;
            core_vars.push(orb);
        }
    }
    let k = core_vars.len();

    // final reduction + dedup of core rows on core columns
    let mut seen = HashSet::new();
    let mut core_rows: Vec<Vec<(u32, u64)>> = Vec::new();
    for row in &rows {
        let mut r = uf.reduce_row(row);
        for t in &mut r {
            t.0 = core_col[t.0 as usize];
            debug_assert!(t.0 != u32::MAX);
        }
        r.sort_unstable_by_key(|t| t.0);
        if r.len() >= 2 && seen.insert(r.clone()) {
            core_rows.push(r);
        } else if r.len() == 1 {
            // can appear if dedup order interacts with late unions; resolve
            uf.force_zero(core_vars[r[0].0 as usize]);
        }
    }

    // kernel of the core system
    if std::env::var_os("GL3_TRACE").is_some() {
        eprintln!(
            "[solve p={}] orbits={} core_cols={} core_rows={}",
            p,
            n_orbits,
            k,
            core_rows.len()
        );
    }
    let core_kernel = core_kernel_mod_p(&core_rows, k, p);

    // back-substitute to all orbit variables
    let dim = core_kernel.len();
    let mut full: Vec<Vec<u64>> = vec![vec![0u64; n_orbits]; dim];
    for orb in 0..n_orbits as u32 {
        let (root, w) = uf.find(orb);
        if uf.zero[root as usize] {
            continue;
        }
        let col = core_col[root as usize] as usize;
        for (v, fk) in full.iter_mut().zip(core_kernel.iter()) {
            v[orb as usize] = mul_mod(w, fk[col], p);
        }
    }

    // reduced echelon form over orbit columns (ordered by minimal point)
    let (rows, pivot_orbits) = rref_mod_p(full, p);
    ModPKernel { dim: rows.len(), pivot_orbits, rows }
}

struct WeightedUf {
    parent: Vec<u32>,
    /// var = weight * parent (mod p)
    weight: Vec<u64>,
    zero: Vec<bool>,
    p: u64,
}

impl WeightedUf {
    fn new(n: usize, p: u64) -> Self {
        WeightedUf { parent: (0..n as u32).collect(), weight: vec![1; n], zero: vec![false; n], p }
    }

    fn find(&mut self, i: u32) -> (u32, u64) {
        // iterative two-pass: locate the root, then compress the path
        let mut root = i;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = i;
        let mut w_cur_to_root = 1u64;
        // first accumulate weights along the uncompressed path
        let mut path = Vec::new();
        while self.parent[cur as usize] != cur {
            path.push(cur);
            cur = self.parent[cur as usize];
        }
        for &node in path.iter().rev() {
            w_cur_to_root = mul_mod(self.weight[node as usize], w_cur_to_root, self.p);
            self.parent[node as usize] = root;
            self.weight[node as usize] = w_cur_to_root;
        }
        let w = if i == root { 1 } else { self.weight[i as usize] };
        (root, w)
    }

    fn force_zero(&mut self, i: u32) {
        let (root, _) = self.find(i);
        self.zero[root as usize] = true;
    }

    /// Impose var_a = w * var_b.
    fn union(&mut self, a: u32, b: u32, w: u64) {
        let (ra, wa) = self.find(a);
        let (rb, wb) = self.find(b);
        if ra == rb {
            // wa * ra = w * wb * ra
            if wa != mul_mod(w, wb, self.p) {
                self.zero[ra as usize] = true;
            }
            return;
        }
        // ra = (w * wb / wa) rb
        let coeff = mul_mod(mul_mod(w, wb, self.p), mod_inv_u64(wa, self.p).unwrap(), self.p);
        self.parent[ra as usize] = rb;
        self.weight[ra as usize] = coeff;
        if self.zero[ra as usize] {
            self.zero[rb as usize] = true;
        }
    }

    /// Express a row through the current substitutions, merging terms.
    fn reduce_row(&mut self, row: &[(u32, u64)]) -> Vec<(u32, u64)> {
        let mut terms: Vec<(u32, u64)> = Vec::with_capacity(row.len());
        for &(var, c) in row {
            let (root, w) = self.find(var);
            if self.zero[root as usize] {
                continue;
            }
            terms.push((root, mul_mod(c, w, self.p)));
        }
        terms.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(u32, u64)> = Vec::with_capacity(terms.len());
        for (o, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == o => last.1 = (last.1 + c) % self.p,
                _ => merged.push((o, c)),
            }
        }
        merged.retain(|t| t.1 != 0);
        merged
    }
}

/// Kernel basis of the sparse core system over F_p. Uses random compression
/// when the row count is much larger than the column count; candidates are
/// always validated against every row, so a lost-rank compression is
/// detected and retried rather than trusted.
fn core_kernel_mod_p(core_rows: &[Vec<(u32, u64)>], k: usize, p: u64) -> Vec<Vec<u64>> {
    if k == 0 {
        return Vec::new();
    }
    if core_rows.is_empty() {
        return (0..k)
            .map(|i| {
                let mut v = vec![0u64; k];
                v[i] = 1;
                v
            })
            .collect();
    }

    let direct_threshold = k + 64;
    let mut attempt = 0u64;
    loop {
        let dense: Vec<Vec<u64>> = if core_rows.len() <= direct_threshold || attempt >= 2 {
            // exact: use the rows themselves
            core_rows
                .iter()
                .map(|r| {
                    let mut v = vec![0u64; k];
                    for &(c, val) in r {
                        v[c as usize] = (v[c as usize] + val) % p;
                    }
                    v
                })
                .collect()
        } else {
            // compress: S random combinations of the rows
            let s = k + 32;
            let mut rng = SplitMix64::new(0x5eed0000 + p + attempt * 7919);
            let mut comp = vec![vec![0u64; k]; s];
            for row in core_rows {
                for crow in comp.iter_mut() {
                    let coeff = rng.below(p);
                    if coeff == 0 {
                        continue;
                    }
                    for &(c, val) in row {
                        let slot = &mut crow[c as usize];
                        *slot = (*slot + mul_mod(coeff, val, p)) % p;
                    }
                }
            }
            comp
        };

        let kernel = dense_kernel(dense, k, p);
        // validate against every actual row
        let ok = kernel.iter().all(|v| {
            core_rows.iter().all(|r| {
                let mut acc = 0u64;
                for &(c, val) in r {
                    acc = (acc + mul_mod(val, v[c as usize], p)) % p;
                }
                acc == 0
            })
        });
        if ok {
            return kernel;
        }
        attempt += 1;
    }
}

/// In-place axpy row operation: row += factor * pivot, entries kept in
/// [0, p). Requires p < 2^31 so the products fit in u64; reduction is
/// Barrett (multiply-shift) rather than hardware division.
#[inline]
fn axpy_mod(row: &mut [u64], pivot: &[u64], factor: u64, p: u64) {
    debug_assert!(p < 1 << 31);
    let magic = ((1u128 << 64) / p as u128) as u64;
    for (x, &pv) in row.iter_mut().zip(pivot.iter()) {
        let t = *x + factor * pv;
        let q = ((t as u128 * magic as u128) >> 64) as u64;
        let r = t.wrapping_sub(q.wrapping_mul(p));
        *x = if r >= p { r - p } else { r };
    }
}

/// Kernel of a dense matrix (rows x k) over F_p.
fn dense_kernel(mut m: Vec<Vec<u64>>, k: usize, p: u64) -> Vec<Vec<u64>> {
    let nrows = m.len();
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; k];
    let mut rank = 0usize;
    for col in 0..k {
        let piv = (rank..nrows).find(|&r| m[r][col] != 0);
        let Some(piv) = piv else { continue };
        m.swap(rank, piv);
        let inv = mod_inv_u64(m[rank][col], p).unwrap();
        for x in m[rank][col..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = std::mem::take(&mut m[rank]);
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row.is_empty() || row[col] == 0 {
                continue;
            }
            let f = p - row[col];
            axpy_mod(&mut row[col..], &pivot_row[col..], f, p);
        }
        m[rank] = pivot_row;
        pivot_row_of_col[col] = Some(rank);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    let mut kernel = Vec::with_capacity(k - rank);
    for free in 0..k {
        if pivot_row_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![0u64; k];
        v[free] = 1;
        for (col, pr) in pivot_row_of_col.iter().enumerate() {
            if let Some(r) = pr {
                let val = m[*r][free];
                if val != 0 {
                    v[col] = p - val;
                }
            }
        }
        kernel.push(v);
    }
    kernel
}

/// Reduced row echelon form; returns (rows, pivot columns).
fn rref_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> (Vec<Vec<u64>>, Vec<u32>) {
    if rows.is_empty() {
        return (rows, Vec::new());
    }
    let ncols = rows[0].len();
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, piv);
        let inv = mod_inv_u64(rows[r][col], p).unwrap();
        for x in rows[r][col..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = std::mem::take(&mut rows[r]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row.is_empty() || row[col] == 0 {
                continue;
            }
            let f = p - row[col];
            axpy_mod(&mut row[col..], &pivot_row[col..], f, p);
        }
        rows[r] = pivot_row;
        pivots.push(col as u32);
        r += 1;
        if r == nrows {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// CRT the agreeing modular kernels, rationally reconstruct, clear
/// denominators, and verify exactly. None means "need more primes".
fn reconstruct_and_verify(
    ctx: &Arc<HomologyCtx>,
    solutions: &[(u64, ModPKernel)],
) -> Option<Basis> {
    let dim = solutions[0].1.dim;
    let n_orbits = ctx.orbits.n_orbits();
    let pivot_orbits = solutions[0].1.pivot_orbits.clone();

    let mut g_rows: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut rationals: Vec<(BigInt, BigInt)> = Vec::with_capacity(n_orbits);
        for col in 0..n_orbits {
            let residues: Vec<(u64, u64)> =
                solutions.iter().map(|(p, sol)| (sol.rows[i][col], *p)).collect();
            let (x, m) = crt(&residues);
            // fast path: small symmetric lift is the common case (entries 0/1)
            let lifted = symmetric_lift(&x, &m);
            if lifted.abs() < BigInt::from(1u64 << 20) {
                rationals.push((lifted, BigInt::one()));
            } else {
                let (num, den) = rational_reconstruct(&x, &m)?;
                rationals.push((num, den));
            }
        }
        // clear denominators, divide by content
        let mut lcm = BigInt::one();
        for (_, d) in &rationals {
            lcm = lcm.lcm(d);
        }
        let mut row: Vec<BigInt> =
            rationals.into_iter().map(|(n, d)| n * (&lcm / d)).collect();
        let mut content = BigInt::zero();
        for v in &row {
            content = content.gcd(v);
        }
        if content > BigInt::one() {
            for v in &mut row {
                *v /= &content;
            }
        }
        // pivot entry positive (it is lcm/content of a 1, hence positive)
        debug_assert!(row[pivot_orbits[i] as usize].is_positive());
        g_rows.push(row);
    }

    // exact verification: all deduplicated relation rows vanish, forced
    // orbits carry zero
    for row in &g_rows {
        for (orb, forced) in ctx.orbits.forced_zero.iter().enumerate() {
            if *forced && !row[orb].is_zero() {
                return None;
            }
        }
    }
    for rel in &ctx.orbit_rows {
        for row in &g_rows {
            let mut acc = BigInt::zero();
            for &(orb, c) in rel {
                acc += BigInt::from(c) * &row[orb as usize];
            }
            if !acc.is_zero() {
                return None;
            }
        }
    }

    let pivot_points: Vec<u32> =
        pivot_orbits.iter().map(|&o| ctx.orbits.orbit_min[o as usize]).collect();
    let pivot_scale: Vec<BigInt> =
        g_rows.iter().zip(&pivot_orbits).map(|(r, &o)| r[o as usize].clone()).collect();

    Some(Basis { ctx: Arc::clone(ctx), g_rows, pivot_orbits, pivot_points, pivot_scale })
}

/// Textbook dense elimination over the raw point system mod p, with none of
/// the production shortcuts. Used as the independent nullity oracle.
pub fn naive_nullity_mod_p(sys: &RelationSystem, p: u64) -> usize {
    let n = sys.table().len();
    let mut pivot_row_of_col: Vec<Option<Vec<u64>>> = vec![None; n];
    let mut rank = 0usize;
    for row in sys.rows() {
        let mut work = vec![0u64; n];
        for &(pt, c) in row {
            work[pt as usize] = (work[pt as usize] + c.rem_euclid(p as i64) as u64) % p;
        }
        let mut col = 0usize;
        while col < n {
            if work[col] == 0 {
                col += 1;
                continue;
            }
            match &pivot_row_of_col[col] {
                Some(piv) => {
                    let f = p - work[col];
                    axpy_mod(&mut work[col..], &piv[col..], f, p);
                    col += 1;
                }
                None => {
                    let inv = mod_inv_u64(work[col], p).unwrap();
                    for x in work[col..].iter_mut() {
                        *x = mul_mod(*x, inv, p);
                    }
                    pivot_row_of_col[col] = Some(work);
                    rank += 1;
                    break;
                }
            }
        }
    }
    n - rank
}
