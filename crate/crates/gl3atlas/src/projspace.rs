//! The finite projective plane P^2(Z/N): enumeration, canonical
//! representatives, the left SL(3,Z) action, and lifts of points to
//! determinant-one integer matrices.
//!
//! Points are primitive triples (x, y, z) mod N up to unit scaling. The
//! canonical representative of a class is the lexicographically smallest
//! triple among its unit multiples; this is not forced by the mathematics,
//! it just makes every table in the crate reproducible.
//!
//! `PointTable` materializes the whole plane once per level together with an
//! N^3 lookup array, so normalization and the group action are O(1) after
//! construction. At the largest level we use (N = 245, 86583 points) the
//! lookup array is 59 MB, which is fine at desk scale.

use crate::mat3::Mat3;
use std::fmt;

pub type PointIndex = u32;

const NO_POINT: u32 = u32::MAX;

/// A canonical point of P^2(Z/N).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    pub n: u32,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{}:{}) mod {}", self.x, self.y, self.z, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjError {
    /// gcd(x, y, z, N) > 1: the triple is not a projective point.
    NotPrimitive([i64; 3], u32),
    /// Group element whose determinant shares a factor with N.
    BadAction(i64, u32),
    LevelMismatch { expected: u32, got: u32 },
}

impl fmt::Display for ProjError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjError::NotPrimitive(v, n) => {
                write!(f, "triple {:?} is not primitive mod {}", v, n)
            }
            ProjError::BadAction(d, n) => {
                write!(f, "matrix determinant {} is not a unit mod {}", d, n)
            }
            ProjError::LevelMismatch { expected, got } => {
                write!(f, "level mismatch: expected {}, got {}", expected, got)
            }
        }
    }
}

impl std::error::Error for ProjError {}

fn gcd3_with_n(x: u64, y: u64, z: u64, n: u64) -> u64 {
    use num_integer::gcd;
    gcd(gcd(gcd(x, y), z), n)
}

/// Canonical representative of (x:y:z) mod N by direct scan over the units.
/// `PointTable` provides the fast path; this standalone version exists for
/// one-off queries and as an independent implementation to test against.
pub fn normalize(v: [i64; 3], n: u32) -> Result<ProjPoint, ProjError> {
    assert!(n >= 1);
    let nn = n as i64;
    let r = [v[0].rem_euclid(nn) as u64, v[1].rem_euclid(nn) as u64, v[2].rem_euclid(nn) as u64];
    if n == 1 {
        return Ok(ProjPoint { n, x: 0, y: 0, z: 0 });
    }
    if gcd3_with_n(r[0], r[1], r[2], n as u64) != 1 {
        return Err(ProjError::NotPrimitive(v, n));
    }
    let mut best = [u64::MAX; 3];
    for u in 1..n as u64 {
        if num_integer::gcd(u, n as u64) != 1 {
            continue;
        }
        let cand = [r[0] * u % n as u64, r[1] * u % n as u64, r[2] * u % n as u64];
        if cand < best {
            best = cand;
        }
    }
    Ok(ProjPoint { n, x: best[0] as u32, y: best[1] as u32, z: best[2] as u32 })
}

/// Expected number of points: N^2 * prod_{p | N} (1 + 1/p + 1/p^2).
pub fn point_count(n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let mut count = n * n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            count = count / (p * p) * (p * p + p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        count = count / (m * m) * (m * m + m + 1);
    }
    count
}

/// The enumerated plane for one level, with O(1) canonicalization.
pub struct PointTable {
    n: u32,
    points: Vec<ProjPoint>,
    /// triple index x*N^2 + y*N + z  ->  point index, or NO_POINT.
    lookup: Vec<u32>,
}

impl PointTable {
    pub fn new(n: u32) -> PointTable {
        assert!(n >= 1);
        let nn = n as usize;
        if n == 1 {
            return PointTable {
                n,
                points: vec![ProjPoint { n, x: 0, y: 0, z: 0 }],
                lookup: vec![0],
            };
        }
        let units: Vec<u64> =
            (1..n as u64).filter(|&u| num_integer::gcd(u, n as u64) == 1).collect();
        let mut lookup = vec![NO_POINT; nn * nn * nn];
        let mut points = Vec::with_capacity(point_count(n as u64) as usize);
        let n64 = n as u64;
        for x in 0..n64 {
            for y in 0..n64 {
                for z in 0..n64 {
                    let idx = (x * n64 * n64 + y * n64 + z) as usize;
                    if lookup[idx] != NO_POINT {
                        continue;
                    }
                    if gcd3_with_n(x, y, z, n64) != 1 {
                        continue;
                    }
                    // first unmarked member of the orbit in lex order is the
                    // canonical representative
                    let pid = points.len() as u32;
                    points.push(ProjPoint { n, x: x as u32, y: y as u32, z: z as u32 });
                    for &u in &units {
                        let tidx = (x * u % n64) * n64 * n64 + (y * u % n64) * n64 + (z * u % n64);
                        lookup[tidx as usize] = pid;
                    }
                }
            }
        }
        debug_assert_eq!(points.len() as u64, point_count(n as u64));
        PointTable { n, points, lookup }
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn point(&self, i: PointIndex) -> ProjPoint {
        self.points[i as usize]
    }

    /// Index of the canonical representative of (x:y:z).
    pub fn index_of(&self, v: [i64; 3]) -> Result<PointIndex, ProjError> {
        let nn = self.n as i64;
        if self.n == 1 {
            return Ok(0);
        }
        let x = v[0].rem_euclid(nn) as u64;
        let y = v[1].rem_euclid(nn) as u64;
        let z = v[2].rem_euclid(nn) as u64;
        let n64 = self.n as u64;
        let idx = self.lookup[(x * n64 * n64 + y * n64 + z) as usize];
        if idx == NO_POINT {
            Err(ProjError::NotPrimitive(v, self.n))
        } else {
            Ok(idx)
        }
    }

    pub fn normalize(&self, v: [i64; 3]) -> Result<ProjPoint, ProjError> {
        Ok(self.point(self.index_of(v)?))
    }

    /// Left action of an integer matrix with determinant prime to N.
    pub fn act(&self, g: &Mat3, i: PointIndex) -> Result<PointIndex, ProjError> {
        let d = g.det();
        if num_integer::gcd(d.unsigned_abs() % self.n.max(1) as u64, self.n as u64) != 1 {
            return Err(ProjError::BadAction(d, self.n));
        }
        self.act_unchecked(g, i)
    }

    /// Action without the determinant test, for inner loops where the caller
    /// already validated the matrix.
    pub fn act_unchecked(&self, g: &Mat3, i: PointIndex) -> Result<PointIndex, ProjError> {
        let p = self.point(i);
        let v = g.apply([p.x as i64, p.y as i64, p.z as i64]);
        self.index_of(v)
    }
}

/// Standalone action on canonical points.
pub fn act(g: &Mat3, pt: &ProjPoint) -> Result<ProjPoint, ProjError> {
    let n = pt.n;
    let d = g.det();
    if n > 1 && num_integer::gcd(d.unsigned_abs() % n as u64, n as u64) != 1 {
        return Err(ProjError::BadAction(d, n));
    }
    let v = g.apply([pt.x as i64, pt.y as i64, pt.z as i64]);
    normalize(v, n)
}

/// Lift a point to a matrix in SL(3,Z) whose first column is congruent to the
/// canonical representative mod N. Always solvable: the representative is
/// first adjusted to a primitive integer vector by adding multiples of N,
/// then completed to determinant one with extended gcds.
pub fn lift_to_sl3(pt: &ProjPoint, n: u32) -> Mat3 {
    assert_eq!(pt.n, n);
    let nn = n as i64;
    let mut v = [pt.x as i64, pt.y as i64, pt.z as i64];
    if n == 1 {
        return Mat3::IDENTITY;
    }
    // make the integer vector primitive
    let g = gcd3(v[0], v[1], v[2]);
    if g != 1 {
        // gcd(g, N) = 1 since the point is primitive mod N, so z + tN hits
        // every residue mod g; pick t with gcd(g, z + tN) = 1.
        let mut t = 0i64;
        loop {
            let cand = v[2] + t * nn;
            if num_integer::gcd(gcd3(v[0], v[1], 0), cand).abs() == 1 {
                v[2] = cand;
                break;
            }
            t += 1;
        }
    }
    debug_assert_eq!(gcd3(v[0], v[1], v[2]), 1);
    complete_unimodular(v)
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    num_integer::gcd(num_integer::gcd(a, b), c)
}

/// Complete a primitive column to a determinant +1 matrix.
fn complete_unimodular(v: [i64; 3]) -> Mat3 {
    if v[0] == 0 && v[1] == 0 {
        // v = (0, 0, +-1)
        let s = v[2];
        debug_assert_eq!(s.abs(), 1);
        return Mat3::from_columns(v, [1, 0, 0], [0, s, 0]);
    }
    let (d1, s, t) = ext_gcd(v[0], v[1]);
    // columns: v, (-t, s, 0), (alpha, beta, gamma)
    // det = u*d1 + (-t*beta - s*alpha) * v3 where u*d1 + w*v3 = 1
    let (g, u, w) = ext_gcd(d1, v[2]);
    debug_assert_eq!(g, 1);
    // need s*alpha + t*beta = -w; gcd(s, t) = 1
    let (gs, a, b) = ext_gcd(s, t);
    debug_assert_eq!(gs.abs(), 1);
    let alpha = a * (-w) / gs;
    let beta = b * (-w) / gs;
    let m = Mat3::from_columns(v, [-t, s, 0], [alpha, beta, u]);
    debug_assert_eq!(m.det(), 1);
    m
}

/// (g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0 unless both zero.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SplitMix64;

    #[test]
    fn normalize_examples() {
        // (2,4,6) mod 3 reduces to (2,1,0); the unit 2 gives (1,2,0).
        let p = normalize([2, 4, 6], 3).unwrap();
        assert_eq!((p.x, p.y, p.z), (1, 2, 0));
        for n in 2..20 {
            let p = normalize([1, 0, 0], n).unwrap();
            assert_eq!((p.x, p.y, p.z), (1, 0, 0));
        }
        assert!(matches!(normalize([0, 0, 5], 10), Err(ProjError::NotPrimitive(..))));
    }

    #[test]
    fn normalize_idempotent_and_unit_invariant() {
        let mut rng = SplitMix64::new(3);
        for n in [2u32, 6, 12, 35, 49] {
            for _ in 0..50 {
                let v = [rng.range_i64(-50, 50), rng.range_i64(-50, 50), rng.range_i64(-50, 50)];
                if let Ok(p) = normalize(v, n) {
                    let again = normalize([p.x as i64, p.y as i64, p.z as i64], n).unwrap();
                    assert_eq!(p, again);
                    for u in 1..n as i64 {
                        if num_integer::gcd(u as u64, n as u64) != 1 {
                            continue;
                        }
                        let scaled = normalize([v[0] * u, v[1] * u, v[2] * u], n).unwrap();
                        assert_eq!(p, scaled);
                    }
                }
            }
        }
    }

    #[test]
    fn counts_small_levels() {
        assert_eq!(point_count(1), 1);
        assert_eq!(point_count(2), 7);
        assert_eq!(point_count(245), 86583);
        for n in 1..=50u32 {
            let table = PointTable::new(n);
            assert_eq!(table.len() as u64, point_count(n as u64), "N={}", n);
            // brute force count of primitive triples / units
            let mut canon = std::collections::HashSet::new();
            for x in 0..n as i64 {
                for y in 0..n as i64 {
                    for z in 0..n as i64 {
                        if let Ok(p) = normalize([x, y, z], n) {
                            canon.insert((p.x, p.y, p.z));
                        }
                    }
                }
            }
            assert_eq!(canon.len(), table.len(), "N={}", n);
        }
    }

    #[test]
    fn table_sorted_lexicographically() {
        let table = PointTable::new(12);
        let mut prev = None;
        for p in table.points() {
            let t = (p.x, p.y, p.z);
            if let Some(q) = prev {
                assert!(q < t);
            }
            prev = Some(t);
        }
    }

    #[test]
    fn table_agrees_with_standalone_normalize() {
        for n in [2u32, 7, 12, 45] {
            let table = PointTable::new(n);
            let mut rng = SplitMix64::new(n as u64);
            for _ in 0..200 {
                let v = [rng.range_i64(-99, 99), rng.range_i64(-99, 99), rng.range_i64(-99, 99)];
                match (normalize(v, n), table.normalize(v)) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    (a, b) => panic!("disagreement at {:?}: {:?} vs {:?}", v, a, b),
                }
            }
        }
    }

    #[test]
    fn action_examples() {
        let table = PointTable::new(7);
        let id = Mat3::IDENTITY;
        for i in 0..table.len() as u32 {
            assert_eq!(table.act(&id, i).unwrap(), i);
        }
        // cyclic permutation e1 -> e2 -> e3 -> e1 sends (1:0:0) to (0:1:0)
        let cyc = Mat3::from_columns([0, 1, 0], [0, 0, 1], [1, 0, 0]);
        let e1 = table.index_of([1, 0, 0]).unwrap();
        let img = table.act(&cyc, e1).unwrap();
        assert_eq!(table.point(img), normalize([0, 1, 0], 7).unwrap());
    }

    #[test]
    fn action_composition_and_bijection() {
        let mut rng = SplitMix64::new(99);
        for n in [2u32, 5, 12, 21, 50] {
            let table = PointTable::new(n);
            for _ in 0..10 {
                let g = random_sl3(&mut rng);
                let h = random_sl3(&mut rng);
                let gh = g * h;
                let mut image = std::collections::HashSet::new();
                for i in 0..table.len() as u32 {
                    let a = table.act(&gh, i).unwrap();
                    let b = table.act(&g, table.act(&h, i).unwrap()).unwrap();
                    assert_eq!(a, b);
                    image.insert(a);
                }
                assert_eq!(image.len(), table.len());
            }
        }
    }

    #[test]
    fn bad_action_detected() {
        let table = PointTable::new(10);
        let g = Mat3::diag(2, 1, 1); // det 2 shares a factor with 10
        assert!(matches!(table.act(&g, 0), Err(ProjError::BadAction(..))));
    }

    /// Random product of elementary matrices; always det 1.
    fn random_sl3(rng: &mut SplitMix64) -> Mat3 {
        let mut g = Mat3::IDENTITY;
        for _ in 0..6 {
            let mut e = Mat3::IDENTITY;
            let i = rng.below(3) as usize;
            let mut j = rng.below(3) as usize;
            if i == j {
                j = (j + 1) % 3;
            }
            e.m[i][j] = rng.range_i64(-3, 3);
            g = g * e;
        }
        g
    }

    #[test]
    fn lift_examples() {
        let p = normalize([1, 0, 0], 11).unwrap();
        let m = lift_to_sl3(&p, 11);
        assert_eq!(m.det(), 1);
        assert_eq!(m.column(0), [1, 0, 0]);

        let p = normalize([0, 1, 0], 11).unwrap();
        let m = lift_to_sl3(&p, 11);
        assert_eq!(m.det(), 1);
        assert_eq!(m.column(0)[1].rem_euclid(11), 1);
    }

    #[test]
    fn lift_postconditions_all_points() {
        for n in [2u32, 3, 8, 12, 35, 49, 50] {
            let table = PointTable::new(n);
            for p in table.points() {
                let m = lift_to_sl3(p, n);
                assert_eq!(m.det(), 1, "det at {:?}", p);
                let c = m.column(0);
                assert_eq!(c[0].rem_euclid(n as i64) as u32, p.x);
                assert_eq!(c[1].rem_euclid(n as i64) as u32, p.y);
                assert_eq!(c[2].rem_euclid(n as i64) as u32, p.z);
                // entries stay polynomially bounded in N
                assert!(m.max_abs_entry() <= 4 * (n as i64) * (n as i64) + 4);
            }
        }
    }
}
