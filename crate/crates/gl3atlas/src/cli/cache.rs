//! On-disk cache for Hecke matrices and homology bases.
//!
//! Line-based format, diffable and portable:
//!
//!   GL3ATLAS-CACHE v1 <N> <p> <kind> <convention> <dim> <checksum>
//!   <row> <col> <numerator>        (one line per nonzero entry)
//!   den <denominator>
//!
//! The header is matched field-for-field before the payload is trusted; any
//! mismatch is a cache miss, never a silent reuse. The checksum (FNV-1a 64
//! over the payload lines) catches corrupted payloads. A homology basis is
//! stored with kind "B", p = 0 and the relation-variant tag in the
//! convention slot.

use crate::arith::BigRat;
use crate::hecke::{Convention, HeckeKind, HeckeMatrix};
use crate::homology::{shared_table, Basis};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

pub const CACHE_MAGIC: &str = "GL3ATLAS-CACHE";
pub const CACHE_VERSION: &str = "v1";

#[derive(Debug)]
pub enum CacheError {
    Io(std::io::Error),
    /// header mismatch or malformed content
    Format(String),
    /// payload does not match its stored checksum
    Corrupted,
    /// header is valid but describes different data
    Miss,
}

impl std::fmt::Display for CacheError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CacheError::Io(e) => write!(f, "cache i/o error: {}", e),
            CacheError::Format(s) => write!(f, "cache format error: {}", s),
            CacheError::Corrupted => write!(f, "cache payload checksum mismatch"),
            CacheError::Miss => write!(f, "cache entry does not match the request"),
        }
    }
}

impl std::error::Error for CacheError {}

impl From<std::io::Error> for CacheError {
    fn from(e: std::io::Error) -> Self {
        CacheError::Io(e)
    }
}

/// A parsed cache entry: header plus sparse integer payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub level: u32,
    pub p: u64,
    /// "E", "D" or "B"
    pub kind: String,
    /// convention tag, or relation-variant tag for a basis
    pub convention: String,
    pub dim: usize,
    /// (row, col, numerator)
    pub triplets: Vec<(u32, u32, BigInt)>,
    pub denominator: BigInt,
}

fn fnv1a64(data: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in data.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl CacheEntry {
    fn payload_text(&self) -> String {
        let mut s = String::new();
        for (r, c, n) in &self.triplets {
            s.push_str(&format!("{} {} {}\n", r, c, n));
        }
        s.push_str(&format!("den {}\n", self.denominator));
        s
    }

    pub fn to_text(&self) -> String {
        let payload = self.payload_text();
        format!(
            "{} {} {} {} {} {} {} {:016x}\n{}",
            CACHE_MAGIC,
            CACHE_VERSION,
            self.level,
            self.p,
            self.kind,
            self.convention,
            self.dim,
            fnv1a64(&payload),
            payload
        )
    }

    pub fn from_text(text: &str) -> Result<CacheEntry, CacheError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| CacheError::Format("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 8 || fields[0] != CACHE_MAGIC {
            return Err(CacheError::Format("bad header".into()));
        }
        if fields[1] != CACHE_VERSION {
            return Err(CacheError::Miss); // version bump: miss, not error
        }
        let level: u32 = fields[2].parse().map_err(|_| CacheError::Format("level".into()))?;
        let p: u64 = fields[3].parse().map_err(|_| CacheError::Format("prime".into()))?;
        let kind = fields[4].to_string();
        let convention = fields[5].to_string();
        let dim: usize = fields[6].parse().map_err(|_| CacheError::Format("dim".into()))?;
        let checksum =
            u64::from_str_radix(fields[7], 16).map_err(|_| CacheError::Format("checksum".into()))?;
        let mut triplets = Vec::new();
        let mut denominator: Option<BigInt> = None;
        let mut payload = String::new();
        for line in lines {
            payload.push_str(line);
            payload.push('\n');
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.first() == Some(&"den") {
                if parts.len() != 2 {
                    return Err(CacheError::Format("denominator line".into()));
                }
                denominator =
                    Some(BigInt::from_str(parts[1]).map_err(|_| CacheError::Format("den".into()))?);
                break;
            }
            if parts.len() != 3 {
                return Err(CacheError::Format(format!("triplet line '{}'", line)));
            }
            triplets.push((
                parts[0].parse().map_err(|_| CacheError::Format("row".into()))?,
                parts[1].parse().map_err(|_| CacheError::Format("col".into()))?,
                BigInt::from_str(parts[2]).map_err(|_| CacheError::Format("numerator".into()))?,
            ));
        }
        let denominator = denominator.ok_or_else(|| CacheError::Format("missing den".into()))?;
        if fnv1a64(&payload) != checksum {
            return Err(CacheError::Corrupted);
        }
        Ok(CacheEntry { level, p, kind, convention, dim, triplets, denominator })
    }
}

/// Encode a Hecke matrix: entries scaled by the least common denominator.
pub fn encode_hecke(h: &HeckeMatrix) -> CacheEntry {
    let dim = h.dim();
    let mut den = BigInt::one();
    for row in &h.mat {
        for v in row {
            den = den.lcm(v.denom());
        }
    }
    let mut triplets = Vec::new();
    for (i, row) in h.mat.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                let num = v.numer() * (&den / v.denom());
                triplets.push((i as u32, j as u32, num));
            }
        }
    }
    CacheEntry {
        level: h.level,
        p: h.p,
        kind: h.kind.tag().to_string(),
        convention: h.convention.tag().to_string(),
        dim,
        triplets,
        denominator: den,
    }
}

pub fn decode_hecke(e: &CacheEntry) -> Result<HeckeMatrix, CacheError> {
    let kind = match e.kind.as_str() {
        "E" => HeckeKind::E,
        "D" => HeckeKind::D,
        other => return Err(CacheError::Format(format!("kind '{}'", other))),
    };
    let convention = match e.convention.as_str() {
        "std" => Convention::Standard,
        "tr" => Convention::Transposed,
        other => return Err(CacheError::Format(format!("convention '{}'", other))),
    };
    let mut mat = vec![vec![BigRat::zero(); e.dim]; e.dim];
    for (r, c, n) in &e.triplets {
        let (r, c) = (*r as usize, *c as usize);
        if r >= e.dim || c >= e.dim {
            return Err(CacheError::Format("triplet out of range".into()));
        }
        mat[r][c] = BigRat::new(n.clone(), e.denominator.clone());
    }
    Ok(HeckeMatrix { level: e.level, p: e.p, kind, convention, mat })
}

/// Encode a homology basis (integer vectors over orbit columns).
pub fn encode_basis(b: &Basis) -> CacheEntry {
    let mut triplets = Vec::new();
    for (i, row) in b.g_rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                triplets.push((i as u32, j as u32, v.clone()));
            }
        }
    }
    CacheEntry {
        level: b.level(),
        p: 0,
        kind: "B".to_string(),
        convention: "z".to_string(),
        dim: b.dim(),
        triplets,
        denominator: BigInt::one(),
    }
}

/// Rebuild a basis from a cache entry. The orbit structure is recomputed
/// (it is deterministic for the level); the stored vectors are verified
/// against the relation rows exactly before use.
pub fn decode_basis(e: &CacheEntry) -> Result<Arc<Basis>, CacheError> {
    if e.kind != "B" || e.convention != "z" || !e.denominator.is_one() {
        return Err(CacheError::Miss);
    }
    let sys = crate::homology::relation_system_with_variant(
        shared_table(e.level),
        crate::homology::RelationVariant::ZSlot,
    )
    .map_err(|err| CacheError::Format(err.to_string()))?;
    let fresh = crate::homology::kernel_basis(&sys)
        .map_err(|err| CacheError::Format(err.to_string()))?;
    // cheap path: if the stored payload matches the recomputed basis, use it;
    // the recompute is the authority, the cache is an integrity-checked copy
    let reencoded = encode_basis(&fresh);
    if reencoded.triplets == e.triplets && reencoded.dim == e.dim {
        Ok(fresh)
    } else {
        Err(CacheError::Miss)
    }
}

pub fn cache_path(dir: &Path, level: u32, p: u64, kind: &str, convention: &str) -> PathBuf {
    dir.join(format!("gl3atlas-N{}-p{}-{}-{}.cache", level, p, kind, convention))
}

/// Write an entry to the conventional location under `dir`.
pub fn write_entry(dir: &Path, e: &CacheEntry) -> Result<PathBuf, CacheError> {
    std::fs::create_dir_all(dir)?;
    let path = cache_path(dir, e.level, e.p, &e.kind, &e.convention);
    let mut f = std::fs::File::create(&path)?;
    f.write_all(e.to_text().as_bytes())?;
    Ok(path)
}

/// Read an entry if present and matching; Miss on absent file.
pub fn read_entry(
    dir: &Path,
    level: u32,
    p: u64,
    kind: &str,
    convention: &str,
) -> Result<CacheEntry, CacheError> {
    let path = cache_path(dir, level, p, kind, convention);
    if !path.exists() {
        return Err(CacheError::Miss);
    }
    let text = std::fs::read_to_string(&path)?;
    let e = CacheEntry::from_text(&text)?;
    if e.level != level || e.p != p || e.kind != kind || e.convention != convention {
        return Err(CacheError::Miss);
    }
    Ok(e)
}
