//! Fixture and curve configuration files.
//!
//! A fixture table records the published traces a_p of one eigenform level:
//! `{"schema":1, "level":128, "field":"Q(i)", "bad":[2], "ap":{"3":[1,2], ...}}`.
//! Files may contain one table or an array of tables. Bad primes carry an
//! explicit marker, never a fake value. Schema violations are usage errors;
//! failed integrity checks (field tag inconsistent with the entries, Weil
//! bound violations, bad set not matching the level) are data errors.

use crate::counting::CurveSpec;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug)]
pub enum FixtureError {
    /// malformed file or wrong schema: exit code 2
    Schema(String),
    /// well-formed but inconsistent data: exit code 3
    Integrity(String),
}

impl std::fmt::Display for FixtureError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FixtureError::Schema(s) => write!(f, "fixture schema error: {}", s),
            FixtureError::Integrity(s) => write!(f, "fixture integrity error: {}", s),
        }
    }
}

impl std::error::Error for FixtureError {}

#[derive(Debug, Clone, Deserialize)]
struct RawFixture {
    schema: u32,
    level: u32,
    field: String,
    bad: Vec<u64>,
    ap: BTreeMap<String, [i64; 2]>,
}

/// Published traces for one level, bad primes marked.
#[derive(Debug, Clone)]
pub struct FixtureTable {
    pub level: u32,
    pub field: String,
    pub bad: Vec<u64>,
    pub ap: BTreeMap<u64, (i64, i64)>,
}

impl FixtureTable {
    pub fn is_bad_prime(&self, p: u64) -> bool {
        self.bad.contains(&p)
    }

    pub fn trace(&self, p: u64) -> Option<(i64, i64)> {
        if self.is_bad_prime(p) {
            None
        } else {
            self.ap.get(&p).copied()
        }
    }

    /// Fixture primes (good entries only) up to the bound.
    pub fn good_primes_upto(&self, pmax: u64) -> Vec<u64> {
        self.ap.keys().copied().filter(|&p| p <= pmax && !self.is_bad_prime(p)).collect()
    }
}

/// The tables shipped with the crate (the published values for levels 128,
/// 160 and 205).
pub fn builtin_fixtures() -> Vec<FixtureTable> {
    parse_fixtures(include_str!("../../fixtures/levels.json")).expect("shipped fixtures are valid")
}

pub fn load_fixtures(path: &str) -> Result<Vec<FixtureTable>, FixtureError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FixtureError::Schema(format!("cannot read {}: {}", path, e)))?;
    parse_fixtures(&text)
}

pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureTable>, FixtureError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FixtureError::Schema(e.to_string()))?;
    let raws: Vec<RawFixture> = if value.is_array() {
        serde_json::from_value(value).map_err(|e| FixtureError::Schema(e.to_string()))?
    } else {
        vec![serde_json::from_value(value).map_err(|e| FixtureError::Schema(e.to_string()))?]
    };
    raws.into_iter().map(validate_fixture).collect()
}

fn validate_fixture(raw: RawFixture) -> Result<FixtureTable, FixtureError> {
    if raw.schema != 1 {
        return Err(FixtureError::Schema(format!("unsupported schema version {}", raw.schema)));
    }
    let mut ap = BTreeMap::new();
    for (key, val) in &raw.ap {
        let p: u64 = key
            .parse()
            .map_err(|_| FixtureError::Schema(format!("non-integer prime key '{}'", key)))?;
        if !crate::arith::is_prime(p) {
            return Err(FixtureError::Schema(format!("key {} is not prime", p)));
        }
        ap.insert(p, (val[0], val[1]));
    }
    // integrity: bad primes divide the level and cover its prime support
    for &b in &raw.bad {
        if raw.level as u64 % b != 0 {
            return Err(FixtureError::Integrity(format!(
                "bad prime {} does not divide level {}",
                b, raw.level
            )));
        }
    }
    let mut m = raw.level as u64;
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            if !raw.bad.contains(&q) {
                return Err(FixtureError::Integrity(format!(
                    "prime {} divides level {} but is not marked bad",
                    q, raw.level
                )));
            }
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 && !raw.bad.contains(&m) {
        return Err(FixtureError::Integrity(format!(
            "prime {} divides level {} but is not marked bad",
            m, raw.level
        )));
    }
    // integrity: entries at bad primes are forbidden, Weil disc respected
    let mut has_imaginary = false;
    for (&p, &(re, im)) in &ap {
        if raw.bad.contains(&p) {
            return Err(FixtureError::Integrity(format!(
                "trace listed at bad prime {} of level {}",
                p, raw.level
            )));
        }
        if re * re + im * im > 9 * (p * p) as i64 {
            return Err(FixtureError::Integrity(format!(
                "trace at p={} violates the Weil bound",
                p
            )));
        }
        has_imaginary |= im != 0;
    }
    // field tag vs entries
    match raw.field.as_str() {
        "Q(i)" => {
            if !has_imaginary {
                return Err(FixtureError::Integrity(
                    "field tagged Q(i) but every entry is rational".into(),
                ));
            }
        }
        "Q" => {
            if has_imaginary {
                return Err(FixtureError::Integrity(
                    "field tagged Q but an entry is imaginary".into(),
                ));
            }
        }
        other => {
            return Err(FixtureError::Integrity(format!("unsupported field tag '{}'", other)));
        }
    }
    Ok(FixtureTable { level: raw.level, field: raw.field, bad: raw.bad, ap })
}

#[derive(Debug, Clone, Deserialize)]
struct RawCurveFile {
    schema: u32,
    curves: Vec<RawCurve>,
}

#[derive(Debug, Clone, Deserialize)]
struct RawCurve {
    label: String,
    coeffs: [i64; 5],
    conductor: u64,
}

pub fn builtin_curves() -> Vec<CurveSpec> {
    parse_curves(include_str!("../../fixtures/curves.json")).expect("shipped curves are valid")
}

pub fn load_curves(path: &str) -> Result<Vec<CurveSpec>, FixtureError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FixtureError::Schema(format!("cannot read {}: {}", path, e)))?;
    parse_curves(&text)
}

pub fn parse_curves(text: &str) -> Result<Vec<CurveSpec>, FixtureError> {
    let raw: RawCurveFile =
        serde_json::from_str(text).map_err(|e| FixtureError::Schema(e.to_string()))?;
    if raw.schema != 1 {
        return Err(FixtureError::Schema(format!("unsupported schema version {}", raw.schema)));
    }
    let mut out = Vec::new();
    for rc in raw.curves {
        let spec = CurveSpec::new(&rc.label, rc.coeffs, rc.conductor);
        spec.validate().map_err(FixtureError::Integrity)?;
        out.push(spec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fixtures_parse_and_validate() {
        let tables = builtin_fixtures();
        assert_eq!(tables.len(), 3);
        let t128 = tables.iter().find(|t| t.level == 128).unwrap();
        assert_eq!(t128.trace(101), Some((-105, -100)));
        assert_eq!(t128.field, "Q(i)");
        let t205 = tables.iter().find(|t| t.level == 205).unwrap();
        assert_eq!(t205.trace(2), Some((-1, 0)));
        let t160 = tables.iter().find(|t| t.level == 160).unwrap();
        assert!(t160.is_bad_prime(5));
        assert_eq!(t160.trace(5), None);
    }

    #[test]
    fn shipped_curves_parse_and_validate() {
        let curves = builtin_curves();
        assert_eq!(curves.len(), 3);
        assert!(curves.iter().any(|c| c.conductor == 35));
        assert!(curves.iter().any(|c| c.conductor == 49));
        assert!(curves.iter().any(|c| c.conductor == 245));
    }

    #[test]
    fn schema_violations_detected() {
        assert!(matches!(parse_fixtures("{"), Err(FixtureError::Schema(_))));
        assert!(matches!(
            parse_fixtures(r#"{"schema":2,"level":7,"field":"Q","bad":[7],"ap":{}}"#),
            Err(FixtureError::Schema(_))
        ));
        assert!(matches!(
            parse_fixtures(r#"{"schema":1,"level":7,"field":"Q","bad":[7],"ap":{"4":[1,0]}}"#),
            Err(FixtureError::Schema(_))
        ));
    }

    #[test]
    fn integrity_violations_detected() {
        // bad prime not dividing the level
        assert!(matches!(
            parse_fixtures(r#"{"schema":1,"level":7,"field":"Q","bad":[3,7],"ap":{"2":[1,0]}}"#),
            Err(FixtureError::Integrity(_))
        ));
        // level prime missing from the bad set
        assert!(matches!(
            parse_fixtures(r#"{"schema":1,"level":14,"field":"Q","bad":[2],"ap":{"3":[1,0]}}"#),
            Err(FixtureError::Integrity(_))
        ));
        // Weil violation
        assert!(matches!(
            parse_fixtures(r#"{"schema":1,"level":7,"field":"Q","bad":[7],"ap":{"3":[99,0]}}"#),
            Err(FixtureError::Integrity(_))
        ));
        // field tag mismatch
        assert!(matches!(
            parse_fixtures(r#"{"schema":1,"level":7,"field":"Q(i)","bad":[7],"ap":{"3":[1,0]}}"#),
            Err(FixtureError::Integrity(_))
        ));
        // singular curve rejected
        assert!(matches!(
            parse_curves(r#"{"schema":1,"curves":[{"label":"x","coeffs":[0,0,0,0,0],"conductor":5}]}"#),
            Err(FixtureError::Integrity(_))
        ));
    }
}
