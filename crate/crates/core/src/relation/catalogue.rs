//! On-disk identity catalogue, schema `fmzv-catalogue/1`.
//!
//! ```json
//! {
//!   "schema": "fmzv-catalogue/1",
//!   "identities": [
//!     {
//!       "id": "lerch-log-N3",
//!       "level": 3,
//!       "lhs": [ { "coef": "1", "factors": [ { "log": 3 } ] } ],
//!       "rhs": [
//!         { "coef": "1", "factors": [ { "zeta": { "index": "1", "color": "bracket:1" } } ] },
//!         { "coef": "2", "factors": [ { "zeta": { "index": "1", "color": "bracket:2" } } ] }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! A term is a rational coefficient (`"3"`, `"-4/3"`) times a product of
//! factors. Factors are `zeta` (index, color, optional level), `frak_z`
//! (weight), `log` (base) and `interval` (index, optional level, `j`).
//! Colors are `"plain"`, `"bracket:j"`, `"uniform:a,b,…"`, or a table from
//! units to tuples, e.g. `{"1": "0,1", "2": "x"}` where `x` is `⊠`.
//! An omitted level defaults to the identity's level. An optional `skips`
//! list (`"small_prime"`, `"level_shares_factor"`, `"base_shares_factor"`,
//! `"coefficient_denominator"`, …) fixes the precondition set used by
//! strict verification; without it the set is inferred from the terms.

use super::identity::Identity;
use super::term::{format_coefficient, Atom, Expression};
use crate::congruence::SkipKind;
use crate::error::{Error, Result};
use crate::harmonic::{ColorEntry, ColorMap, Index};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

pub const SCHEMA: &str = "fmzv-catalogue/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogueFile {
    pub schema: String,
    pub identities: Vec<IdentityRecord>,
}

fn default_level() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityRecord {
    pub id: String,
    #[serde(default = "default_level")]
    pub level: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub lhs: Vec<TermRecord>,
    pub rhs: Vec<TermRecord>,
    /// Precondition set for strict verification; inferred when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skips: Option<Vec<SkipKind>>,
}

fn default_coef() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    #[serde(default = "default_coef")]
    pub coef: String,
    #[serde(default)]
    pub factors: Vec<FactorRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorRecord {
    Zeta {
        index: String,
        #[serde(default = "ColorRecord::plain")]
        color: ColorRecord,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<u64>,
    },
    FrakZ(u32),
    Log(u64),
    Interval {
        index: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<u64>,
        j: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColorRecord {
    Named(String),
    Table(BTreeMap<String, String>),
}

impl ColorRecord {
    fn plain() -> Self {
        ColorRecord::Named("plain".into())
    }

    /// Builds the color map for an index of depth `arity` at `level`.
    pub fn resolve(&self, level: u64, arity: usize) -> Result<ColorMap> {
        match self {
            ColorRecord::Named(s) => parse_named_color(s, level, arity),
            ColorRecord::Table(t) => {
                let mut table = BTreeMap::new();
                for (k, v) in t {
                    let alpha = k
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad unit {k:?} in color table")))?;
                    table.insert(alpha % level, ColorEntry::parse(v)?);
                }
                ColorMap::new(level, arity, table)
            }
        }
    }

    pub fn from_map(color: &ColorMap) -> Self {
        if color.level() == 1
            && color
                .iter()
                .all(|(_, e)| e == &ColorEntry::Tuple(vec![0; color.arity()]))
        {
            return ColorRecord::plain();
        }
        if let Some(spec) = color.bracket_spec() {
            return ColorRecord::Named(spec);
        }
        ColorRecord::Table(
            color
                .iter()
                .map(|(a, e)| (a.to_string(), e.to_string()))
                .collect(),
        )
    }
}

/// `plain`, `bracket:j` or `uniform:a,b,…`.
pub fn parse_named_color(s: &str, level: u64, arity: usize) -> Result<ColorMap> {
    let s = s.trim();
    if s == "plain" {
        if level != 1 {
            return Err(Error::Parse(format!(
                "color \"plain\" needs level 1, got {level}"
            )));
        }
        return Ok(ColorMap::trivial(arity));
    }
    if let Some(j) = s.strip_prefix("bracket:") {
        let j = j
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("bad bracket index in {s:?}")))?;
        return ColorMap::bracket(level, arity, j);
    }
    if let Some(t) = s.strip_prefix("uniform:") {
        return match ColorEntry::parse(t)? {
            ColorEntry::Tuple(tuple) if tuple.len() == arity => ColorMap::uniform(level, tuple),
            ColorEntry::Tuple(tuple) => Err(Error::ArityMismatch {
                expected: arity,
                found: tuple.len(),
            }),
            ColorEntry::Boxed => ColorMap::boxed(level, arity),
        };
    }
    Err(Error::Parse(format!(
        "unknown color {s:?}; expected plain, bracket:j, uniform:a,b,… or a table"
    )))
}

fn parse_coefficient(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad coefficient {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

impl FactorRecord {
    fn to_atom(&self, identity_level: u64) -> Result<Atom> {
        match self {
            FactorRecord::Zeta {
                index,
                color,
                level,
            } => {
                let index = Index::parse(index)?;
                let color = color.resolve(level.unwrap_or(identity_level), index.depth())?;
                Atom::zeta(index, color)
            }
            FactorRecord::FrakZ(k) => Atom::frak_z(*k),
            FactorRecord::Log(n) => Atom::log(*n),
            FactorRecord::Interval { index, level, j } => {
                Atom::interval(Index::parse(index)?, level.unwrap_or(identity_level), *j)
            }
        }
    }

    fn from_atom(a: &Atom, identity_level: u64) -> Self {
        let differs = |l: u64| (l != identity_level).then_some(l);
        match a {
            Atom::Zeta { index, color } => FactorRecord::Zeta {
                index: index.to_list(),
                color: ColorRecord::from_map(color),
                level: differs(color.level()),
            },
            Atom::FrakZ(k) => FactorRecord::FrakZ(*k),
            Atom::Log(n) => FactorRecord::Log(*n),
            Atom::Interval { index, level, j } => FactorRecord::Interval {
                index: index.to_list(),
                level: differs(*level),
                j: *j,
            },
        }
    }
}

fn side(terms: &[TermRecord], level: u64) -> Result<Expression> {
    let mut e = Expression::zero();
    for t in terms {
        let atoms = t
            .factors
            .iter()
            .map(|f| f.to_atom(level))
            .collect::<Result<Vec<_>>>()?;
        e.push(parse_coefficient(&t.coef)?, atoms);
    }
    Ok(e)
}

fn side_records(e: &Expression, level: u64) -> Vec<TermRecord> {
    e.monomials()
        .map(|(c, f)| TermRecord {
            coef: format_coefficient(c),
            factors: f
                .iter()
                .map(|a| FactorRecord::from_atom(a, level))
                .collect(),
        })
        .collect()
}

impl IdentityRecord {
    pub fn to_identity(&self) -> Result<Identity> {
        let lhs = side(&self.lhs, self.level)?;
        let rhs = side(&self.rhs, self.level)?;
        let mut identity = Identity::with_level(self.id.clone(), self.level, lhs, rhs)?;
        if let Some(d) = &self.description {
            identity = identity.described(d.clone());
        }
        if let Some(k) = &self.skips {
            identity = identity.with_skips(k.clone());
        }
        Ok(identity)
    }

    pub fn from_identity(i: &Identity) -> Self {
        IdentityRecord {
            id: i.id_str().to_string(),
            level: i.level(),
            description: i.description().map(str::to_string),
            lhs: side_records(i.lhs(), i.level()),
            rhs: side_records(i.rhs(), i.level()),
            skips: i.explicit_skips().map(<[SkipKind]>::to_vec),
        }
    }
}

/// Parses a catalogue document and builds its identities.
pub fn parse_catalogue(json: &str) -> Result<Vec<Identity>> {
    let file: CatalogueFile = serde_json::from_str(json)?;
    if file.schema != SCHEMA {
        return Err(Error::Parse(format!(
            "unsupported catalogue schema {:?}, expected {SCHEMA:?}",
            file.schema
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    file.identities
        .iter()
        .map(|r| {
            if !seen.insert(r.id.clone()) {
                return Err(Error::Parse(format!("duplicate identity id {:?}", r.id)));
            }
            r.to_identity()
        })
        .collect()
}

pub fn catalogue_to_json(identities: &[Identity]) -> String {
    let file = CatalogueFile {
        schema: SCHEMA.into(),
        identities: identities
            .iter()
            .map(IdentityRecord::from_identity)
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("catalogue serializes");
    s.push('\n');
    s
}

/// A color table file for the command line: a JSON object from units to
/// tuples.
pub fn parse_color_table(json: &str, level: u64, arity: usize) -> Result<ColorMap> {
    let table: BTreeMap<String, String> = serde_json::from_str(json)?;
    ColorRecord::Table(table).resolve(level, arity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::identity::builtin_catalogue;

    #[test]
    fn builtin_round_trip() {
        let cat = builtin_catalogue();
        let json = catalogue_to_json(&cat);
        let back = parse_catalogue(&json).unwrap();
        assert_eq!(back, cat);
    }

    #[test]
    fn doc_example_parses() {
        let json = r#"{
          "schema": "fmzv-catalogue/1",
          "identities": [{
            "id": "lerch-log-N3", "level": 3,
            "lhs": [ { "factors": [ { "log": 3 } ] } ],
            "rhs": [
              { "coef": "1", "factors": [ { "zeta": { "index": "1", "color": "bracket:1" } } ] },
              { "coef": "2", "factors": [ { "zeta": { "index": "1", "color": "bracket:2" } } ] }
            ]
          }]
        }"#;
        let ids = parse_catalogue(json).unwrap();
        assert_eq!(ids.len(), 1);
        let r = crate::relation::verify_formal_identity(
            &ids[0],
            &crate::prime::PrimeRange::new(3, 500).unwrap(),
        );
        assert!(r.is_clean());
    }

    #[test]
    fn tables_and_errors() {
        let m = parse_color_table(r#"{"1": "0,1", "3": "x"}"#, 4, 2).unwrap();
        assert_eq!(m.entry(3), Some(&ColorEntry::Boxed));
        assert!(parse_color_table(r#"{"1": "0,1"}"#, 4, 2).is_err());
        assert!(parse_named_color("plain", 2, 1).is_err());
        assert!(parse_named_color("stripes", 2, 1).is_err());
        assert!(parse_catalogue(r#"{"schema": "other", "identities": []}"#).is_err());
        assert!(parse_coefficient("1/0").is_err());
        assert_eq!(
            parse_coefficient("-4/6").unwrap(),
            BigRational::new(BigInt::from(-2), BigInt::from(3))
        );
    }

    #[test]
    fn declared_level_mismatch() {
        let json = r#"{"schema": "fmzv-catalogue/1", "identities": [{
            "id": "bad", "level": 3,
            "lhs": [ { "factors": [ { "zeta": { "index": "1", "color": "bracket:1", "level": 2 } } ] } ],
            "rhs": [] }]}"#;
        assert!(matches!(
            parse_catalogue(json),
            Err(Error::LevelMismatch(_))
        ));
    }
}
