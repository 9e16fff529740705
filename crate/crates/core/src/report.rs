//! Serialized results: per-identity congruence reports and prime-statistic
//! tables, in JSON and CSV.

use crate::error::{Error, Result};
use crate::prime::{sieve_primes, PrimeRange};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub lo: u64,
    pub hi: u64,
}

impl From<&PrimeRange> for RangeSpec {
    fn from(r: &PrimeRange) -> Self {
        RangeSpec {
            lo: r.lo(),
            hi: r.hi(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub p: u64,
    pub lhs: Option<u64>,
    pub rhs: Option<u64>,
    /// Set when a skip outside the identity's declared preconditions was
    /// promoted to a failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub p: u64,
    pub reason: String,
}

/// Verification outcome of one identity over one prime window.
/// Every prime of the window is counted exactly once, as passed, failed or
/// skipped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub id: String,
    pub range: RangeSpec,
    pub passed: u64,
    pub failed: Vec<Failure>,
    pub skipped: Vec<Skipped>,
    pub elapsed_ms: u64,
    pub tool_version: String,
    pub spec_hash: String,
}

impl CongruenceReport {
    pub fn is_clean(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.passed + self.failed.len() as u64 + self.skipped.len() as u64
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per prime of the window: `p,outcome,lhs,rhs,reason`.
    pub fn to_csv(&self) -> Result<String> {
        let failed: HashMap<u64, &Failure> = self.failed.iter().map(|f| (f.p, f)).collect();
        let skipped: HashMap<u64, &Skipped> = self.skipped.iter().map(|s| (s.p, s)).collect();
        let range = PrimeRange::new(self.range.lo, self.range.hi)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["p", "outcome", "lhs", "rhs", "reason"])
            .map_err(csv_err)?;
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in sieve_primes(&range) {
            let row = if let Some(f) = failed.get(&p) {
                [
                    p.to_string(),
                    "fail".into(),
                    opt(f.lhs),
                    opt(f.rhs),
                    f.reason.clone().unwrap_or_default(),
                ]
            } else if let Some(s) = skipped.get(&p) {
                [
                    p.to_string(),
                    "skip".into(),
                    String::new(),
                    String::new(),
                    s.reason.clone(),
                ]
            } else {
                [
                    p.to_string(),
                    "pass".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]
            };
            w.write_record(&row).map_err(csv_err)?;
        }
        finish_csv(w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub p: u64,
    pub message: String,
}

/// A per-prime statistic or search result: integer rows under named
/// columns, plus any violated assertions and a free-form summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub id: String,
    pub range: RangeSpec,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<u64>>,
    pub violations: Vec<Violation>,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub elapsed_ms: u64,
    pub tool_version: String,
    pub spec_hash: String,
}

impl TableReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(u64::to_string))
                .map_err(csv_err)?;
        }
        finish_csv(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Hex SHA-256 of `text`, shortened to 16 hex digits.
pub fn short_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
