use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{value} has no inverse modulo {modulus} (position {position})")]
    ZeroInverse {
        position: usize,
        value: u64,
        modulus: u64,
    },

    #[error("residues do not share one modulus ({expected} vs {found} at position {position})")]
    ModulusMismatch {
        position: usize,
        expected: u64,
        found: u64,
    },

    #[error("base {base} shares a factor with the prime {p}")]
    SharedFactor { base: u64, p: u64 },

    #[error("prime {p} divides the level {level}")]
    LevelSharesFactor { level: u64, p: u64 },

    #[error("color tuple of length {found} does not match index depth {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("B_{n} is not p-integral at p = {p} (p - 1 divides {n})")]
    PoleAtVonStaudtClausen { n: u64, p: u64 },

    #[error("scan exhausted at p = {p}: {what}")]
    ScanExhausted { p: u64, what: String },

    #[error("no nonzero finite multiple zeta value is expected in weight {0}")]
    InvalidWeight(u32),

    #[error("level mismatch: {0}")]
    LevelMismatch(String),

    #[error("empty prime range [{lo}, {hi}]")]
    EmptyRange { lo: u64, hi: u64 },

    #[error("independent computations disagree: {0}")]
    Inconsistent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("checkpoint fingerprint {found} does not match job {expected}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
