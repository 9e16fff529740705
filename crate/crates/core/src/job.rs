//! A fully validated unit of work for the command line: what to run, over
//! which primes, and where the result goes.

use crate::bernoulli::{
    self, check_eth_bound, eth_p, eth_p_upto, half_index_row, irregularity_with_cap,
    nonzero_witness_weight, Level12, VandiverPowerSums, Vhz,
};
use crate::congruence::{verify_battery_with, Congruence, VerifyOptions};
use crate::driver::{map_primes, CheckpointConfig, DriverOptions, ScanOutcome};
use crate::error::{Error, Result};
use crate::harmonic::{ColorMap, Index, PrimeContext};
use crate::prime::{gcd, PrimeRange};
use crate::quotient::{
    ell_p, fermat_quotient, is_wieferich_base, lenstra_bound, nonzero_witness_level, ASdi,
    Eisenstein, Lerch, LerchLog, LogAdditivity, Sdi,
};
use crate::relation::{
    self, broken_fixture, builtin_catalogue, parse_catalogue, parse_color_table, parse_named_color,
    ColoredTerm, Expression, Identity,
};
use crate::report::{
    short_hash, CongruenceReport, RangeSpec, TableReport, Violation, TOOL_VERSION,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Search,
    Stats,
    Compute,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Parameters shared by all targets; each target reads the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: Option<u64>,
    pub m: Option<u64>,
    pub k: Vec<u32>,
    pub index: Vec<String>,
    pub color: Vec<String>,
    pub base: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: Command,
    pub target: String,
    pub params: Params,
    pub pmin: Option<u64>,
    pub pmax: Option<u64>,
    pub chunk: Option<u64>,
    pub series_cap: u64,
    pub catalogue: Option<PathBuf>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub checkpoint: Option<PathBuf>,
    pub every: u64,
    pub strict_skips: bool,
    pub timings: bool,
    pub halt_after: Option<usize>,
}

impl JobSpec {
    pub fn new(command: Command, target: impl Into<String>) -> Self {
        JobSpec {
            command,
            target: target.into(),
            params: Params::default(),
            pmin: None,
            pmax: None,
            chunk: None,
            series_cap: bernoulli::SERIES_CAP,
            catalogue: None,
            threads: None,
            out: None,
            format: Format::Json,
            checkpoint: None,
            every: 10_000,
            strict_skips: false,
            timings: false,
            halt_after: None,
        }
    }
}

/// How a job ended, mapped onto process exit codes.
#[derive(Debug, PartialEq, Eq)]
pub enum JobError {
    /// Bad flags or parameters; nothing was computed.
    Usage(String),
    /// A computation failed in a way that indicates a bug or resource
    /// problem.
    Internal(String),
    /// Stopped on purpose after the requested number of checkpoint writes.
    Halted,
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Usage(_) => 2,
            JobError::Internal(_) => 3,
            JobError::Halted => 4,
        }
    }
}

impl From<Error> for JobError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::Parse(_)
            | Error::InvalidWeight(_)
            | Error::EmptyRange { .. }
            | Error::LevelMismatch(_)
            | Error::ArityMismatch { .. }
            | Error::FingerprintMismatch { .. }
            | Error::LevelSharesFactor { .. }
            | Error::SharedFactor { .. }
            | Error::PoleAtVonStaudtClausen { .. } => JobError::Usage(e.to_string()),
            _ => JobError::Internal(e.to_string()),
        }
    }
}

/// The serialized report plus whether it records any failure or violation.
#[derive(Debug)]
pub struct JobOutput {
    pub artifact: String,
    pub clean: bool,
}

impl JobOutput {
    pub fn exit_code(&self) -> i32 {
        if self.clean {
            0
        } else {
            1
        }
    }
}

type JobResult<T> = std::result::Result<T, JobError>;

fn usage<T>(msg: impl Into<String>) -> JobResult<T> {
    Err(JobError::Usage(msg.into()))
}

/// The part of a job that determines its result. Thread count, output
/// location and checkpoint cadence are excluded, so a run may be resumed
/// with different values for them.
#[derive(Serialize)]
struct FingerprintView<'a> {
    command: Command,
    target: &'a str,
    params: &'a Params,
    pmin: Option<u64>,
    pmax: Option<u64>,
    chunk: Option<u64>,
    series_cap: u64,
    catalogue: Option<String>,
    strict_skips: bool,
    tool_version: &'static str,
}

pub fn fingerprint(job: &JobSpec) -> JobResult<String> {
    let catalogue = match &job.catalogue {
        Some(path) => Some(short_hash(&read_file(path, "--catalogue")?)),
        None => None,
    };
    let view = FingerprintView {
        command: job.command,
        target: &job.target,
        params: &job.params,
        pmin: job.pmin,
        pmax: job.pmax,
        chunk: job.chunk,
        series_cap: job.series_cap,
        catalogue,
        strict_skips: job.strict_skips,
        tool_version: TOOL_VERSION,
    };
    Ok(short_hash(
        &serde_json::to_string(&view).expect("serializable"),
    ))
}

fn read_file(path: &PathBuf, flag: &str) -> JobResult<String> {
    std::fs::read_to_string(path)
        .or_else(|e| usage(format!("{flag}: cannot read {}: {e}", path.display())))
}

struct Ctx<'a> {
    job: &'a JobSpec,
    range: Option<PrimeRange>,
    driver: DriverOptions,
}

impl<'a> Ctx<'a> {
    fn build(job: &'a JobSpec) -> JobResult<Self> {
        if job.every == 0 {
            return usage("--every must be positive");
        }
        if job.threads == Some(0) {
            return usage("--threads must be positive");
        }
        if job.halt_after.is_some() && job.checkpoint.is_none() {
            return usage("--halt-after requires --checkpoint");
        }
        let range = match (job.pmin, job.pmax) {
            (None, None) => None,
            (lo, Some(hi)) => {
                let lo = lo.unwrap_or(2);
                let r = match job.chunk {
                    Some(0) => return usage("--chunk must be positive"),
                    Some(c) => PrimeRange::with_chunk(lo, hi, c),
                    None => PrimeRange::new(lo, hi),
                };
                Some(r.or_else(|_| usage(format!("--pmin {lo} exceeds --pmax {hi}")))?)
            }
            (Some(_), None) => return usage("--pmin given without --pmax"),
        };
        if let Some(r) = &range {
            if r.hi() > u32::MAX as u64 {
                return usage("--pmax must be below 2^32");
            }
        }
        let checkpoint = match &job.checkpoint {
            Some(path) => Some(CheckpointConfig {
                path: path.clone(),
                every: job.every,
                fingerprint: fingerprint(job)?,
                halt_after: job.halt_after,
            }),
            None => None,
        };
        Ok(Ctx {
            job,
            range,
            driver: DriverOptions {
                threads: job.threads,
                checkpoint,
            },
        })
    }

    fn range(&self) -> JobResult<PrimeRange> {
        self.range
            .ok_or_else(|| JobError::Usage(format!("target {} needs --pmax", self.job.target)))
    }

    fn p(&self) -> &Params {
        &self.job.params
    }

    fn n(&self, min: u64) -> JobResult<u64> {
        match self.p().n {
            Some(n) if n >= min => Ok(n),
            Some(n) => usage(format!("--N must be at least {min}, got {n}")),
            None => usage(format!("target {} needs --N", self.job.target)),
        }
    }

    fn m(&self, min: u64) -> JobResult<u64> {
        match self.p().m {
            Some(m) if m >= min => Ok(m),
            Some(m) => usage(format!("--M must be at least {min}, got {m}")),
            None => usage(format!("target {} needs --M", self.job.target)),
        }
    }

    fn base(&self) -> JobResult<u64> {
        match self.p().base {
            Some(b) if b >= 1 => Ok(b),
            Some(_) => usage("--base must be positive"),
            None => usage(format!("target {} needs --base", self.job.target)),
        }
    }

    fn ks(&self, count: usize) -> JobResult<Vec<u32>> {
        let k = &self.p().k;
        if k.len() != count {
            return usage(format!(
                "target {} needs --k with {count} value(s), got {}",
                self.job.target,
                k.len()
            ));
        }
        if k.contains(&0) {
            return usage("--k values must be positive");
        }
        Ok(k.clone())
    }

    fn index_at(&self, i: usize) -> JobResult<Index> {
        match self.p().index.get(i) {
            Some(s) => Index::parse(s).map_err(|e| JobError::Usage(format!("--index: {e}"))),
            None => usage(format!("target {} needs --index", self.job.target)),
        }
    }

    fn color_at(&self, i: usize, level: u64, arity: usize) -> JobResult<Option<ColorMap>> {
        let Some(spec) = self.p().color.get(i) else {
            return Ok(None);
        };
        let map = match spec.strip_prefix("table:") {
            Some(path) => {
                parse_color_table(&read_file(&PathBuf::from(path), "--color")?, level, arity)
            }
            None => parse_named_color(spec, level, arity),
        };
        map.map(Some)
            .map_err(|e| JobError::Usage(format!("--color: {e}")))
    }

    /// The colored term described by `--index`, `--N` and `--color` at
    /// position `i`; plain when no level is given.
    fn term_at(&self, i: usize) -> JobResult<ColoredTerm> {
        let index = self.index_at(i)?;
        let level = self.p().n.unwrap_or(1);
        if level == 0 {
            return usage("--N must be positive");
        }
        let color = match self.color_at(i, level, index.depth())? {
            Some(c) => c,
            None if level == 1 => ColorMap::trivial(index.depth()),
            None => {
                return usage(format!(
                    "target {} at level {level} needs --color",
                    self.job.target
                ))
            }
        };
        Ok(ColoredTerm::unit(index, color)?)
    }

    fn bracket_j(&self, level: u64) -> JobResult<u64> {
        match self.p().color.first() {
            None => Ok(0),
            Some(s) => match s.strip_prefix("bracket:").map(|j| j.trim().parse::<u64>()) {
                Some(Ok(j)) if j < level => Ok(j),
                _ => usage(format!(
                    "--color must be bracket:j with j < {level}, got {s:?}"
                )),
            },
        }
    }

    fn catalogue(&self) -> JobResult<Vec<Identity>> {
        match &self.job.catalogue {
            None => Ok(builtin_catalogue()),
            Some(path) => parse_catalogue(&read_file(path, "--catalogue")?)
                .map_err(|e| JobError::Usage(format!("--catalogue: {e}"))),
        }
    }

    fn table(
        &self,
        id: String,
        columns: &[&str],
        rows: Vec<Vec<u64>>,
        violations: Vec<Violation>,
        summary: BTreeMap<String, Value>,
        start: Instant,
    ) -> TableReport {
        let range = self
            .range
            .unwrap_or_else(|| PrimeRange::new(0, 0).expect("valid"));
        TableReport {
            spec_hash: crate::congruence::default_spec_hash(&id, &range),
            id,
            range: RangeSpec::from(&range),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            violations,
            summary,
            elapsed_ms: if self.job.timings {
                start.elapsed().as_millis() as u64
            } else {
                0
            },
            tool_version: TOOL_VERSION.into(),
        }
    }

    /// Runs `f` at every prime of the window, honoring threads and
    /// checkpoints.
    fn scan<T, F>(&self, f: F) -> JobResult<Vec<(u64, T)>>
    where
        T: Send + Serialize + serde::de::DeserializeOwned,
        F: Fn(u64) -> T + Sync,
    {
        match map_primes(&self.range()?, &self.driver, f)? {
            ScanOutcome::Complete(rows) => Ok(rows),
            ScanOutcome::Halted { .. } => Err(JobError::Halted),
        }
    }
}

/// Row produced at one prime: `None` when the prime is outside the
/// statistic's domain, otherwise the row and an optional violation.
type Row = std::result::Result<Option<(Vec<u64>, Option<String>)>, String>;

fn collect_rows(rows: Vec<(u64, Row)>) -> JobResult<(Vec<Vec<u64>>, Vec<Violation>)> {
    let mut out = Vec::new();
    let mut violations = Vec::new();
    for (p, row) in rows {
        match row.map_err(JobError::Internal)? {
            None => {}
            Some((r, v)) => {
                out.push(r);
                if let Some(message) = v {
                    violations.push(Violation { p, message });
                }
            }
        }
    }
    Ok((out, violations))
}

fn emit_congruence(reports: &[CongruenceReport], format: Format) -> JobResult<JobOutput> {
    let clean = reports.iter().all(CongruenceReport::is_clean);
    let artifact = match (reports, format) {
        ([one], Format::Json) => one.to_json(),
        ([one], Format::Csv) => one.to_csv()?,
        (many, Format::Json) => {
            let mut s = serde_json::to_string_pretty(many).expect("serializable");
            s.push('\n');
            s
        }
        (many, Format::Csv) => {
            let mut s = String::from("id,p,outcome,lhs,rhs,reason\n");
            for r in many {
                for line in r.to_csv()?.lines().skip(1) {
                    s.push_str(&csv_field(&r.id));
                    s.push(',');
                    s.push_str(line);
                    s.push('\n');
                }
            }
            s
        }
    };
    Ok(JobOutput { artifact, clean })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit_table(t: &TableReport, format: Format) -> JobResult<JobOutput> {
    let artifact = match format {
        Format::Json => t.to_json(),
        Format::Csv => t.to_csv()?,
    };
    Ok(JobOutput {
        artifact,
        clean: t.is_clean(),
    })
}

fn emit_expression(target: &str, e: &Expression, format: Format) -> JobResult<JobOutput> {
    if format == Format::Csv {
        return usage(format!(
            "compute {target} produces an expression; use --format json"
        ));
    }
    let doc = json!({ "target": target, "expression": e.to_string(), "terms": e.len() });
    Ok(JobOutput {
        artifact: format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).expect("serializable")
        ),
        clean: true,
    })
}

/// The congruence battery over the standard parameter sets.
pub fn standard_battery() -> Vec<Box<dyn Congruence>> {
    let mut v: Vec<Box<dyn Congruence>> = vec![Box::new(Eisenstein)];
    v.extend((1..=10).map(|n| Box::new(Sdi { n }) as Box<dyn Congruence>));
    v.extend((2..=10).map(|n| Box::new(Lerch { n }) as Box<dyn Congruence>));
    v.extend((1..=5).map(|n| Box::new(ASdi { n }) as Box<dyn Congruence>));
    v.extend((2..=6).map(|n| Box::new(LerchLog { n }) as Box<dyn Congruence>));
    v
}

fn verify_items(c: &Ctx) -> JobResult<Vec<Box<dyn Congruence>>> {
    let boxed = |x: Box<dyn Congruence>| Ok(vec![x]);
    match c.job.target.as_str() {
        "eisenstein" => boxed(Box::new(Eisenstein)),
        "sdi" => boxed(Box::new(Sdi { n: c.n(1)? })),
        "lerch" => boxed(Box::new(Lerch { n: c.n(2)? })),
        "a-sdi" => boxed(Box::new(ASdi { n: c.n(1)? })),
        "lerch-log" => boxed(Box::new(LerchLog { n: c.n(2)? })),
        "log-additivity" => {
            let (n, m) = (c.n(1)?, c.m(1)?);
            if n.checked_mul(m).is_none() {
                return usage("--N times --M overflows");
            }
            boxed(Box::new(LogAdditivity { n, m }))
        }
        "vhz" => {
            let k = c.ks(2)?;
            boxed(Box::new(Vhz { k1: k[0], k2: k[1] }))
        }
        "level12" => {
            let k = c.ks(1)?[0];
            if k < 3 || k % 2 == 0 {
                return usage(format!("--k must be odd and at least 3, got {k}"));
            }
            boxed(Box::new(Level12 { k }))
        }
        "vandiver" => boxed(Box::new(VandiverPowerSums {
            n: c.ks(1)?[0] as u64,
        })),
        "jsum" => {
            let level = c.n(1)?;
            let j = c.bracket_j(level)?;
            boxed(Box::new(relation::lemma_jsum(&c.index_at(0)?, level, j)?))
        }
        "reversal" => boxed(Box::new(relation::reversal_identity(&c.term_at(0)?))),
        "decomposition" => boxed(Box::new(relation::decomposition_identity(
            &c.index_at(0)?,
            c.n(1)?,
        )?)),
        "kmy" => boxed(Box::new(relation::kmy_identity(&c.index_at(0)?)?)),
        "levels" => {
            let t = c.term_at(0)?;
            boxed(Box::new(relation::levels_identity(&t, c.m(1)?)?))
        }
        "stuffle" => {
            if c.p().index.len() != 2 {
                return usage("stuffle needs --index twice");
            }
            let (a, b) = (c.term_at(0)?, c.term_at(1)?);
            boxed(Box::new(relation::stuffle_identity(&a, &b)?))
        }
        "battery" => Ok(standard_battery()),
        "broken-fixture" => boxed(Box::new(broken_fixture())),
        "catalogue" => Ok(c
            .catalogue()?
            .into_iter()
            .map(|i| Box::new(i) as Box<dyn Congruence>)
            .collect()),
        other => match c.catalogue()?.into_iter().find(|i| i.id_str() == other) {
            Some(i) => boxed(Box::new(i)),
            None => usage(format!("unknown verify target {other:?}")),
        },
    }
}

fn run_verify(c: &Ctx) -> JobResult<JobOutput> {
    let items = verify_items(c)?;
    let range = c.range()?;
    let refs: Vec<&dyn Congruence> = items.iter().map(|b| b.as_ref()).collect();
    let opts = VerifyOptions {
        driver: c.driver.clone(),
        strict_skips: c.job.strict_skips,
        record_timing: c.job.timings,
        spec_hash: None,
    };
    match verify_battery_with(&refs, &range, &opts)? {
        Some(reports) => emit_congruence(&reports, c.job.format),
        None => Err(JobError::Halted),
    }
}

fn cap_check(c: &Ctx) -> JobResult<()> {
    let hi = c.range()?.hi();
    if hi > c.job.series_cap {
        return usage(format!(
            "--pmax {hi} exceeds the series cap {}; raise --series-cap to go further",
            c.job.series_cap
        ));
    }
    Ok(())
}

fn run_stats(c: &Ctx) -> JobResult<JobOutput> {
    let start = Instant::now();
    let cap = c.job.series_cap;
    let mut summary = BTreeMap::new();
    let (id, columns, rows, violations): (&str, &[&str], _, _) = match c.job.target.as_str() {
        "ell" => {
            let raw = c.scan(|p| -> Row {
                if p == 2 {
                    return Ok(None);
                }
                let ell = ell_p(p).map_err(|e| e.to_string())?;
                let v = if ell >= p {
                    Some(format!("ℓ_p = {ell} is not below p"))
                } else if ell as f64 > lenstra_bound(p) {
                    Some(format!(
                        "ℓ_p = {ell} exceeds 4(ln p)² = {:.3}",
                        lenstra_bound(p)
                    ))
                } else {
                    None
                };
                Ok(Some((vec![p, ell], v)))
            })?;
            let (rows, violations) = collect_rows(raw)?;
            if let Some(best) = rows.iter().max_by_key(|r| (r[1], std::cmp::Reverse(r[0]))) {
                summary.insert("max_ell".into(), json!(best[1]));
                summary.insert("max_ell_at".into(), json!(best[0]));
            }
            ("stats-ell", &["p", "ell_p"][..], rows, violations)
        }
        "eth" => {
            let raw = c.scan(|p| -> Row {
                if p < 5 {
                    return Ok(None);
                }
                Ok(Some((vec![p, eth_p(p).map_err(|e| e.to_string())?], None)))
            })?;
            let (rows, violations) = collect_rows(raw)?;
            let above: Vec<u64> = rows.iter().filter(|r| r[1] > 3).map(|r| r[0]).collect();
            summary.insert("max_eth".into(), json!(rows.iter().map(|r| r[1]).max()));
            summary.insert("first_eth_above_3".into(), json!(above.first()));
            summary.insert("count_eth_above_3".into(), json!(above.len()));
            summary.insert(
                "count_eth_above_5".into(),
                json!(rows.iter().filter(|r| r[1] > 5).count()),
            );
            ("stats-eth", &["p", "eth_p"][..], rows, violations)
        }
        "irregularity" => {
            cap_check(c)?;
            let raw = c.scan(|p| -> Row {
                if p < 5 {
                    return Ok(None);
                }
                let irr = irregularity_with_cap(p, cap).map_err(|e| e.to_string())?;
                Ok(Some((vec![p, irr.index() as u64], None)))
            })?;
            let (rows, violations) = collect_rows(raw)?;
            summary.insert(
                "irregular_primes".into(),
                json!(rows.iter().filter(|r| r[1] > 0).count()),
            );
            summary.insert("max_index".into(), json!(rows.iter().map(|r| r[1]).max()));
            ("stats-irregularity", &["p", "i_p"][..], rows, violations)
        }
        "eth-bound" => {
            cap_check(c)?;
            let raw = c.scan(|p| -> Row {
                if p < 11 {
                    return Ok(None);
                }
                let b = check_eth_bound(p).map_err(|e| e.to_string())?;
                let v = (!b.holds()).then(|| {
                    format!(
                        "ð_p = {} against 2i(p) + 3 = {} and case bound {}",
                        b.eth,
                        2 * b.irregularity + 3,
                        b.case_bound
                    )
                });
                let row = vec![
                    p,
                    b.eth,
                    b.irregularity,
                    b.case_bound,
                    b.trivial_ok as u64,
                    b.case_ok as u64,
                ];
                Ok(Some((row, v)))
            })?;
            let (rows, violations) = collect_rows(raw)?;
            (
                "stats-eth-bound",
                &["p", "eth_p", "i_p", "case_bound", "trivial_ok", "case_ok"][..],
                rows,
                violations,
            )
        }
        "half-index" => {
            let raw = c.scan(|p| -> Row {
                if p < 5 {
                    return Ok(None);
                }
                let r = half_index_row(p).map_err(|e| e.to_string())?;
                let v = r
                    .violates_cauchy()
                    .then(|| format!("p ≡ 3 (mod 4) divides B_{}", r.n));
                Ok(Some((vec![p, r.p_mod_4, r.n, r.vanishes as u64], v)))
            })?;
            let (rows, violations) = collect_rows(raw)?;
            let one_mod_four: Vec<u64> = rows
                .iter()
                .filter(|r| r[1] == 1 && r[3] == 1)
                .map(|r| r[0])
                .collect();
            summary.insert("vanishing_one_mod_four".into(), json!(one_mod_four));
            (
                "stats-half-index",
                &["p", "p_mod_4", "n", "vanishes"][..],
                rows,
                violations,
            )
        }
        other => return usage(format!("unknown stats target {other:?}")),
    };
    let t = c.table(id.into(), columns, rows, violations, summary, start);
    emit_table(&t, c.job.format)
}

fn run_search(c: &Ctx) -> JobResult<JobOutput> {
    let start = Instant::now();
    let mut summary = BTreeMap::new();
    let (id, columns, rows): (String, &[&str], Vec<Vec<u64>>) = match c.job.target.as_str() {
        "wieferich" => {
            let base = c.base()?;
            let raw = c.scan(|p| -> Row {
                if gcd(base, p) != 1 {
                    return Ok(None);
                }
                let hit = is_wieferich_base(base, p).map_err(|e| e.to_string())?;
                Ok(hit.then(|| (vec![base, p], None)))
            })?;
            let (rows, _) = collect_rows(raw)?;
            summary.insert("count".into(), json!(rows.len()));
            (
                format!("search-wieferich-base{base}"),
                &["base", "p"][..],
                rows,
            )
        }
        "wieferich-intersection" => {
            let m = c.m(2)?;
            let raw = c.scan(|p| -> Row {
                if p == 2 {
                    return Ok(None);
                }
                let ell = ell_p(p).map_err(|e| e.to_string())?;
                Ok((ell > m).then(|| (vec![p, ell], None)))
            })?;
            let (rows, _) = collect_rows(raw)?;
            summary.insert("count".into(), json!(rows.len()));
            (
                format!("search-wieferich-intersection-M{m}"),
                &["p", "ell_p"][..],
                rows,
            )
        }
        "irregular" => {
            cap_check(c)?;
            let cap = c.job.series_cap;
            let raw = c.scan(|p| -> std::result::Result<Vec<u64>, String> {
                if p < 5 {
                    return Ok(Vec::new());
                }
                let irr = irregularity_with_cap(p, cap).map_err(|e| e.to_string())?;
                Ok(irr.pairs.iter().map(|x| x.n).collect())
            })?;
            let mut rows = Vec::new();
            for (p, ns) in raw {
                for n in ns.map_err(JobError::Internal)? {
                    rows.push(vec![p, n]);
                }
            }
            summary.insert("pairs".into(), json!(rows.len()));
            ("search-irregular".into(), &["p", "n"][..], rows)
        }
        "eth-intersection" => {
            let m = c.m(3)?;
            let raw = c.scan(|p| -> Row {
                if p < 5 {
                    return Ok(None);
                }
                let hit = eth_p_upto(p, m).map_err(|e| e.to_string())?.is_none();
                Ok(hit.then(|| (vec![p], None)))
            })?;
            let (rows, _) = collect_rows(raw)?;
            summary.insert("count".into(), json!(rows.len()));
            (format!("search-eth-intersection-M{m}"), &["p"][..], rows)
        }
        "witness-weight" => {
            let k = c.ks(1)?[0];
            let bound = c.range()?.hi();
            let w = nonzero_witness_weight(k, bound)?;
            summary.insert("found".into(), json!(w.is_some()));
            let rows = match &w {
                Some(w) => {
                    summary.insert("parts".into(), json!(w.parts));
                    vec![vec![w.weight as u64, w.p, w.value]]
                }
                None => Vec::new(),
            };
            (
                format!("search-witness-weight-k{k}"),
                &["weight", "p", "value"][..],
                rows,
            )
        }
        "witness-level" => {
            let level = c.n(2)?;
            let k = c.ks(1)?[0];
            let bound = c.range()?.hi();
            let w = nonzero_witness_level(level, k, bound)?;
            summary.insert("found".into(), json!(w.is_some()));
            let rows = match w {
                Some(w) => vec![vec![
                    w.level,
                    w.weight as u64,
                    w.p,
                    w.quotient,
                    w.j,
                    w.zeta,
                    w.power,
                ]],
                None => Vec::new(),
            };
            (
                format!("search-witness-level-N{level}-k{k}"),
                &["level", "weight", "p", "q_p", "j", "zeta", "power"][..],
                rows,
            )
        }
        other => return usage(format!("unknown search target {other:?}")),
    };
    let t = c.table(id, columns, rows, Vec::new(), summary, start);
    emit_table(&t, c.job.format)
}

fn run_compute(c: &Ctx) -> JobResult<JobOutput> {
    let start = Instant::now();
    let target = c.job.target.as_str();
    let format = c.job.format;
    match target {
        "decomposition" => {
            return emit_expression(
                target,
                &relation::decompose_level_n(&c.index_at(0)?, c.n(1)?)?,
                format,
            )
        }
        "kmy" => {
            return emit_expression(
                target,
                &relation::kmy_level2_split(&c.index_at(0)?)?,
                format,
            )
        }
        "reversal" => {
            let r = relation::reverse_transform(&c.term_at(0)?);
            let s = num_rational::BigRational::from_integer(r.sign.into());
            return emit_expression(target, &Expression::from(r.term).scaled(&s), format);
        }
        "stuffle" => {
            if c.p().index.len() != 2 {
                return usage("stuffle needs --index twice");
            }
            let s = relation::stuffle_product(&c.term_at(0)?, &c.term_at(1)?)?;
            return emit_expression(target, &s.to_expression(), format);
        }
        "levels" => {
            let s = relation::lift_to_level(&c.term_at(0)?, c.m(1)?)?;
            return emit_expression(target, &s.to_expression(), format);
        }
        "catalogue" => {
            if format == Format::Csv {
                return usage("compute catalogue produces JSON; use --format json");
            }
            return Ok(JobOutput {
                artifact: relation::catalogue_to_json(&c.catalogue()?),
                clean: true,
            });
        }
        _ => {}
    }

    type Eval<'f> = Box<dyn Fn(u64) -> Row + Sync + 'f>;
    let (columns, eval): (&[&str], Eval) = match target {
        "zeta" => {
            let t = c.term_at(0)?;
            (
                &["p", "value"],
                Box::new(move |p| {
                    if p == 2 || t.level() % p == 0 {
                        return Ok(None);
                    }
                    let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
                    let v = ctx
                        .zeta_colormap(&t.index, &t.color)
                        .map_err(|e| e.to_string())?;
                    Ok(Some((vec![p, v], None)))
                }),
            )
        }
        "interval" => {
            let index = c.index_at(0)?;
            let level = c.n(1)?;
            let j = c.bracket_j(level)?;
            (
                &["p", "value"],
                Box::new(move |p| {
                    if p == 2 || level % p == 0 {
                        return Ok(None);
                    }
                    let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
                    let v = ctx
                        .interval_sum(&index, level, j)
                        .map_err(|e| e.to_string())?;
                    Ok(Some((vec![p, v], None)))
                }),
            )
        }
        "bernoulli" => {
            let n = c.ks(1)?[0] as u64;
            (
                &["p", "value"],
                Box::new(move |p| {
                    if p == 2 || n % (p - 1) == 0 {
                        return Ok(None);
                    }
                    let v = bernoulli::bernoulli_mod_p(n, p).map_err(|e| e.to_string())?;
                    Ok(Some((vec![p, v], None)))
                }),
            )
        }
        "frak-z" => {
            let k = c.ks(1)?[0] as u64;
            if k < 2 {
                return usage("--k must be at least 2");
            }
            (
                &["p", "value"],
                Box::new(move |p| {
                    if p < 5 || k > p - 2 {
                        return Ok(None);
                    }
                    let v = bernoulli::frak_z(k, p).map_err(|e| e.to_string())?;
                    Ok(Some((vec![p, v], None)))
                }),
            )
        }
        "fermat-quotient" => {
            let base = c.base()?;
            (
                &["p", "value"],
                Box::new(move |p| {
                    if gcd(base, p) != 1 {
                        return Ok(None);
                    }
                    let v = fermat_quotient(base, p).map_err(|e| e.to_string())?;
                    Ok(Some((vec![p, v], None)))
                }),
            )
        }
        other => return usage(format!("unknown compute target {other:?}")),
    };
    let (rows, violations) = collect_rows(c.scan(eval)?)?;
    let t = c.table(
        format!("compute-{target}"),
        columns,
        rows,
        violations,
        BTreeMap::new(),
        start,
    );
    emit_table(&t, format)
}

/// Validates and executes a job.
pub fn execute(job: &JobSpec) -> std::result::Result<JobOutput, JobError> {
    let c = Ctx::build(job)?;
    match job.command {
        Command::Verify => run_verify(&c),
        Command::Search => run_search(&c),
        Command::Stats => run_stats(&c),
        Command::Compute => run_compute(&c),
    }
}

/// Executes a job, writes its artifact to `--out` or stdout, and returns
/// the process exit code.
pub fn run(job: &JobSpec) -> i32 {
    match execute(job) {
        Ok(out) => {
            let written = match &job.out {
                Some(path) => write_atomically(path, &out.artifact),
                None => {
                    use std::io::Write;
                    std::io::stdout()
                        .write_all(out.artifact.as_bytes())
                        .map_err(Error::from)
                }
            };
            match written {
                Ok(()) => out.exit_code(),
                Err(e) => {
                    eprintln!("fmzv: {e}");
                    3
                }
            }
        }
        Err(e) => {
            match &e {
                JobError::Usage(m) => eprintln!("fmzv: usage error: {m}"),
                JobError::Internal(m) => eprintln!("fmzv: internal error: {m}"),
                JobError::Halted => eprintln!("fmzv: halted after the requested checkpoint writes"),
            }
            e.exit_code()
        }
    }
}

fn write_atomically(path: &PathBuf, text: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
