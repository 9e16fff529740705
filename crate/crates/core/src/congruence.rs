//! Per-prime congruence checks and their aggregation into reports.

use crate::driver::{run_scan, DriverOptions, Scan, ScanOutcome};
use crate::error::Result;
use crate::harmonic::PrimeContext;
use crate::prime::PrimeRange;
use crate::report::{short_hash, CongruenceReport, Failure, RangeSpec, Skipped, TOOL_VERSION};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipKind {
    /// `p = 2`; every identity here lives on odd primes.
    EvenPrime,
    /// `p` divides the level `N` of a colored sum.
    LevelSharesFactor,
    /// `p` divides an integer base such as the `N` in `q_p(N)`.
    BaseSharesFactor,
    /// `p <= weight + 2`, or below an identity's stated lower bound.
    SmallPrime,
    /// A rational coefficient has a denominator divisible by `p`.
    CoefficientDenominator,
    /// `p - 1` divides a Bernoulli index.
    VonStaudtClausen,
    /// A prime too large for the word-sized tables.
    TooLarge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkipReason {
    pub kind: SkipKind,
    pub detail: String,
}

impl SkipReason {
    pub fn new(kind: SkipKind, detail: impl Into<String>) -> Self {
        SkipReason {
            kind,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail { lhs: u64, rhs: u64 },
    Skip(SkipReason),
}

impl Outcome {
    pub fn compare(lhs: u64, rhs: u64) -> Outcome {
        if lhs == rhs {
            Outcome::Pass
        } else {
            Outcome::Fail { lhs, rhs }
        }
    }

    pub fn skip(kind: SkipKind, detail: impl Into<String>) -> Outcome {
        Outcome::Skip(SkipReason::new(kind, detail))
    }
}

/// An identity between two families of residues, checked one prime at a
/// time.
pub trait Congruence: Sync {
    fn id(&self) -> String;

    /// Skip kinds that follow from the identity's own preconditions.
    /// [`SkipKind::EvenPrime`] is always allowed.
    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![
            SkipKind::LevelSharesFactor,
            SkipKind::BaseSharesFactor,
            SkipKind::SmallPrime,
            SkipKind::CoefficientDenominator,
            SkipKind::VonStaudtClausen,
        ]
    }

    /// Compares both sides at the prime of `ctx`.
    fn check(&self, ctx: &PrimeContext) -> Outcome;
}

impl<C: Congruence + ?Sized> Congruence for &C {
    fn id(&self) -> String {
        (**self).id()
    }
    fn declared_skips(&self) -> Vec<SkipKind> {
        (**self).declared_skips()
    }
    fn check(&self, ctx: &PrimeContext) -> Outcome {
        (**self).check(ctx)
    }
}

impl<C: Congruence + ?Sized> Congruence for Box<C> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn declared_skips(&self) -> Vec<SkipKind> {
        (**self).declared_skips()
    }
    fn check(&self, ctx: &PrimeContext) -> Outcome {
        (**self).check(ctx)
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub driver: DriverOptions,
    /// Promote skips outside the declared precondition set to failures.
    pub strict_skips: bool,
    /// Record wall time in `elapsed_ms` (otherwise 0, which keeps reports
    /// byte-reproducible).
    pub record_timing: bool,
    /// Overrides the default `spec_hash` (a hash of id and window).
    pub spec_hash: Option<String>,
}

/// Running totals for one identity, in prime order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportAcc {
    pub passed: u64,
    pub failed: Vec<Failure>,
    pub skipped: Vec<Skipped>,
}

impl ReportAcc {
    fn absorb(&mut self, p: u64, outcome: Outcome, allowed: &[SkipKind], strict: bool) {
        match outcome {
            Outcome::Pass => self.passed += 1,
            Outcome::Fail { lhs, rhs } => self.failed.push(Failure {
                p,
                lhs: Some(lhs),
                rhs: Some(rhs),
                reason: None,
            }),
            Outcome::Skip(reason) => {
                if strict && reason.kind != SkipKind::EvenPrime && !allowed.contains(&reason.kind) {
                    self.failed.push(Failure {
                        p,
                        lhs: None,
                        rhs: None,
                        reason: Some(format!("unexpected skip: {reason}")),
                    });
                } else {
                    self.skipped.push(Skipped {
                        p,
                        reason: reason.to_string(),
                    });
                }
            }
        }
    }

    pub fn into_report(
        self,
        id: String,
        range: &PrimeRange,
        elapsed_ms: u64,
        spec_hash: String,
    ) -> CongruenceReport {
        CongruenceReport {
            id,
            range: RangeSpec::from(range),
            passed: self.passed,
            failed: self.failed,
            skipped: self.skipped,
            elapsed_ms,
            tool_version: TOOL_VERSION.to_string(),
            spec_hash,
        }
    }
}

fn outcome_at<C: Congruence + ?Sized>(c: &C, p: u64, ctx: Option<&PrimeContext>) -> Outcome {
    match ctx {
        Some(ctx) => c.check(ctx),
        None if p == 2 => Outcome::skip(SkipKind::EvenPrime, "p = 2"),
        None => Outcome::skip(SkipKind::TooLarge, format!("p = {p} exceeds 2^32")),
    }
}

struct Battery<'a> {
    items: &'a [&'a dyn Congruence],
    allowed: Vec<Vec<SkipKind>>,
    strict: bool,
}

impl Scan for Battery<'_> {
    type Item = Vec<Outcome>;
    type Acc = Vec<ReportAcc>;

    fn visit(&self, p: u64) -> Vec<Outcome> {
        let ctx = PrimeContext::new(p).ok();
        self.items
            .iter()
            .map(|c| outcome_at(*c, p, ctx.as_ref()))
            .collect()
    }

    fn absorb(&self, acc: &mut Vec<ReportAcc>, p: u64, item: Vec<Outcome>) {
        if acc.len() < self.items.len() {
            acc.resize_with(self.items.len(), ReportAcc::default);
        }
        for ((slot, outcome), allowed) in acc.iter_mut().zip(item).zip(&self.allowed) {
            slot.absorb(p, outcome, allowed, self.strict);
        }
    }
}

pub fn default_spec_hash(id: &str, range: &PrimeRange) -> String {
    short_hash(&format!("{id}|{}|{}", range.lo(), range.hi()))
}

/// Verifies several identities in one pass over the window; each prime's
/// inverse table is built once and shared by all of them.
pub fn verify_battery_with(
    items: &[&dyn Congruence],
    range: &PrimeRange,
    opts: &VerifyOptions,
) -> Result<Option<Vec<CongruenceReport>>> {
    let start = Instant::now();
    let battery = Battery {
        items,
        allowed: items.iter().map(|c| c.declared_skips()).collect(),
        strict: opts.strict_skips,
    };
    let accs = match run_scan(&battery, range, &opts.driver)? {
        ScanOutcome::Complete(mut accs) => {
            accs.resize_with(items.len(), ReportAcc::default);
            accs
        }
        ScanOutcome::Halted { .. } => return Ok(None),
    };
    let elapsed = if opts.record_timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(Some(
        items
            .iter()
            .zip(accs)
            .map(|(c, acc)| {
                let id = c.id();
                let hash = opts
                    .spec_hash
                    .clone()
                    .unwrap_or_else(|| default_spec_hash(&id, range));
                acc.into_report(id, range, elapsed, hash)
            })
            .collect(),
    ))
}

pub fn verify_battery(items: &[&dyn Congruence], range: &PrimeRange) -> Vec<CongruenceReport> {
    verify_battery_with(items, range, &VerifyOptions::default())
        .expect("no checkpoint configured")
        .expect("no halt configured")
}

/// Verifies one identity over the window with default options.
pub fn verify<C: Congruence>(c: &C, range: &PrimeRange) -> CongruenceReport {
    verify_battery(&[c as &dyn Congruence], range)
        .pop()
        .expect("one report per identity")
}

/// Single-identity variant honoring checkpoints, thread count and
/// strictness. Returns `None` if the run halted at a checkpoint.
pub fn verify_with<C: Congruence>(
    c: &C,
    range: &PrimeRange,
    opts: &VerifyOptions,
) -> Result<Option<CongruenceReport>> {
    Ok(verify_battery_with(&[c as &dyn Congruence], range, opts)?
        .map(|mut v| v.pop().expect("one report")))
}
