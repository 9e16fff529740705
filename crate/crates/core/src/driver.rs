//! Chunked parallel execution over a prime window with an ordered reduction
//! and optional resumable checkpoints.
//!
//! The window is cut into sub-ranges of `chunk` integers. Sub-ranges are
//! processed in waves: workers sieve and visit their sub-range in parallel,
//! then a single reducer absorbs results strictly in prime order. Because
//! absorption order never depends on scheduling, the final accumulator is
//! the same for any thread count and for any resume point.

use crate::error::{Error, Result};
use crate::prime::{sieve_primes, PrimeRange};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A pure per-prime computation with an order-sensitive accumulator.
pub trait Scan: Sync {
    type Item: Send;
    type Acc: Default + Send + Serialize + DeserializeOwned;

    fn visit(&self, p: u64) -> Self::Item;
    fn absorb(&self, acc: &mut Self::Acc, p: u64, item: Self::Item);
}

#[derive(Clone, Debug)]
pub struct CheckpointConfig {
    pub path: PathBuf,
    /// Write after at least this many primes since the previous write.
    pub every: u64,
    pub fingerprint: String,
    /// Stop (as if killed) after this many checkpoint writes.
    pub halt_after: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct DriverOptions {
    /// `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub checkpoint: Option<CheckpointConfig>,
}

#[derive(Serialize, Deserialize)]
pub struct Checkpoint<A> {
    pub fingerprint: String,
    pub last_prime: Option<u64>,
    pub processed: u64,
    pub partial: A,
}

impl<A: DeserializeOwned> Checkpoint<A> {
    pub fn load(path: &Path) -> Result<Option<Self>> {
        match std::fs::read_to_string(path) {
            Ok(s) => Ok(Some(serde_json::from_str(&s)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

impl<A: Serialize> Checkpoint<A> {
    /// Writes next to `path` and renames into place.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        std::fs::write(&tmp, serde_json::to_vec(self)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

pub enum ScanOutcome<A> {
    Complete(A),
    Halted { last_prime: Option<u64> },
}

impl<A> ScanOutcome<A> {
    pub fn complete(self) -> Option<A> {
        match self {
            ScanOutcome::Complete(a) => Some(a),
            ScanOutcome::Halted { .. } => None,
        }
    }
}

pub fn run_scan<S: Scan>(
    scan: &S,
    range: &PrimeRange,
    opts: &DriverOptions,
) -> Result<ScanOutcome<S::Acc>> {
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Io(e.to_string()))?;
            pool.install(|| run_in_pool(scan, range, opts))
        }
        None => run_in_pool(scan, range, opts),
    }
}

/// Convenience for scans without checkpoints.
pub fn collect<S: Scan>(scan: &S, range: &PrimeRange) -> S::Acc {
    match run_in_pool(scan, range, &DriverOptions::default()) {
        Ok(ScanOutcome::Complete(acc)) => acc,
        _ => unreachable!("no checkpointing configured"),
    }
}

struct MapPrimes<F> {
    f: F,
}

impl<T, F> Scan for MapPrimes<F>
where
    T: Send + Serialize + DeserializeOwned,
    F: Fn(u64) -> T + Sync,
{
    type Item = T;
    type Acc = Vec<(u64, T)>;

    fn visit(&self, p: u64) -> T {
        (self.f)(p)
    }

    fn absorb(&self, acc: &mut Vec<(u64, T)>, p: u64, item: T) {
        acc.push((p, item));
    }
}

/// Evaluates `f` at every prime of the window; rows come back in prime
/// order.
pub fn map_primes<T, F>(
    range: &PrimeRange,
    opts: &DriverOptions,
    f: F,
) -> Result<ScanOutcome<Vec<(u64, T)>>>
where
    T: Send + Serialize + DeserializeOwned,
    F: Fn(u64) -> T + Sync,
{
    run_scan(&MapPrimes { f }, range, opts)
}

fn run_in_pool<S: Scan>(
    scan: &S,
    range: &PrimeRange,
    opts: &DriverOptions,
) -> Result<ScanOutcome<S::Acc>> {
    let mut acc = S::Acc::default();
    let mut last_prime = None;
    let mut processed = 0u64;

    if let Some(cfg) = &opts.checkpoint {
        if let Some(cp) = Checkpoint::<S::Acc>::load(&cfg.path)? {
            if cp.fingerprint != cfg.fingerprint {
                return Err(Error::FingerprintMismatch {
                    expected: cfg.fingerprint.clone(),
                    found: cp.fingerprint,
                });
            }
            acc = cp.partial;
            last_prime = cp.last_prime;
            processed = cp.processed;
        }
    }

    let remaining = match last_prime {
        Some(p) => range.after(p),
        None => Some(*range),
    };
    let subranges: Vec<PrimeRange> = remaining
        .map(|r| r.subranges().collect())
        .unwrap_or_default();
    let wave = rayon::current_num_threads().max(1) * 2;

    let mut since_write = 0u64;
    let mut writes = 0usize;
    let waves = subranges.len().div_ceil(wave);
    for (wave_no, batch) in subranges.chunks(wave).enumerate() {
        let results: Vec<Vec<(u64, S::Item)>> = batch
            .par_iter()
            .map(|sub| {
                sieve_primes(sub)
                    .into_iter()
                    .map(|p| (p, scan.visit(p)))
                    .collect()
            })
            .collect();
        for (p, item) in results.into_iter().flatten() {
            scan.absorb(&mut acc, p, item);
            last_prime = Some(p);
            processed += 1;
            since_write += 1;
        }
        if let Some(cfg) = &opts.checkpoint {
            if since_write >= cfg.every && wave_no + 1 < waves {
                Checkpoint {
                    fingerprint: cfg.fingerprint.clone(),
                    last_prime,
                    processed,
                    partial: &acc,
                }
                .store(&cfg.path)?;
                since_write = 0;
                writes += 1;
                if cfg.halt_after.is_some_and(|h| writes >= h) {
                    return Ok(ScanOutcome::Halted { last_prime });
                }
            }
        }
    }

    if let Some(cfg) = &opts.checkpoint {
        Checkpoint {
            fingerprint: cfg.fingerprint.clone(),
            last_prime,
            processed,
            partial: &acc,
        }
        .store(&cfg.path)?;
    }
    Ok(ScanOutcome::Complete(acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct SumOfPrimes;

    impl Scan for SumOfPrimes {
        type Item = u64;
        type Acc = Vec<u64>;
        fn visit(&self, p: u64) -> u64 {
            p * p % 1_000_003
        }
        fn absorb(&self, acc: &mut Vec<u64>, _p: u64, item: u64) {
            acc.push(item);
        }
    }

    fn expected(range: &PrimeRange) -> Vec<u64> {
        sieve_primes(range)
            .into_iter()
            .map(|p| p * p % 1_000_003)
            .collect()
    }

    #[test]
    fn order_is_independent_of_threads() {
        let range = PrimeRange::with_chunk(1, 50_000, 997).unwrap();
        for threads in [1, 3, 8] {
            let opts = DriverOptions {
                threads: Some(threads),
                checkpoint: None,
            };
            let acc = run_scan(&SumOfPrimes, &range, &opts)
                .unwrap()
                .complete()
                .unwrap();
            assert_eq!(acc, expected(&range));
        }
    }

    #[test]
    fn halt_and_resume_matches_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let range = PrimeRange::with_chunk(1, 20_000, 500).unwrap();
        let cfg = |halt| CheckpointConfig {
            path: path.clone(),
            every: 100,
            fingerprint: "job".into(),
            halt_after: halt,
        };
        let halted = run_scan(
            &SumOfPrimes,
            &range,
            &DriverOptions {
                threads: Some(2),
                checkpoint: Some(cfg(Some(2))),
            },
        )
        .unwrap();
        assert!(matches!(
            halted,
            ScanOutcome::Halted {
                last_prime: Some(_)
            }
        ));
        let resumed = run_scan(
            &SumOfPrimes,
            &range,
            &DriverOptions {
                threads: Some(4),
                checkpoint: Some(cfg(None)),
            },
        )
        .unwrap()
        .complete()
        .unwrap();
        assert_eq!(resumed, expected(&range));
    }

    #[test]
    fn mismatched_fingerprint_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        Checkpoint {
            fingerprint: "other".to_string(),
            last_prime: Some(7),
            processed: 4,
            partial: vec![1u64, 2, 3, 4],
        }
        .store(&path)
        .unwrap();
        let range = PrimeRange::new(1, 100).unwrap();
        let res = run_scan(
            &SumOfPrimes,
            &range,
            &DriverOptions {
                threads: Some(1),
                checkpoint: Some(CheckpointConfig {
                    path,
                    every: 10,
                    fingerprint: "job".into(),
                    halt_after: None,
                }),
            },
        );
        assert!(matches!(res, Err(Error::FingerprintMismatch { .. })));
    }

    #[test]
    fn large_interval_writes_once_at_the_end() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let range = PrimeRange::with_chunk(1, 5_000, 100).unwrap();
        let acc = run_scan(
            &SumOfPrimes,
            &range,
            &DriverOptions {
                threads: Some(1),
                checkpoint: Some(CheckpointConfig {
                    path: path.clone(),
                    every: 1_000_000,
                    fingerprint: "job".into(),
                    halt_after: Some(1),
                }),
            },
        )
        .unwrap()
        .complete()
        .expect("no intermediate write, so no halt");
        let cp = Checkpoint::<Vec<u64>>::load(&path).unwrap().unwrap();
        assert_eq!(cp.partial, acc);
        assert_eq!(cp.last_prime, Some(4999));
    }
}
