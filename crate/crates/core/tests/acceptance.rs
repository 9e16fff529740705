//! Acceptance criteria 1–7. Each test prints one `criterion N: PASS|FAIL`
//! line (criterion 5 prints `INFO`) straight to stderr so the line shows up
//! even when test output is captured.

mod common;

use fmzv::bernoulli::{
    bernoulli_exact_mod_p, bernoulli_half_sum, bernoulli_series, check_eth_bound, eth_p,
    irregularity, Level12, Vhz,
};
use fmzv::congruence::{verify_battery_with, Congruence, VerifyOptions};
use fmzv::driver::{map_primes, DriverOptions};
use fmzv::harmonic::{ColorEntry, ColorMap, Index, PrimeContext};
use fmzv::job::standard_battery;
use fmzv::prime::{batch_inv, mod_inv, PrimeRange, Residue};
use fmzv::quotient::{ell_p, lenstra_bound, wieferich_intersection, wieferich_search};
use fmzv::relation::{
    builtin, decomposition_identity, kmy_identity, lemma_jsum, levels_identity, reversal_identity,
    ColoredTerm, Identity,
};
use fmzv::report::CongruenceReport;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::io::Write;
use std::process::Command;
use std::time::Instant;

fn announce(n: u32, verdict: &str, detail: &str) {
    let line = format!("criterion {n}: {verdict}: {detail}\n");
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn strict() -> VerifyOptions {
    VerifyOptions {
        strict_skips: true,
        ..Default::default()
    }
}

/// Runs a battery and returns (identities, prime checks passed, failing ids).
fn run(items: &[&dyn Congruence], lo: u64, hi: u64) -> (usize, u64, Vec<String>) {
    let range = PrimeRange::new(lo, hi).unwrap();
    let reports = verify_battery_with(items, &range, &strict())
        .unwrap()
        .unwrap();
    summarize(&reports)
}

fn summarize(reports: &[CongruenceReport]) -> (usize, u64, Vec<String>) {
    let bad = reports
        .iter()
        .filter(|r| !r.is_clean())
        .map(|r| format!("{} (first failure at p = {})", r.id, r.failed[0].p))
        .collect();
    (reports.len(), reports.iter().map(|r| r.passed).sum(), bad)
}

fn idx(v: &[u32]) -> Index {
    Index::new(v.to_vec()).unwrap()
}

/// A fixed color map mixing tuples and ⊠, for the colored reversal and
/// lifting instances.
fn mixed_color(level: u64, arity: usize, salt: u64) -> ColorMap {
    ColorMap::from_fn(level, arity, |alpha| {
        if (alpha + salt) % 5 == 4 {
            ColorEntry::Boxed
        } else {
            ColorEntry::Tuple(
                (0..arity as u64)
                    .map(|i| (alpha * (i + 1) + salt + i) % level)
                    .collect(),
            )
        }
    })
    .unwrap()
}

fn structural_identities() -> Vec<Identity> {
    let indices: Vec<Vec<u32>> = (1..=5).flat_map(common::compositions).collect();
    let mut out = Vec::new();
    for parts in &indices {
        let k = idx(parts);
        let depth = k.depth();
        out.push(reversal_identity(&ColoredTerm::plain(k.clone())));
        for level in [2u64, 3, 4, 6] {
            for j in 0..level {
                out.push(reversal_identity(
                    &ColoredTerm::bracket(k.clone(), level, j).unwrap(),
                ));
            }
            let t = ColoredTerm::unit(k.clone(), mixed_color(level, depth, level)).unwrap();
            out.push(reversal_identity(&t));
        }
        for level in [2u64, 3, 4] {
            out.push(decomposition_identity(&k, level).unwrap());
        }
        out.push(kmy_identity(&k).unwrap());
        for (n, m) in [(1u64, 2u64), (1, 3), (2, 4), (2, 6), (3, 6)] {
            let t = if n == 1 {
                ColoredTerm::plain(k.clone())
            } else {
                ColoredTerm::unit(k.clone(), mixed_color(n, depth, 1)).unwrap()
            };
            out.push(levels_identity(&t, m).unwrap());
        }
    }
    out
}

#[test]
fn criterion_1_congruence_battery() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut parts = Vec::new();

    let quotient = standard_battery();
    let refs: Vec<&dyn Congruence> = quotient.iter().map(|b| b.as_ref()).collect();
    let (n, passed, bad) = run(&refs, 5, 100_000);
    parts.push(format!("{n} quotient congruences ({passed} checks)"));
    failures.extend(bad);

    let vhz: Vec<Vhz> = (1..=6)
        .flat_map(|a| (1..=6).map(move |b| Vhz { k1: a, k2: b }))
        .collect();
    let refs: Vec<&dyn Congruence> = vhz.iter().map(|c| c as &dyn Congruence).collect();
    let (n, passed, bad) = run(&refs, 2, 10_000);
    parts.push(format!("{n} VHZ ({passed})"));
    failures.extend(bad);

    let level12: Vec<Level12> = [3, 5, 7].into_iter().map(|k| Level12 { k }).collect();
    let refs: Vec<&dyn Congruence> = level12.iter().map(|c| c as &dyn Congruence).collect();
    let (n, passed, bad) = run(&refs, 13, 10_000);
    parts.push(format!("{n} level-12 ({passed})"));
    failures.extend(bad);

    let mut jsum = Vec::new();
    for parts in (1..=4).flat_map(common::compositions) {
        for level in [2u64, 3, 4, 6] {
            for j in 0..level {
                jsum.push(lemma_jsum(&idx(&parts), level, j).unwrap());
            }
        }
    }
    let refs: Vec<&dyn Congruence> = jsum.iter().map(|c| c as &dyn Congruence).collect();
    let (n, passed, bad) = run(&refs, 2, 1000);
    parts.push(format!("{n} j-sum ({passed})"));
    failures.extend(bad);

    let structural = structural_identities();
    let refs: Vec<&dyn Congruence> = structural.iter().map(|c| c as &dyn Congruence).collect();
    let (n, passed, bad) = run(&refs, 2, 1000);
    parts.push(format!("{n} reversal/decomposition/KMY/levels ({passed})"));
    failures.extend(bad);

    let example = builtin("example-relation").unwrap();
    let (_, passed, bad) = run(&[&example], 11, 10_000);
    parts.push(format!("example relation ({passed})"));
    failures.extend(bad);

    let secs = start.elapsed().as_secs_f64();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let ok = failures.is_empty() && secs < 600.0;
    announce(
        1,
        verdict(ok),
        &format!(
            "{}; {secs:.1}s on {cores} core(s); failures: {failures:?}",
            parts.join(", ")
        ),
    );
    assert!(failures.is_empty(), "{failures:?}");
    assert!(secs < 600.0, "battery took {secs:.1}s");
}

#[test]
fn criterion_2_eth_is_three_below_16843() {
    let range = PrimeRange::new(5, 16843).unwrap();
    let rows = map_primes(&range, &DriverOptions::default(), |p| eth_p(p).unwrap())
        .unwrap()
        .complete()
        .unwrap();
    let exceptions: Vec<(u64, u64)> = rows.iter().copied().filter(|&(_, e)| e != 3).collect();
    let ok = exceptions == vec![(16843, 5)];
    announce(
        2,
        verdict(ok),
        &format!(
            "{} primes in [5, 16843]; values other than 3: {exceptions:?}",
            rows.len()
        ),
    );
    assert!(ok, "{exceptions:?}");
}

#[test]
fn criterion_3_wieferich() {
    let found = wieferich_search(2, &PrimeRange::new(2, 10_000).unwrap()).unwrap();
    let oracle = common::wieferich_primes(2, 10_000);
    let both = wieferich_intersection(3, &PrimeRange::new(3, 10_000).unwrap()).unwrap();
    let ok = found == vec![1093, 3511] && found == oracle && both.is_empty();
    announce(
        3,
        verdict(ok),
        &format!(
            "base 2 below 10^4: {found:?} (oracle {oracle:?}); bases 2 and 3 together: {both:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_oracle_equivalences() {
    let mut bern = 0usize;
    let mut bern_bad = Vec::new();
    for p in common::primes_between(5, 200) {
        let series = bernoulli_series(p, p - 3).unwrap();
        for n in (2..=p - 3).step_by(2) {
            let exact = bernoulli_exact_mod_p(n, p).unwrap();
            let half = bernoulli_half_sum(n, p).unwrap();
            bern += 1;
            if series[n as usize] != exact || half.is_some_and(|h| h != exact) {
                bern_bad.push((p, n));
            }
        }
    }

    let mut zeta = 0usize;
    let mut zeta_bad = Vec::new();
    for p in common::primes_between(3, 50) {
        let ctx = PrimeContext::new(p).unwrap();
        for parts in common::indices(4, 3) {
            zeta += 1;
            if ctx.zeta(&idx(&parts)) != common::zeta(&parts, p) {
                zeta_bad.push((p, parts));
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(2024);
    let primes = common::primes_between(3, 100_000);
    let mut inv = 0usize;
    let mut inv_bad = 0usize;
    while inv < 10_000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let xs: Vec<Residue> = (0..rng.gen_range(1..=100))
            .map(|_| Residue::new(rng.gen_range(1..p), p))
            .collect();
        let ys = batch_inv(&xs).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            inv += 1;
            if *y != mod_inv(*x).unwrap() {
                inv_bad += 1;
            }
        }
    }

    let ok = bern_bad.is_empty() && zeta_bad.is_empty() && inv_bad == 0;
    announce(
        4,
        verdict(ok),
        &format!(
            "Bernoulli routes {bern} pairs ({} mismatches); zeta vs enumeration {zeta} cases ({} mismatches); \
             batch inverse {inv} cases ({inv_bad} mismatches)",
            bern_bad.len(),
            zeta_bad.len()
        ),
    );
    assert!(ok, "{bern_bad:?} {zeta_bad:?} {inv_bad}");
}

#[test]
fn criterion_5_irregular_density() {
    let primes = common::primes_between(37, 3000);
    let irregular = primes
        .iter()
        .filter(|&&p| irregularity(p).unwrap().index() > 0)
        .count();
    let fraction = irregular as f64 / primes.len() as f64;
    let target = 1.0 - (-0.5f64).exp();
    let within = (fraction - 0.39).abs() <= 0.08;
    announce(
        5,
        "INFO",
        &format!(
            "{irregular} of {} primes in [37, 3000] irregular, fraction {fraction:.4}; \
             1 - e^(-1/2) = {target:.4}; within 0.39 ± 0.08: {within}",
            primes.len()
        ),
    );
}

#[test]
fn criterion_6_bounds() {
    let range = PrimeRange::new(3, 100_000).unwrap();
    let rows = map_primes(&range, &DriverOptions::default(), |p| ell_p(p).unwrap())
        .unwrap()
        .complete()
        .unwrap();
    let ell_bad: Vec<(u64, u64)> = rows
        .iter()
        .copied()
        .filter(|&(p, l)| l >= p || l as f64 > lenstra_bound(p))
        .collect();
    let max = rows.iter().max_by_key(|r| r.1).unwrap();

    let eth_rows = map_primes(
        &PrimeRange::new(11, 3000).unwrap(),
        &DriverOptions::default(),
        |p| check_eth_bound(p).unwrap().holds(),
    )
    .unwrap()
    .complete()
    .unwrap();
    let eth_bad: Vec<u64> = eth_rows.iter().filter(|r| !r.1).map(|r| r.0).collect();

    let ok = ell_bad.is_empty() && eth_bad.is_empty();
    announce(
        6,
        verdict(ok),
        &format!(
            "ℓ_p bounds on {} primes up to 10^5 (largest ℓ_p = {} at p = {}), violations {ell_bad:?}; \
             ð_p bounds on {} primes in [11, 3000], violations {eth_bad:?}",
            rows.len(),
            max.1,
            max.0,
            eth_rows.len()
        ),
    );
    assert!(ok);
}

fn fmzv(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fmzv"))
        .args(args)
        .env_remove("FMZV_THREADS")
        .output()
        .unwrap()
}

#[test]
fn criterion_7_determinism() {
    let jobs: [&[&str]; 3] = [
        &[
            "verify", "battery", "--pmin", "5", "--pmax", "30000", "--chunk", "1000",
        ],
        &[
            "stats", "eth", "--pmax", "20000", "--format", "csv", "--chunk", "700",
        ],
        &["search", "irregular", "--pmax", "3000", "--chunk", "100"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    for (i, job) in jobs.iter().enumerate() {
        let with = |extra: &[&str]| {
            let mut a = job.to_vec();
            a.extend_from_slice(extra);
            fmzv(&a)
        };
        let one = with(&["--threads", "1"]);
        let eight = with(&["--threads", "8"]);
        let ck = dir.path().join(format!("job{i}.ckpt"));
        let ck = ck.to_str().unwrap();
        let halted = with(&[
            "--threads",
            "3",
            "--checkpoint",
            ck,
            "--every",
            "100",
            "--halt-after",
            "2",
        ]);
        let resumed = with(&["--threads", "8", "--checkpoint", ck, "--every", "100"]);
        let name = format!("{} {}", job[0], job[1]);
        if one.status.code() != Some(0) || one.stdout.is_empty() {
            mismatches.push(format!(
                "{name}: reference run exited {:?}",
                one.status.code()
            ));
        }
        if one.stdout != eight.stdout {
            mismatches.push(format!("{name}: 1 vs 8 threads"));
        }
        if halted.status.code() != Some(4) {
            mismatches.push(format!(
                "{name}: interrupted run exited {:?}",
                halted.status.code()
            ));
        }
        if one.stdout != resumed.stdout {
            mismatches.push(format!("{name}: resumed run"));
        }
    }
    let ok = mismatches.is_empty();
    announce(
        7,
        verdict(ok),
        &format!("{} jobs compared across 1 thread, 8 threads and interrupt-and-resume; differences: {mismatches:?}", jobs.len()),
    );
    assert!(ok);
}
