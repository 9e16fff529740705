//! Bernoulli numbers modulo `p`, the values `𝔷(k) = B_{p-k}/k`, Kummer
//! regularity, the irregularity index `i(p)`, `ð_p`, and the congruences
//! built on them.
//!
//! Convention: `t·eᵗ/(eᵗ − 1) = Σ B_n tⁿ/n!`, so `B_1 = +1/2`. Only even
//! indices enter the identities checked here, where both conventions agree.
//!
//! Three independent routes compute `B_n mod p`:
//!
//! * **half-sum**, for `n = p − k` with odd `k >= 3`:
//!   `B_{p−k} ≡ −k/(2ᵏ − 2) · Σ_{m=1}^{(p−1)/2} m^{−k}`. It comes from
//!   evaluating the Bernoulli polynomial at `1/2` and is `O(p)`, but
//!   degenerates when `p | 2^{k−1} − 1`;
//! * **series**: invert `(eᵗ − 1)/t` as a power series over `𝔽_p`, giving
//!   every `B_n`, `n <= p − 2`, in `O(p²)`;
//! * **exact**: the rational recurrence `Σ_{j<=m} C(m+1, j) B_j = 0`,
//!   reduced mod `p`. Used as ground truth for small `n`.
//!
//! Voronoi's congruence provides a fourth `O(p)` route that never
//! degenerates; it confirms irregular pairs and backs the half-sum route
//! when the series would be too slow.

use crate::congruence::{Congruence, Outcome, SkipKind};
use crate::error::{Error, Result};
use crate::harmonic::{ColorMap, Index, PrimeContext};
use crate::prime::{
    batch_inv_raw, inv_mod_u64, is_prime, mul_mod, pow_mod_u64, sub_mod, PrimeRange,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Largest prime for which `i(p)` is computed by the quadratic series
/// method unless the caller raises the cap.
pub const SERIES_CAP: u64 = 3000;

/// Exact rational Bernoulli numbers are tabulated up to this index.
pub const EXACT_LIMIT: u64 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BernoulliMethod {
    HalfSum,
    Series,
    ExactRational,
}

fn check_prime(p: u64, min: u64) -> Result<()> {
    if p < min || !is_prime(p) || p > u32::MAX as u64 {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be a prime with {min} <= p < 2^32"
        )));
    }
    Ok(())
}

fn exact_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limit = EXACT_LIMIT as usize;
        // Built with B_1 = -1/2 (the recurrence's natural convention), then
        // flipped.
        let mut b: Vec<BigRational> = Vec::with_capacity(limit + 1);
        b.push(BigRational::one());
        for m in 1..=limit {
            if m % 2 == 1 && m > 1 {
                b.push(BigRational::zero());
                continue;
            }
            // binom(m+1, j) for j = 0..m
            let mut binom = BigInt::one();
            let mut sum = BigRational::zero();
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    sum += bj * BigRational::from_integer(binom.clone());
                }
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            b.push(-sum / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b[1] = BigRational::new(BigInt::one(), BigInt::from(2));
        b
    })
}

/// Exact `B_n` as a reduced fraction, `n <= EXACT_LIMIT`.
pub fn bernoulli_exact(n: u64) -> Result<BigRational> {
    if n > EXACT_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "exact Bernoulli numbers are tabulated only up to n = {EXACT_LIMIT}"
        )));
    }
    Ok(exact_table()[n as usize].clone())
}

/// `x mod p` for a rational whose denominator is prime to `p`.
pub fn rational_mod_p(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().expect("reduced below p");
    let den = x.denom().mod_floor(&pb).to_u64().expect("reduced below p");
    inv_mod_u64(den, p).map(|d| mul_mod(num, d, p))
}

pub fn bernoulli_exact_mod_p(n: u64, p: u64) -> Result<u64> {
    let b = bernoulli_exact(n)?;
    rational_mod_p(&b, p).ok_or(Error::PoleAtVonStaudtClausen { n, p })
}

/// Half-sum route for even `n <= p − 3`. `Ok(None)` when the route
/// degenerates (`p | 2^{k−1} − 1` with `k = p − n`).
pub fn bernoulli_half_sum(n: u64, p: u64) -> Result<Option<u64>> {
    check_prime(p, 5)?;
    if n % 2 == 1 || n < 2 || n > p - 3 {
        return Err(Error::InvalidArgument(format!(
            "half-sum route needs an even n with 2 <= n <= p - 3, got n = {n}, p = {p}"
        )));
    }
    let k = p - n;
    let denom = sub_mod(pow_mod_u64(2, k, p), 2, p);
    if denom == 0 {
        return Ok(None);
    }
    let half = (p - 1) / 2;
    let sum = if k <= 16 {
        let ms: Vec<u64> = (1..=half).collect();
        let invs = batch_inv_raw(&ms, p)?;
        invs.iter().fold(0u64, |acc, &inv| {
            let mut t = inv;
            for _ in 1..k {
                t = mul_mod(t, inv, p);
            }
            (acc + t) % p
        })
    } else {
        (1..=half).fold(0u64, |acc, m| (acc + pow_mod_u64(m, n - 1, p)) % p)
    };
    let factor = mul_mod(p - k % p, inv_mod_u64(denom, p).expect("nonzero mod p"), p);
    Ok(Some(mul_mod(factor, sum, p)))
}

/// Series route: `B_0, …, B_{max_n}` mod `p` from the inverse of
/// `(eᵗ − 1)/t = Σ tⁱ/(i+1)!`. Requires `max_n <= p − 2`.
pub fn bernoulli_series(p: u64, max_n: u64) -> Result<Vec<u64>> {
    check_prime(p, 3)?;
    if max_n > p - 2 {
        return Err(Error::InvalidArgument(format!(
            "series route reaches only n <= p - 2 = {}",
            p - 2
        )));
    }
    let len = max_n as usize + 1;
    // fact[i] = i! for i <= max_n + 1 <= p - 1, all invertible
    let mut fact = vec![1u64; len + 1];
    for i in 1..=len {
        fact[i] = mul_mod(fact[i - 1], i as u64, p);
    }
    let mut inv_fact = vec![0u64; len + 1];
    inv_fact[len] = inv_mod_u64(fact[len], p).expect("factorials below p are units");
    for i in (1..=len).rev() {
        inv_fact[i - 1] = mul_mod(inv_fact[i], i as u64, p);
    }
    // a[i] = 1/(i+1)!
    let a: Vec<u64> = (0..len).map(|i| inv_fact[i + 1]).collect();
    let mut c = vec![0u64; len];
    c[0] = 1;
    for n in 1..len {
        if n % 2 == 1 && n > 1 {
            continue;
        }
        // c has nonzero entries only at 1 and even positions
        if n == 1 {
            c[1] = (p - a[1]) % p;
            continue;
        }
        let mut acc: u128 = 0;
        let mut j = 0;
        while j < n {
            acc += a[n - j] as u128 * c[j] as u128;
            j += 2;
        }
        acc += a[n - 1] as u128 * c[1] as u128;
        let s = (acc % p as u128) as u64;
        c[n] = (p - s) % p;
    }
    let mut b: Vec<u64> = (0..len).map(|n| mul_mod(fact[n], c[n], p)).collect();
    if len > 1 {
        b[1] = (b[1] + 1) % p;
    }
    Ok(b)
}

/// Voronoi's congruence: `(aⁿ − 1)·B_n ≡ n·a^{n−1} Σ_{m<p} m^{n−1}⌊ma/p⌋`,
/// for even `n` with `p − 1 ∤ n`, using the least `a >= 2` with `aⁿ ≢ 1`.
pub fn bernoulli_voronoi(n: u64, p: u64) -> Result<u64> {
    check_prime(p, 5)?;
    if n % 2 == 1 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Voronoi route needs an even n >= 2, got {n}"
        )));
    }
    if n % (p - 1) == 0 {
        return Err(Error::PoleAtVonStaudtClausen { n, p });
    }
    let a = (2..p)
        .find(|&a| pow_mod_u64(a, n, p) != 1)
        .expect("a primitive root exists");
    let e = (n - 1) % (p - 1);
    let mut sum = 0u64;
    for m in 1..p {
        let fl = m * a / p;
        if fl != 0 {
            sum = (sum + mul_mod(pow_mod_u64(m, e, p), fl % p, p)) % p;
        }
    }
    let rhs = mul_mod(mul_mod(n % p, pow_mod_u64(a, n - 1, p), p), sum, p);
    let denom = sub_mod(pow_mod_u64(a, n, p), 1, p);
    Ok(mul_mod(rhs, inv_mod_u64(denom, p).expect("a^n != 1"), p))
}

/// `B_n mod p` by the default route.
///
/// Even `n` with `p − 1 ∤ n` is reduced to `n' = n mod (p − 1)` through
/// Kummer's congruence `B_n/n ≡ B_{n'}/n'`; `B_{n'}` then comes from the
/// half-sum route, falling back to the series (for `p <= SERIES_CAP`) or to
/// Voronoi's congruence when the half-sum degenerates.
pub fn bernoulli_mod_p(n: u64, p: u64) -> Result<u64> {
    check_prime(p, 3)?;
    match n {
        0 => return Ok(1),
        1 => return Ok(inv_mod_u64(2, p).expect("p odd")),
        _ if n % 2 == 1 => return Ok(0),
        _ => {}
    }
    if n % (p - 1) == 0 {
        return Err(Error::PoleAtVonStaudtClausen { n, p });
    }
    let reduced = n % (p - 1);
    let base = match bernoulli_half_sum(reduced, p)? {
        Some(v) => v,
        None if p <= SERIES_CAP => bernoulli_series(p, reduced)?[reduced as usize],
        None => bernoulli_voronoi(reduced, p)?,
    };
    if reduced == n {
        return Ok(base);
    }
    let ratio = mul_mod(n % p, inv_mod_u64(reduced, p).expect("reduced < p"), p);
    Ok(mul_mod(base, ratio, p))
}

/// `B_n mod p` for a set of indices, all by one route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliTable {
    p: u64,
    method: BernoulliMethod,
    values: BTreeMap<u64, u64>,
}

impl BernoulliTable {
    pub fn build(
        p: u64,
        method: BernoulliMethod,
        ns: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        check_prime(p, 3)?;
        let ns: Vec<u64> = ns.into_iter().collect();
        if let Some(&n) = ns.iter().find(|&&n| n > 0 && n % (p - 1) == 0) {
            return Err(Error::PoleAtVonStaudtClausen { n, p });
        }
        let values = match method {
            BernoulliMethod::ExactRational => ns
                .iter()
                .map(|&n| Ok((n, bernoulli_exact_mod_p(n, p)?)))
                .collect::<Result<_>>()?,
            BernoulliMethod::Series => {
                let max = ns.iter().copied().max().unwrap_or(0);
                let all = bernoulli_series(p, max)?;
                ns.iter().map(|&n| (n, all[n as usize])).collect()
            }
            BernoulliMethod::HalfSum => ns
                .iter()
                .map(|&n| {
                    bernoulli_half_sum(n, p)?.map(|v| (n, v)).ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "half-sum route degenerates for n = {n} at p = {p}"
                        ))
                    })
                })
                .collect::<Result<_>>()?,
        };
        Ok(BernoulliTable { p, method, values })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn method(&self) -> BernoulliMethod {
        self.method
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        self.values.get(&n).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.values.iter().map(|(&n, &v)| (n, v))
    }
}

/// `𝔷(k) = B_{p−k}/k mod p`, for `2 <= k <= p − 2`.
pub fn frak_z(k: u64, p: u64) -> Result<u64> {
    check_prime(p, 5)?;
    if k < 2 || k > p - 2 {
        return Err(Error::InvalidArgument(format!(
            "𝔷(k) needs 2 <= k <= p - 2, got k = {k}, p = {p}"
        )));
    }
    if k % 2 == 0 {
        return Ok(0);
    }
    let b = bernoulli_mod_p(p - k, p)?;
    Ok(mul_mod(b, inv_mod_u64(k, p).expect("k < p"), p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrregularPair {
    pub p: u64,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irregularity {
    pub p: u64,
    pub pairs: Vec<IrregularPair>,
}

impl Irregularity {
    pub fn index(&self) -> usize {
        self.pairs.len()
    }
}

/// Confirms `p | B_n` by a route other than the series.
fn confirm_vanishing(n: u64, p: u64) -> Result<bool> {
    if let Some(v) = bernoulli_half_sum(n, p)? {
        return Ok(v == 0);
    }
    if n <= EXACT_LIMIT {
        return Ok(bernoulli_exact_mod_p(n, p)? == 0);
    }
    Ok(bernoulli_voronoi(n, p)? == 0)
}

/// All irregular pairs `(p, n)`, `2 <= n <= p − 3`, found by the series
/// route and each confirmed by a second route. Refuses `p > cap`.
pub fn irregularity_with_cap(p: u64, cap: u64) -> Result<Irregularity> {
    check_prime(p, 5)?;
    if p > cap {
        return Err(Error::InvalidArgument(format!(
            "p = {p} exceeds the series cap {cap}"
        )));
    }
    let b = bernoulli_series(p, p - 3)?;
    let mut pairs = Vec::new();
    for n in (2..=p - 3).step_by(2) {
        if b[n as usize] == 0 {
            if !confirm_vanishing(n, p)? {
                return Err(Error::Inconsistent(format!(
                    "series gives p | B_{n} at p = {p}, second route disagrees"
                )));
            }
            pairs.push(IrregularPair { p, n });
        }
    }
    Ok(Irregularity { p, pairs })
}

pub fn irregularity(p: u64) -> Result<Irregularity> {
    irregularity_with_cap(p, SERIES_CAP)
}

pub fn irregularity_index(p: u64) -> Result<usize> {
    Ok(irregularity(p)?.index())
}

/// Kummer's criterion: `p` divides none of `B_2, B_4, …, B_{p−3}`.
pub fn is_regular(p: u64) -> Result<bool> {
    Ok(irregularity(p)?.index() == 0)
}

/// The least odd `k >= 3` with `p ∤ B_{p−k}`, searching `k <= limit`.
/// `None` if every such `k` up to the limit vanishes.
pub fn eth_p_upto(p: u64, limit: u64) -> Result<Option<u64>> {
    check_prime(p, 5)?;
    let mut k = 3;
    while k <= limit.min(p - 2) {
        if bernoulli_mod_p(p - k, p)? != 0 {
            return Ok(Some(k));
        }
        k += 2;
    }
    Ok(None)
}

/// `ð_p`: the least odd `k >= 3` with `p ∤ B_{p−k}`.
pub fn eth_p(p: u64) -> Result<u64> {
    eth_p_upto(p, p)?.ok_or_else(|| Error::ScanExhausted {
        p,
        what: "every B_{p-k} with odd 3 <= k <= p - 2 vanishes".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EthBound {
    pub p: u64,
    pub eth: u64,
    pub irregularity: u64,
    /// `(p − 3)/2` for `p ≡ 1 (mod 4)`, `(p − 5)/2` for `p ≡ 3 (mod 4)`.
    pub case_bound: u64,
    pub trivial_ok: bool,
    pub case_ok: bool,
}

impl EthBound {
    pub fn holds(&self) -> bool {
        self.trivial_ok && self.case_ok
    }
}

/// Checks `ð_p <= 2·i(p) + 3` and the mod-4 case bound, `p >= 11`.
pub fn check_eth_bound(p: u64) -> Result<EthBound> {
    check_prime(p, 11)?;
    let eth = eth_p(p)?;
    let irregularity = irregularity_index(p)? as u64;
    let case_bound = if p % 4 == 1 { (p - 3) / 2 } else { (p - 5) / 2 };
    Ok(EthBound {
        p,
        eth,
        irregularity,
        case_bound,
        trivial_ok: eth <= 2 * irregularity + 3,
        case_ok: eth <= case_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfIndexRow {
    pub p: u64,
    pub p_mod_4: u64,
    /// `(p + 1)/2` when `p ≡ 3`, `(p − 1)/2` when `p ≡ 1 (mod 4)`.
    pub n: u64,
    pub vanishes: bool,
}

impl HalfIndexRow {
    /// Only the `p ≡ 3 (mod 4)` rows carry a proven non-vanishing claim.
    pub fn violates_cauchy(&self) -> bool {
        self.p_mod_4 == 3 && self.vanishes
    }
}

pub fn half_index_row(p: u64) -> Result<HalfIndexRow> {
    check_prime(p, 5)?;
    let n = if p % 4 == 3 { p.div_ceil(2) } else { p / 2 };
    Ok(HalfIndexRow {
        p,
        p_mod_4: p % 4,
        n,
        vanishes: bernoulli_mod_p(n, p)? == 0,
    })
}

/// Rows for every prime `p >= 5` in the window.
pub fn half_index_scan(range: &PrimeRange) -> Result<Vec<HalfIndexRow>> {
    range
        .primes()
        .into_iter()
        .filter(|&p| p >= 5)
        .map(half_index_row)
        .collect()
}

/// Primes of the window lying in every `I(k) = {p : p | B_{p−k}}`,
/// odd `3 <= k <= max_k`; equivalently `ð_p > max_k`.
pub fn eth_intersection(max_k: u64, range: &PrimeRange) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for p in range.primes().into_iter().filter(|&p| p >= 5) {
        if eth_p_upto(p, max_k)?.is_none() {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightWitness {
    pub weight: u32,
    /// `(k)` for odd weights, `(3, k − 3)` for even ones.
    pub parts: Vec<u32>,
    pub p: u64,
    /// `𝔷(k)` or `𝔷(k₁)·𝔷(k₂)` at the witness prime.
    pub value: u64,
}

/// Smallest prime `p <= bound` certifying a nonzero finite multiple zeta
/// value of weight `k`: `𝔷(k) ≢ 0` for odd `k`, `𝔷(3)𝔷(k − 3) ≢ 0` for even
/// `k >= 6`. Primes must exceed the largest part plus 2.
pub fn nonzero_witness_weight(k: u32, bound: u64) -> Result<Option<WeightWitness>> {
    if matches!(k, 0 | 1 | 2 | 4) {
        return Err(Error::InvalidWeight(k));
    }
    let parts = if k % 2 == 1 { vec![k] } else { vec![3, k - 3] };
    let largest = *parts.iter().max().expect("nonempty") as u64;
    let range = PrimeRange::new((largest + 3).max(5), bound.max(largest + 3))?;
    for p in range.primes() {
        if p > bound {
            break;
        }
        let value = parts.iter().try_fold(1u64, |acc, &part| {
            Ok::<_, Error>(mul_mod(acc, frak_z(part as u64, p)?, p))
        })?;
        if value != 0 {
            return Ok(Some(WeightWitness {
                weight: k,
                parts,
                p,
                value,
            }));
        }
    }
    Ok(None)
}

fn binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = mul_mod(num, (n - i) % p, p);
        den = mul_mod(den, (i + 1) % p, p);
    }
    mul_mod(num, inv_mod_u64(den, p).expect("k < p"), p)
}

/// `ζ_p(k₁, k₂) ≡ (−1)^{k₂} C(k₁+k₂, k₁) 𝔷(k₁+k₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vhz {
    pub k1: u32,
    pub k2: u32,
}

impl Congruence for Vhz {
    fn id(&self) -> String {
        format!("vhz-{}-{}", self.k1, self.k2)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![SkipKind::SmallPrime]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        let w = (self.k1 + self.k2) as u64;
        if p <= w + 2 {
            return Outcome::skip(SkipKind::SmallPrime, format!("p <= weight + 2 = {}", w + 2));
        }
        let index = Index::new(vec![self.k1, self.k2]).expect("positive parts");
        let lhs = ctx.zeta(&index);
        let z = frak_z(w, p).expect("p > weight + 2");
        let mut rhs = mul_mod(binomial_mod(w, self.k1 as u64, p), z, p);
        if self.k2 % 2 == 1 {
            rhs = (p - rhs) % p;
        }
        Outcome::compare(lhs, rhs)
    }
}

pub fn verify_vhz(k1: u32, k2: u32, range: &PrimeRange) -> crate::report::CongruenceReport {
    crate::congruence::verify(&Vhz { k1, k2 }, range)
}

/// Both level-12 displays for odd `k >= 3`:
/// `2ζ^{[2]}_{12}(k) ≡ (2^{−k} − 3^{−k} − 4^{−k} + 12^{−k})𝔷(k)` and
/// `2ζ^{[3]}_{12}(k) ≡ (3^{−k} − 4^{−k} − 6^{−k} + 12^{−k})𝔷(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Level12 {
    pub k: u32,
}

impl Level12 {
    /// `(lhs, rhs)` of both displays.
    pub fn sides(&self, ctx: &PrimeContext) -> Result<[(u64, u64); 2]> {
        let p = ctx.p();
        let k = self.k;
        let index = Index::new(vec![k])?;
        let z = frak_z(k as u64, p)?;
        let ninv = |a: u64| {
            let i = inv_mod_u64(a % p, p).expect("p coprime to 12");
            pow_mod_u64(i, k as u64, p)
        };
        let c2 = (ninv(2) + 2 * p - ninv(3) - ninv(4) + ninv(12)) % p;
        let c3 = (ninv(3) + 2 * p - ninv(4) - ninv(6) + ninv(12)) % p;
        let l2 = 2 * ctx.zeta_colormap(&index, &ColorMap::bracket(12, 1, 2)?)? % p;
        let l3 = 2 * ctx.zeta_colormap(&index, &ColorMap::bracket(12, 1, 3)?)? % p;
        Ok([(l2, mul_mod(c2, z, p)), (l3, mul_mod(c3, z, p))])
    }
}

impl Congruence for Level12 {
    fn id(&self) -> String {
        format!("level12-k{}", self.k)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![SkipKind::LevelSharesFactor, SkipKind::SmallPrime]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        if 12 % p == 0 {
            return Outcome::skip(SkipKind::LevelSharesFactor, "p divides 12");
        }
        if p <= self.k as u64 + 2 {
            return Outcome::skip(SkipKind::SmallPrime, format!("p <= k + 2 = {}", self.k + 2));
        }
        let sides = self.sides(ctx).expect("preconditions checked");
        sides
            .iter()
            .find(|(l, r)| l != r)
            .map(|&(lhs, rhs)| Outcome::Fail { lhs, rhs })
            .unwrap_or(Outcome::Pass)
    }
}

pub fn verify_level12(k: u32, range: &PrimeRange) -> Result<crate::report::CongruenceReport> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "level-12 identities need odd k >= 3, got {k}"
        )));
    }
    Ok(crate::congruence::verify(&Level12 { k }, range))
}

/// The two power-sum congruences behind the level-12 identities:
/// `(3^{p−2n} + 4^{p−2n} − 6^{p−2n} − 1)/(4n)·B_{2n} ≡ Σ_{p/6<m<p/4} m^{2n−1}`
/// and `(2^{p−2n} + 3^{p−2n} − 4^{p−2n} − 1)/(4n)·B_{2n} ≡ Σ_{p/4<m<p/3} m^{2n−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VandiverPowerSums {
    pub n: u64,
}

impl VandiverPowerSums {
    pub fn sides(&self, p: u64) -> Result<[(u64, u64); 2]> {
        let n2 = 2 * self.n;
        let b = bernoulli_mod_p(n2, p)?;
        // a^{p-2n} via Fermat, the exponent taken mod p - 1
        let e = (p as i128 - n2 as i128).rem_euclid(p as i128 - 1) as u64;
        let pw = |a: u64| pow_mod_u64(a, e, p);
        let inv4n = inv_mod_u64((4 * self.n) % p, p).ok_or(Error::SharedFactor {
            base: 4 * self.n,
            p,
        })?;
        let coef1 = (pw(3) + pw(4) + 2 * p - pw(6) - 1) % p;
        let coef2 = (pw(2) + pw(3) + 2 * p - pw(4) - 1) % p;
        let lhs1 = mul_mod(mul_mod(coef1, inv4n, p), b, p);
        let lhs2 = mul_mod(mul_mod(coef2, inv4n, p), b, p);
        let power_sum = |first: u64, last: u64| {
            (first..=last).fold(0u64, |acc, m| (acc + pow_mod_u64(m, n2 - 1, p)) % p)
        };
        let rhs1 = power_sum(p / 6 + 1, p / 4);
        let rhs2 = power_sum(p / 4 + 1, p / 3);
        Ok([(lhs1, rhs1), (lhs2, rhs2)])
    }
}

impl Congruence for VandiverPowerSums {
    fn id(&self) -> String {
        format!("vandiver-n{}", self.n)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![
            SkipKind::SmallPrime,
            SkipKind::VonStaudtClausen,
            SkipKind::CoefficientDenominator,
        ]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        if p < 5 {
            return Outcome::skip(SkipKind::SmallPrime, "p < 5");
        }
        if (2 * self.n) % (p - 1) == 0 {
            return Outcome::skip(
                SkipKind::VonStaudtClausen,
                format!("p - 1 divides {}", 2 * self.n),
            );
        }
        if (4 * self.n) % p == 0 {
            return Outcome::skip(
                SkipKind::CoefficientDenominator,
                format!("p divides 4n = {}", 4 * self.n),
            );
        }
        let sides = self.sides(p).expect("preconditions checked");
        sides
            .iter()
            .find(|(l, r)| l != r)
            .map(|&(lhs, rhs)| Outcome::Fail { lhs, rhs })
            .unwrap_or(Outcome::Pass)
    }
}

pub fn verify_vandiver_power_sums(n: u64, range: &PrimeRange) -> crate::report::CongruenceReport {
    crate::congruence::verify(&VandiverPowerSums { n }, range)
}

/// Sign-aware display of an exact Bernoulli number, e.g. `-691/2730`.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else if x.is_negative() {
        format!("-{}/{}", x.numer().abs(), x.denom())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
