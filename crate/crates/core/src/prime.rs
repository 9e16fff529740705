//! Prime generation and word-sized modular arithmetic.
//!
//! Residues modulo a prime `p` (or `p²` for Wieferich-type checks) are kept in
//! a `u64`; products go through `u128` whenever the modulus exceeds 32 bits.
//! The sieve is segmented and stores odd numbers only, so enumerating
//! `[lo, hi]` allocates `O(√hi + segment)` rather than `O(hi)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An integer reduced modulo an explicit modulus.
///
/// The modulus is either an odd prime `p` or, for results of
/// [`pow_mod_p2`], its square. Arithmetic between residues of different
/// moduli is a logic error and panics in debug builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: u64) -> Self {
        let m = modulus as i128;
        Residue {
            value: (value as i128).rem_euclid(m) as u64,
            modulus,
        }
    }

    pub fn one(modulus: u64) -> Self {
        Residue::new(1, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue {
            value: add_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue {
            value: sub_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Residue {
        Residue {
            value: sub_mod(0, self.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a.wrapping_sub(b).wrapping_add(m)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// `base^exp mod m` by square-and-multiply on raw words.
pub fn pow_mod_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, or `None`
/// when `gcd(a, m) != 1`.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn pow_mod(a: Residue, e: u64) -> Residue {
    Residue {
        value: pow_mod_u64(a.value, e, a.modulus),
        modulus: a.modulus,
    }
}

pub fn mod_inv(a: Residue) -> Result<Residue> {
    inv_mod_u64(a.value, a.modulus)
        .map(|value| Residue {
            value,
            modulus: a.modulus,
        })
        .ok_or(Error::ZeroInverse {
            position: 0,
            value: a.value,
            modulus: a.modulus,
        })
}

/// Inverts every entry with a single modular inversion (prefix products,
/// one inverse, then a backward sweep).
pub fn batch_inv(values: &[Residue]) -> Result<Vec<Residue>> {
    let Some(first) = values.first() else {
        return Ok(Vec::new());
    };
    let modulus = first.modulus;
    if let Some((position, r)) = values
        .iter()
        .enumerate()
        .find(|(_, r)| r.modulus != modulus)
    {
        return Err(Error::ModulusMismatch {
            position,
            expected: modulus,
            found: r.modulus,
        });
    }
    let raw: Vec<u64> = values.iter().map(|r| r.value).collect();
    Ok(batch_inv_raw(&raw, modulus)?
        .into_iter()
        .map(|value| Residue { value, modulus })
        .collect())
}

/// Raw-word form of [`batch_inv`]. Values must already be reduced.
pub fn batch_inv_raw(values: &[u64], modulus: u64) -> Result<Vec<u64>> {
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 1u64 % modulus;
    for (position, &v) in values.iter().enumerate() {
        if v % modulus == 0 {
            return Err(Error::ZeroInverse {
                position,
                value: v,
                modulus,
            });
        }
        prefix.push(acc);
        acc = mul_mod(acc, v, modulus);
    }
    let mut inv_acc = inv_mod_u64(acc, modulus).ok_or_else(|| {
        // Only reachable for composite moduli: find the first non-unit.
        let position = values
            .iter()
            .position(|&v| inv_mod_u64(v, modulus).is_none())
            .unwrap_or(0);
        Error::ZeroInverse {
            position,
            value: values[position],
            modulus,
        }
    })?;
    let mut out = vec![0u64; values.len()];
    for i in (0..values.len()).rev() {
        out[i] = mul_mod(inv_acc, prefix[i], modulus);
        inv_acc = mul_mod(inv_acc, values[i], modulus);
    }
    Ok(out)
}

/// Table `t` with `t[m] = m⁻¹ mod p` for `1 <= m < p` and `t[0] = 0`,
/// built with one batch inversion. Requires `p < 2³²`.
pub fn inverse_table(p: u64) -> Vec<u32> {
    assert!(
        p >= 2 && p <= u32::MAX as u64,
        "inverse table needs 2 <= p < 2^32"
    );
    let n = p as usize;
    let mut prefix = vec![0u32; n];
    let mut acc = 1u64;
    for (m, slot) in prefix.iter_mut().enumerate().skip(1) {
        *slot = acc as u32;
        acc = acc * m as u64 % p;
    }
    // acc = (p-1)! ≡ -1 (Wilson), but invert generically.
    let mut inv_acc = inv_mod_u64(acc, p).expect("p must be prime");
    for m in (1..n).rev() {
        let pre = prefix[m] as u64;
        prefix[m] = (inv_acc * pre % p) as u32;
        inv_acc = inv_acc * m as u64 % p;
    }
    prefix
}

/// `n^e mod p²`, always through 128-bit products.
pub fn pow_mod_p2(n: u64, e: u64, p: u64) -> Result<Residue> {
    if n % p == 0 {
        return Err(Error::SharedFactor { base: n, p });
    }
    let m = (p as u128 * p as u128) as u64;
    assert!(
        (p as u128) * (p as u128) <= u64::MAX as u128,
        "p² must fit in 64 bits"
    );
    let mut result: u128 = 1 % m as u128;
    let mut b = (n % m) as u128;
    let mut exp = e;
    let mm = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % mm;
        }
        b = b * b % mm;
        exp >>= 1;
    }
    Ok(Residue {
        value: result as u64,
        modulus: m,
    })
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_wide(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_wide(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result: u128 = 1;
    let mut b = base as u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    result as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A closed window `[lo, hi]` of integers searched for primes, with the
/// granularity (in integers, not primes) used to partition work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRange {
    lo: u64,
    hi: u64,
    chunk: u64,
}

pub const DEFAULT_CHUNK: u64 = 1 << 14;

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        Self::with_chunk(lo, hi, DEFAULT_CHUNK)
    }

    pub fn with_chunk(lo: u64, hi: u64, chunk: u64) -> Result<Self> {
        if hi < lo {
            return Err(Error::EmptyRange { lo, hi });
        }
        if chunk == 0 {
            return Err(Error::InvalidArgument("chunk must be positive".into()));
        }
        Ok(PrimeRange { lo, hi, chunk })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn chunk(&self) -> u64 {
        self.chunk
    }

    /// Same window, starting just after `p` (used when resuming).
    pub fn after(&self, p: u64) -> Option<PrimeRange> {
        let lo = p.checked_add(1)?.max(self.lo);
        (lo <= self.hi).then_some(PrimeRange {
            lo,
            hi: self.hi,
            chunk: self.chunk,
        })
    }

    /// Consecutive sub-windows of width `chunk` covering the range in order.
    pub fn subranges(&self) -> impl Iterator<Item = PrimeRange> + '_ {
        let mut start = Some(self.lo);
        std::iter::from_fn(move || {
            let lo = start?;
            let hi = lo.saturating_add(self.chunk - 1).min(self.hi);
            start = if hi >= self.hi { None } else { Some(hi + 1) };
            Some(PrimeRange {
                lo,
                hi,
                chunk: self.chunk,
            })
        })
    }

    pub fn primes(&self) -> Vec<u64> {
        sieve_primes(self)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n <= self.hi
    }
}

const SEGMENT_ODDS: u64 = 1 << 16;

fn small_primes_upto(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // odd-only: index i stands for 2i+1
    let size = (limit / 2 + 1) as usize;
    let mut composite = vec![false; size];
    let mut primes = vec![2];
    let mut i = 1usize;
    while i < size {
        if !composite[i] {
            let q = 2 * i as u64 + 1;
            if q > limit {
                break;
            }
            primes.push(q);
            let mut j = (q * q / 2) as usize;
            while j < size {
                composite[j] = true;
                j += q as usize;
            }
        }
        i += 1;
    }
    primes
}

/// All primes in `[lo, hi]`, increasing, via a segmented odd-only sieve.
pub fn sieve_primes(range: &PrimeRange) -> Vec<u64> {
    let (lo, hi) = (range.lo, range.hi);
    let mut out = Vec::new();
    if hi < 2 {
        return out;
    }
    if lo <= 2 {
        out.push(2);
    }
    let base = small_primes_upto(isqrt(hi));
    // first odd >= max(lo, 3)
    let mut seg_lo = lo.max(3) | 1;
    let mut marks = vec![false; SEGMENT_ODDS as usize];
    while seg_lo <= hi {
        let seg_hi = seg_lo.saturating_add(2 * (SEGMENT_ODDS - 1)).min(hi);
        let count = ((seg_hi - seg_lo) / 2 + 1) as usize;
        marks[..count].iter_mut().for_each(|m| *m = false);
        for &q in base.iter().skip(1) {
            if q * q > seg_hi {
                break;
            }
            // first odd multiple of q that is >= max(seg_lo, q²)
            let mut start = seg_lo.div_ceil(q) * q;
            if start < q * q {
                start = q * q;
            }
            if start % 2 == 0 {
                start += q;
            }
            let mut idx = ((start - seg_lo) / 2) as usize;
            while idx < count {
                marks[idx] = true;
                idx += q as usize;
            }
        }
        out.extend(
            marks[..count]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| seg_lo + 2 * i as u64)
                .filter(|&n| n > 1),
        );
        match seg_hi.checked_add(2) {
            Some(next) if seg_hi < hi => seg_lo = next,
            _ => break,
        }
    }
    out
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn range(lo: u64, hi: u64) -> PrimeRange {
        PrimeRange::new(lo, hi).unwrap()
    }

    #[test]
    fn sieve_small_windows() {
        assert_eq!(sieve_primes(&range(1, 10)), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(&range(10, 20)), vec![11, 13, 17, 19]);
        assert!(sieve_primes(&range(24, 28)).is_empty());
        assert_eq!(sieve_primes(&range(2, 2)), vec![2]);
        assert_eq!(sieve_primes(&range(3, 3)), vec![3]);
    }

    #[test]
    fn sieve_counts_across_segments() {
        assert_eq!(sieve_primes(&range(1, 1_000_000)).len(), 78_498);
        let split: usize = range(1, 1_000_000)
            .subranges()
            .map(|r| sieve_primes(&r).len())
            .sum();
        assert_eq!(split, 78_498);
    }

    #[test]
    fn subranges_cover_exactly() {
        let r = PrimeRange::with_chunk(5, 47, 10).unwrap();
        let subs: Vec<_> = r.subranges().map(|s| (s.lo(), s.hi())).collect();
        assert_eq!(subs, vec![(5, 14), (15, 24), (25, 34), (35, 44), (45, 47)]);
    }

    #[test]
    fn inverted_range_is_rejected() {
        assert_eq!(
            PrimeRange::new(10, 3),
            Err(Error::EmptyRange { lo: 10, hi: 3 })
        );
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(Residue::new(2, 7), 3).value(), 1);
        assert_eq!(pow_mod(Residue::new(5, 7), 0).value(), 1);
        assert_eq!(pow_mod(Residue::new(3, 5), 4).value(), 1);
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(Residue::new(3, 7)).unwrap().value(), 5);
        assert_eq!(mod_inv(Residue::new(1, 101)).unwrap().value(), 1);
        assert_eq!(mod_inv(Residue::new(4, 7)).unwrap().value(), 2);
        assert!(matches!(
            mod_inv(Residue::new(14, 7)),
            Err(Error::ZeroInverse { .. })
        ));
    }

    #[test]
    fn batch_inv_examples() {
        let rs = |vs: &[u64], m| vs.iter().map(|&v| Residue::new(v, m)).collect::<Vec<_>>();
        let vals = |rs: Vec<Residue>| rs.into_iter().map(Residue::value).collect::<Vec<_>>();
        assert_eq!(
            vals(batch_inv(&rs(&[1, 2, 3, 4], 5)).unwrap()),
            vec![1, 3, 2, 4]
        );
        assert_eq!(vals(batch_inv(&rs(&[6], 11)).unwrap()), vec![2]);
        assert_eq!(
            vals(batch_inv(&rs(&[1, 2, 3, 4, 5, 6], 7)).unwrap()),
            vec![1, 4, 5, 2, 3, 6]
        );
        assert_eq!(
            batch_inv(&rs(&[1, 2, 0, 4], 5)),
            Err(Error::ZeroInverse {
                position: 2,
                value: 0,
                modulus: 5
            })
        );
        assert!(batch_inv(&[]).unwrap().is_empty());
        assert!(matches!(
            batch_inv(&[Residue::new(1, 5), Residue::new(1, 7)]),
            Err(Error::ModulusMismatch { position: 1, .. })
        ));
    }

    #[test]
    fn inverse_table_matches_definition() {
        for p in [3u64, 5, 7, 101, 65_537] {
            let t = inverse_table(p);
            for m in 1..p {
                assert_eq!(t[m as usize] as u64 * m % p, 1);
            }
        }
    }

    #[test]
    fn pow_mod_p2_examples() {
        let r = pow_mod_p2(2, 4, 3).unwrap();
        assert_eq!((r.value(), r.modulus()), (7, 9));
        let r = pow_mod_p2(2, 1092, 1093).unwrap();
        assert_eq!((r.value(), r.modulus()), (1, 1093 * 1093));
        assert_eq!(pow_mod_p2(2, 4, 5).unwrap().value(), 16);
        assert_eq!(
            pow_mod_p2(10, 4, 5),
            Err(Error::SharedFactor { base: 10, p: 5 })
        );
    }

    #[test]
    fn wide_modulus_path() {
        // p close to 2^32 forces p² > 2^63
        let p = 4_294_967_291u64;
        assert!(is_prime(p));
        let r = pow_mod_p2(3, p - 1, p).unwrap();
        assert_eq!(r.value() % p, 1);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let sieved = sieve_primes(&range(1, 20_000));
        let tested: Vec<u64> = (1..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, tested);
    }

    #[test]
    fn fermat_self_test() {
        for p in sieve_primes(&range(3, 400)) {
            for a in 1..p {
                assert_eq!(pow_mod(Residue::new(a, p), p - 1).value(), 1);
                assert_eq!(pow_mod_p2(a, p - 1, p).unwrap().value() % p, 1);
                let inv = mod_inv(Residue::new(a, p)).unwrap();
                assert_eq!(inv.mul(Residue::new(a, p)).value(), 1);
            }
        }
    }

    proptest! {
        #[test]
        fn batch_inv_is_elementwise(
            idx in 0usize..200,
            vals in proptest::collection::vec(1u64..u64::MAX, 1..40)
        ) {
            let primes = sieve_primes(&range(3, 2_000));
            let p = primes[idx % primes.len()];
            let rs: Vec<Residue> = vals
                .iter()
                .map(|&v| Residue::new(v % (p - 1) + 1, p))
                .collect();
            let batch = batch_inv(&rs).unwrap();
            for (r, b) in rs.iter().zip(&batch) {
                prop_assert_eq!(*b, mod_inv(*r).unwrap());
            }
        }

        #[test]
        fn sieve_matches_trial_division(lo in 0u64..5_000, width in 0u64..3_000) {
            let r = range(lo, lo + width);
            let expected: Vec<u64> = (r.lo()..=r.hi()).filter(|&n| is_prime(n)).collect();
            prop_assert_eq!(sieve_primes(&r), expected);
        }
    }
}
