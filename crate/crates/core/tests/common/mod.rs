//! Reference implementations written without the library's shortcuts:
//! trial-division primality, big-integer powers modulo p², exhaustive
//! enumeration of nested sums, and exact Bernoulli numbers from the
//! Akiyama–Tanigawa algorithm.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::sync::OnceLock;

pub fn is_prime_naive(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime_naive(n)).collect()
}

/// Square-and-multiply in `u128`; moduli stay below 2^64.
pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut base = b as u128 % m;
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0);
    pow_mod(a % p, p - 2, p)
}

/// `q_p(n) = (n^{p−1} − 1)/p mod p` from the exact power modulo p².
pub fn fermat_quotient(n: u64, p: u64) -> u64 {
    let p2 = BigUint::from(p) * BigUint::from(p);
    let r = BigUint::from(n).modpow(&BigUint::from(p - 1), &p2);
    let r = if r.is_zero() { p2.clone() } else { r };
    ((r + &p2 - 1u32) % &p2 / BigUint::from(p))
        .to_u64()
        .unwrap()
}

pub fn wieferich_primes(base: u64, hi: u64) -> Vec<u64> {
    primes_between(2, hi)
        .into_iter()
        .filter(|&p| base % p != 0 && fermat_quotient(base, p) == 0)
        .collect()
}

/// `Σ 1/(m_1^{k_1}⋯m_r^{k_r}) mod p` over all `0 < m_1 < ⋯ < m_r < p`
/// accepted by `keep`, enumerated one tuple at a time.
pub fn nested_sum(parts: &[u32], p: u64, keep: &dyn Fn(usize, u64) -> bool) -> u64 {
    fn go(
        parts: &[u32],
        p: u64,
        slot: usize,
        from: u64,
        acc: u64,
        keep: &dyn Fn(usize, u64) -> bool,
    ) -> u64 {
        if slot == parts.len() {
            return acc;
        }
        let mut total = 0;
        for m in from..p {
            if !keep(slot, m) {
                continue;
            }
            let t = acc * pow_mod(inv_mod(m, p), parts[slot] as u64, p) % p;
            total = (total + go(parts, p, slot + 1, m + 1, t, keep)) % p;
        }
        total
    }
    go(parts, p, 0, 1, 1, keep)
}

pub fn zeta(parts: &[u32], p: u64) -> u64 {
    nested_sum(parts, p, &|_, _| true)
}

/// The colored sum with `m_i ≡ alpha_i (mod level)`.
pub fn zeta_colored(parts: &[u32], level: u64, alpha: &[u64], p: u64) -> u64 {
    nested_sum(parts, p, &|slot, m| m % level == alpha[slot] % level)
}

/// The sum restricted to `jp/N < m_1 < ⋯ < m_r < (j+1)p/N`, tested with
/// exact integer comparisons `jp < mN < (j+1)p`.
pub fn interval_sum(parts: &[u32], level: u64, j: u64, p: u64) -> u64 {
    nested_sum(parts, p, &|_, m| {
        j * p < m * level && m * level < (j + 1) * p
    })
}

/// `𝔷(k) = B_{p−k}/k mod p`.
pub fn frak_z(k: u64, p: u64) -> u64 {
    let b = rational_mod(&bernoulli(p - k), p).unwrap();
    b * inv_mod(k, p) % p
}

/// Exact `B_n` with `B_1 = +1/2`, for `n <= 400`. The table is built once
/// with the Akiyama–Tanigawa algorithm, keeping the first entry of every row.
pub fn bernoulli(n: u64) -> BigRational {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let size = 401;
        let mut a: Vec<BigRational> = Vec::with_capacity(size);
        let mut out = Vec::with_capacity(size);
        for m in 0..size {
            a.push(BigRational::new(1.into(), BigInt::from(m as u64 + 1)));
            for j in (1..=m).rev() {
                a[j - 1] = (&a[j - 1] - &a[j]) * BigRational::from_integer(BigInt::from(j as u64));
            }
            out.push(a[0].clone());
        }
        out
    });
    table[n as usize].clone()
}

pub fn rational_mod(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb).to_u64().unwrap();
    if den == 0 {
        return None;
    }
    let num = x.numer().mod_floor(&pb).to_u64().unwrap();
    Some(num * inv_mod(den, p) % p)
}

/// Irregular pairs `(p, n)`: even `2 <= n <= p − 3` with `p | B_n`.
pub fn irregular_indices(p: u64) -> Vec<u64> {
    (2..=p.saturating_sub(3))
        .step_by(2)
        .filter(|&n| rational_mod(&bernoulli(n), p) == Some(0))
        .collect()
}

/// Smallest odd `k >= 3` with `𝔷(k) ≢ 0 (mod p)`, from exact Bernoulli
/// numbers. Only practical for small `p`.
pub fn eth(p: u64) -> u64 {
    (3..=p - 2).step_by(2).find(|&k| frak_z(k, p) != 0).unwrap()
}

/// All indices with parts in `1..=max_part` and depth `1..=max_depth`.
pub fn indices(max_part: u32, max_depth: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..max_depth {
        layer = layer
            .iter()
            .flat_map(|v| {
                (1..=max_part).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// All indices of weight exactly `w` (compositions of `w`).
pub fn compositions(w: u32) -> Vec<Vec<u32>> {
    if w == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=w {
        for mut rest in compositions(w - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
