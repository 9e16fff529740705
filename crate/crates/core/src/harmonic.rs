//! Per-prime harmonic sums: `ζ_p(k)`, the colored sums `ζ_{p,N}^α(k)`,
//! interval-restricted sums over `(jp/N, (j+1)p/N)`, and `s_p(j, N)`.
//!
//! Everything here works inside a [`PrimeContext`], which owns the inverse
//! table of `1..p-1` for one prime. Depth-`r` sums are evaluated with `r`
//! sweeps of running prefix accumulators, so each evaluation is `O(p·r)`.

use crate::error::{Error, Result};
use crate::prime::{gcd, inverse_table, is_prime, mul_mod};
use serde::{Deserialize, Serialize};
use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;

/// A tuple of positive integers `(k_1, …, k_r)`; the empty tuple is allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Index(Vec<u32>);

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "index entries must be positive: {parts:?}"
            )));
        }
        Ok(Index(parts))
    }

    pub fn empty() -> Self {
        Index(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Index {
        Index(self.0.iter().rev().copied().collect())
    }

    /// Parses `"1,2,3"`; the empty string (or `"()"`) is the empty index.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim();
        if s.is_empty() {
            return Ok(Index::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad index entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Index::new(parts)
    }

    /// Comma-separated form accepted by [`Index::parse`].
    pub fn to_list(&self) -> String {
        self.0
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl TryFrom<Vec<u32>> for Index {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Index::new(v)
    }
}

impl From<Index> for Vec<u32> {
    fn from(i: Index) -> Self {
        i.0
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_list())
    }
}

/// One value of a color map: `⊠` or a tuple of residues mod `N`
/// (the empty tuple is `•`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColorEntry {
    Boxed,
    Tuple(Vec<u64>),
}

impl ColorEntry {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "x" | "box" | "⊠" => Ok(ColorEntry::Boxed),
            "" | "•" | "()" => Ok(ColorEntry::Tuple(Vec::new())),
            _ => s
                .trim_start_matches('(')
                .trim_end_matches(')')
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad color residue {t:?}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(ColorEntry::Tuple),
        }
    }
}

impl fmt::Display for ColorEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorEntry::Boxed => f.write_str("x"),
            ColorEntry::Tuple(t) => {
                f.write_str(&t.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            }
        }
    }
}

/// Units of `ℤ/Nℤ` as least non-negative representatives. For `N = 1` the
/// zero ring has the single unit `0`.
pub fn units(level: u64) -> Vec<u64> {
    if level == 1 {
        return vec![0];
    }
    (1..level).filter(|&a| gcd(a, level) == 1).collect()
}

/// A total map from the units of `ℤ/Nℤ` to `⊠` or `r`-tuples mod `N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorMap {
    level: u64,
    arity: usize,
    table: BTreeMap<u64, ColorEntry>,
}

impl ColorMap {
    pub fn new(level: u64, arity: usize, table: BTreeMap<u64, ColorEntry>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        let expected = units(level);
        let keys: Vec<u64> = table.keys().copied().collect();
        if keys != expected {
            return Err(Error::InvalidArgument(format!(
                "color table at level {level} must be defined exactly on the units {expected:?}, got {keys:?}"
            )));
        }
        for entry in table.values() {
            if let ColorEntry::Tuple(t) = entry {
                if t.len() != arity {
                    return Err(Error::ArityMismatch {
                        expected: arity,
                        found: t.len(),
                    });
                }
                if let Some(bad) = t.iter().find(|&&a| a >= level) {
                    return Err(Error::InvalidArgument(format!(
                        "color residue {bad} is not reduced mod {level}"
                    )));
                }
            }
        }
        Ok(ColorMap {
            level,
            arity,
            table,
        })
    }

    /// Builds a map from a function of the unit; residues are reduced mod `N`.
    pub fn from_fn(level: u64, arity: usize, f: impl Fn(u64) -> ColorEntry) -> Result<Self> {
        let table = units(level)
            .into_iter()
            .map(|a| {
                let e = match f(a) {
                    ColorEntry::Tuple(t) => {
                        ColorEntry::Tuple(t.into_iter().map(|x| x % level).collect())
                    }
                    ColorEntry::Boxed => ColorEntry::Boxed,
                };
                (a, e)
            })
            .collect();
        ColorMap::new(level, arity, table)
    }

    /// The map `[j]: α ↦ (−jα, …, −jα)`.
    pub fn bracket(level: u64, arity: usize, j: u64) -> Result<Self> {
        if j >= level {
            return Err(Error::InvalidArgument(format!(
                "bracket index j = {j} must satisfy 0 <= j < {level}"
            )));
        }
        ColorMap::from_fn(level, arity, |a| {
            let r = (level - (j * a) % level) % level;
            ColorEntry::Tuple(vec![r; arity])
        })
    }

    /// The same tuple at every unit.
    pub fn uniform(level: u64, tuple: Vec<u64>) -> Result<Self> {
        let arity = tuple.len();
        ColorMap::from_fn(level, arity, |_| ColorEntry::Tuple(tuple.clone()))
    }

    /// The all-`⊠` map.
    pub fn boxed(level: u64, arity: usize) -> Result<Self> {
        ColorMap::from_fn(level, arity, |_| ColorEntry::Boxed)
    }

    /// Level-1 map used for plain `ζ_p`.
    pub fn trivial(arity: usize) -> Self {
        ColorMap::uniform(1, vec![0; arity]).expect("level 1 is always valid")
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Entry at the unit `α` (given as any integer congruent to it).
    pub fn entry(&self, alpha: u64) -> Option<&ColorEntry> {
        self.table.get(&(alpha % self.level))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &ColorEntry)> {
        self.table.iter().map(|(&a, e)| (a, e))
    }

    /// Returns the bracket `j` if this map is exactly `[j]`.
    pub fn as_bracket(&self) -> Option<u64> {
        (0..self.level).find(|&j| {
            ColorMap::bracket(self.level, self.arity, j)
                .map(|b| &b == self)
                .unwrap_or(false)
        })
    }

    /// `"bracket:j"` when the map is a bracket map, otherwise `None`.
    pub fn bracket_spec(&self) -> Option<String> {
        self.as_bracket().map(|j| format!("bracket:{j}"))
    }
}

impl fmt::Display for ColorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(j) = self.as_bracket() {
            return write!(f, "[{j}]_{}", self.level);
        }
        write!(f, "{{")?;
        for (i, (a, e)) in self.table.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{a}→{e}")?;
        }
        write!(f, "}}_{}", self.level)
    }
}

/// Inclusive integer bounds of the open interval `(jp/N, (j+1)p/N)`.
/// `first > last` means the interval holds no integer.
pub fn interval_bounds(j: u64, level: u64, p: u64) -> (u64, u64) {
    let first = (j as u128 * p as u128 / level as u128) as u64 + 1;
    let upper = (j as u128 + 1) * p as u128;
    let ceil = upper.div_ceil(level as u128) as u64;
    (first, ceil - 1)
}

/// Per-prime workspace: the prime and lazily built tables of inverses and
/// harmonic prefix sums. Meant to be created, used and dropped inside one
/// task.
pub struct PrimeContext {
    p: u64,
    inverses: OnceCell<Vec<u32>>,
    harmonic: OnceCell<Vec<u32>>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::InvalidArgument(format!(
                "{p} is not an odd prime below 2^32"
            )));
        }
        Ok(PrimeContext {
            p,
            inverses: OnceCell::new(),
            harmonic: OnceCell::new(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn inverses(&self) -> &[u32] {
        self.inverses.get_or_init(|| inverse_table(self.p))
    }

    /// `m⁻¹ mod p` for `1 <= m < p`.
    #[inline]
    pub fn inv(&self, m: u64) -> u64 {
        self.inverses()[m as usize] as u64
    }

    #[inline]
    pub fn inv_pow(&self, m: u64, k: u32) -> u64 {
        let base = self.inv(m);
        let mut acc = base;
        for _ in 1..k {
            acc = mul_mod(acc, base, self.p);
        }
        acc
    }

    /// `H[m] = Σ_{i=1}^{m} 1/i mod p` for `0 <= m < p`.
    fn harmonic_prefix(&self) -> &[u32] {
        self.harmonic.get_or_init(|| {
            let inv = self.inverses();
            let p = self.p;
            let mut out = Vec::with_capacity(inv.len());
            let mut acc = 0u64;
            out.push(0u32);
            for &x in &inv[1..] {
                acc += x as u64;
                if acc >= p {
                    acc -= p;
                }
                out.push(acc as u32);
            }
            out
        })
    }

    fn check_level(&self, level: u64) -> Result<()> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        if level % self.p == 0 {
            return Err(Error::LevelSharesFactor { level, p: self.p });
        }
        Ok(())
    }

    /// Nested sum of `1/(m_1^{k_1}⋯m_r^{k_r})` over `first <= m_1 < ⋯ < m_r <= last`,
    /// optionally with `m_i ≡ classes.1[i] (mod classes.0)`.
    fn nested_sum(
        &self,
        parts: &[u32],
        first: u64,
        last: u64,
        classes: Option<(u64, &[u64])>,
    ) -> u64 {
        if parts.is_empty() {
            return 1;
        }
        let p = self.p;
        if first > last {
            return 0;
        }
        debug_assert!(first >= 1 && last < p);
        let term = |slot: usize, m: u64| -> u64 {
            match classes {
                Some((n, cls)) if m % n != cls[slot] => 0,
                _ => self.inv_pow(m, parts[slot]),
            }
        };
        if parts.len() == 1 {
            let mut acc = 0u64;
            for m in first..=last {
                acc += term(0, m);
                if acc >= p {
                    acc -= p;
                }
            }
            return acc;
        }
        let mut weights: Vec<u64> = (first..=last).map(|m| term(0, m)).collect();
        for slot in 1..parts.len() {
            let mut running = 0u64;
            for (i, m) in (first..=last).enumerate() {
                let prev = weights[i];
                weights[i] = if running == 0 {
                    0
                } else {
                    mul_mod(running, term(slot, m), p)
                };
                running += prev;
                if running >= p {
                    running -= p;
                }
            }
        }
        weights.iter().fold(0u64, |acc, &w| {
            let s = acc + w;
            if s >= p {
                s - p
            } else {
                s
            }
        })
    }

    /// `ζ_p(k) mod p`; the empty index gives 1.
    pub fn zeta(&self, index: &Index) -> u64 {
        self.nested_sum(index.parts(), 1, self.p - 1, None)
    }

    /// `ζ_{p,N}^α(k)`: the nested sum restricted to `m_i ≡ α_i (mod N)`.
    pub fn zeta_colored(&self, index: &Index, level: u64, alpha: &[u64]) -> Result<u64> {
        self.check_level(level)?;
        if alpha.len() != index.depth() {
            return Err(Error::ArityMismatch {
                expected: index.depth(),
                found: alpha.len(),
            });
        }
        if level == 1 {
            return Ok(self.zeta(index));
        }
        let reduced: Vec<u64> = alpha.iter().map(|a| a % level).collect();
        Ok(self.nested_sum(index.parts(), 1, self.p - 1, Some((level, &reduced))))
    }

    /// `ζ_{p,N}^{c(p̄)}(k)`: evaluates the color map at the class of `p`.
    pub fn zeta_colormap(&self, index: &Index, color: &ColorMap) -> Result<u64> {
        self.check_level(color.level())?;
        if color.arity() != index.depth() {
            return Err(Error::ArityMismatch {
                expected: index.depth(),
                found: color.arity(),
            });
        }
        match color.entry(self.p).expect("p is a unit mod N") {
            ColorEntry::Boxed => Ok(0),
            ColorEntry::Tuple(alpha) => self.zeta_colored(index, color.level(), alpha),
        }
    }

    /// The nested sum over `jp/N < m_1 < ⋯ < m_r < (j+1)p/N`.
    pub fn interval_sum(&self, index: &Index, level: u64, j: u64) -> Result<u64> {
        self.check_level(level)?;
        if j >= level {
            return Err(Error::InvalidArgument(format!(
                "interval index j = {j} must satisfy 0 <= j < {level}"
            )));
        }
        let (first, last) = interval_bounds(j, level, self.p);
        Ok(self.nested_sum(index.parts(), first, last, None))
    }

    /// `Σ_{jp/N < m < (j+1)p/N} m^{-k} mod p`; `k = 1` is `s_p(j, N)`.
    pub fn s_pk(&self, j: u64, level: u64, k: u32) -> Result<u64> {
        if k == 0 {
            return Err(Error::InvalidArgument("exponent k must be positive".into()));
        }
        self.check_level(level)?;
        if j >= level {
            return Err(Error::InvalidArgument(format!(
                "interval index j = {j} must satisfy 0 <= j < {level}"
            )));
        }
        let (first, last) = interval_bounds(j, level, self.p);
        if first > last {
            return Ok(0);
        }
        if k == 1 {
            let h = self.harmonic_prefix();
            let (hi, lo) = (h[last as usize] as u64, h[first as usize - 1] as u64);
            return Ok(if hi >= lo { hi - lo } else { hi + self.p - lo });
        }
        Ok(self.nested_sum(&[k], first, last, None))
    }
}

pub fn s_pk(j: u64, level: u64, k: u32, p: u64) -> Result<u64> {
    PrimeContext::new(p)?.s_pk(j, level, k)
}

pub fn zeta_p(index: &Index, p: u64) -> Result<u64> {
    Ok(PrimeContext::new(p)?.zeta(index))
}

pub fn zeta_p_colored(index: &Index, level: u64, alpha: &[u64], p: u64) -> Result<u64> {
    PrimeContext::new(p)?.zeta_colored(index, level, alpha)
}

pub fn zeta_p_colormap(index: &Index, color: &ColorMap, p: u64) -> Result<u64> {
    PrimeContext::new(p)?.zeta_colormap(index, color)
}

pub fn interval_sum(index: &Index, level: u64, j: u64, p: u64) -> Result<u64> {
    PrimeContext::new(p)?.interval_sum(index, level, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::{pow_mod_u64, sieve_primes, PrimeRange};

    fn idx(parts: &[u32]) -> Index {
        Index::new(parts.to_vec()).unwrap()
    }

    /// Direct enumeration of all increasing tuples; exponential in depth.
    fn brute(parts: &[u32], p: u64, first: u64, last: u64, classes: Option<(u64, &[u64])>) -> u64 {
        fn rec(
            parts: &[u32],
            p: u64,
            from: u64,
            last: u64,
            slot: usize,
            classes: Option<(u64, &[u64])>,
        ) -> u64 {
            if slot == parts.len() {
                return 1;
            }
            let mut s = 0;
            for m in from..=last {
                if let Some((n, c)) = classes {
                    if m % n != c[slot] {
                        continue;
                    }
                }
                let inv = crate::prime::inv_mod_u64(m, p).unwrap();
                let t = pow_mod_u64(inv, parts[slot] as u64, p);
                s = (s + t * rec(parts, p, m + 1, last, slot + 1, classes)) % p;
            }
            s
        }
        rec(parts, p, first, last, 0, classes)
    }

    #[test]
    fn s_pk_examples() {
        assert_eq!(s_pk(0, 2, 1, 5).unwrap(), 4);
        assert_eq!(s_pk(1, 3, 1, 7).unwrap(), 0);
        assert_eq!(s_pk(2, 3, 1, 7).unwrap(), 2);
        assert_eq!(
            s_pk(0, 14, 1, 7),
            Err(Error::LevelSharesFactor { level: 14, p: 7 })
        );
        // (0, 5/4) at p = 5 holds only m = 1; (5/4, 10/4) holds m = 2
        assert_eq!(s_pk(0, 4, 1, 5).unwrap(), 1);
        assert_eq!(s_pk(1, 4, 1, 5).unwrap(), 3);
        // width < 1: (7/8, 14/8) contains m = 1 only; (0, 7/8) is empty
        assert_eq!(s_pk(0, 8, 1, 7).unwrap(), 0);
        assert_eq!(s_pk(1, 8, 1, 7).unwrap(), 1);
    }

    #[test]
    fn zeta_examples() {
        for p in sieve_primes(&PrimeRange::new(3, 200).unwrap()) {
            assert_eq!(zeta_p(&idx(&[1]), p).unwrap(), 0, "p = {p}");
        }
        assert_eq!(zeta_p(&idx(&[1, 1]), 5).unwrap(), 0);
        assert_eq!(zeta_p(&idx(&[1, 2]), 7).unwrap(), 3);
        assert_eq!(zeta_p(&idx(&[2, 1]), 7).unwrap(), 4);
        assert_eq!(zeta_p(&Index::empty(), 11).unwrap(), 1);
    }

    #[test]
    fn colored_examples() {
        assert_eq!(zeta_p_colored(&Index::empty(), 12, &[], 13).unwrap(), 1);
        assert_eq!(zeta_p_colored(&idx(&[3]), 12, &[10], 13).unwrap(), 12);
        assert_eq!(
            zeta_p_colored(&idx(&[3, 1]), 12, &[10], 13),
            Err(Error::ArityMismatch {
                expected: 2,
                found: 1
            })
        );
        let boxed = ColorMap::boxed(5, 2).unwrap();
        assert_eq!(zeta_p_colormap(&idx(&[1, 2]), &boxed, 7).unwrap(), 0);
    }

    #[test]
    fn colormap_examples() {
        let k = idx(&[1, 2]);
        assert_eq!(
            zeta_p_colormap(&k, &ColorMap::bracket(1, 2, 0).unwrap(), 7).unwrap(),
            zeta_p(&k, 7).unwrap()
        );
        let b2 = ColorMap::bracket(12, 1, 2).unwrap();
        assert_eq!(zeta_p_colormap(&idx(&[3]), &b2, 13).unwrap(), 12);
        let b0 = ColorMap::bracket(2, 1, 0).unwrap();
        assert_eq!(zeta_p_colormap(&idx(&[1]), &b0, 5).unwrap(), 2);
        assert_eq!(
            zeta_p_colormap(&idx(&[1]), &ColorMap::bracket(6, 1, 1).unwrap(), 3),
            Err(Error::LevelSharesFactor { level: 6, p: 3 })
        );
    }

    #[test]
    fn interval_examples() {
        assert_eq!(interval_sum(&idx(&[1]), 2, 0, 5).unwrap(), 4);
        let colored = zeta_p_colored(&idx(&[1]), 2, &[0], 5).unwrap();
        assert_eq!(2 * colored % 5, 4);
        assert_eq!(interval_sum(&Index::empty(), 3, 1, 7).unwrap(), 1);
    }

    #[test]
    fn interval_bounds_are_strict() {
        assert_eq!(interval_bounds(0, 2, 5), (1, 2));
        assert_eq!(interval_bounds(1, 2, 5), (3, 4));
        assert_eq!(interval_bounds(2, 3, 7), (5, 6));
        assert_eq!(interval_bounds(0, 1, 7), (1, 6));
    }

    #[test]
    fn bracket_map_shape() {
        let b = ColorMap::bracket(12, 2, 2).unwrap();
        assert_eq!(b.entry(1), Some(&ColorEntry::Tuple(vec![10, 10])));
        assert_eq!(b.entry(5), Some(&ColorEntry::Tuple(vec![2, 2])));
        assert_eq!(b.as_bracket(), Some(2));
        assert_eq!(
            ColorMap::bracket(4, 0, 3).unwrap().entry(3),
            Some(&ColorEntry::Tuple(vec![]))
        );
        assert!(ColorMap::bracket(4, 1, 4).is_err());
        assert_eq!(units(1), vec![0]);
        assert_eq!(units(12), vec![1, 5, 7, 11]);
    }

    #[test]
    fn colormap_validation() {
        let mut t = BTreeMap::new();
        t.insert(1, ColorEntry::Tuple(vec![0]));
        assert!(ColorMap::new(3, 1, t.clone()).is_err(), "unit 2 missing");
        t.insert(2, ColorEntry::Tuple(vec![3]));
        assert!(ColorMap::new(3, 1, t.clone()).is_err(), "3 not reduced");
        t.insert(2, ColorEntry::Boxed);
        assert!(ColorMap::new(3, 1, t).is_ok());
    }

    #[test]
    fn prefix_sums_match_enumeration() {
        for p in sieve_primes(&PrimeRange::new(3, 50).unwrap()) {
            let ctx = PrimeContext::new(p).unwrap();
            for parts in [
                vec![1],
                vec![2, 1],
                vec![1, 1, 1],
                vec![3, 1, 2],
                vec![2, 2],
            ] {
                assert_eq!(ctx.zeta(&idx(&parts)), brute(&parts, p, 1, p - 1, None));
                for n in [2u64, 3, 4] {
                    if p % n == 0 {
                        continue;
                    }
                    let cls: Vec<u64> = (0..parts.len() as u64).map(|i| (i + 1) % n).collect();
                    assert_eq!(
                        ctx.zeta_colored(&idx(&parts), n, &cls).unwrap(),
                        brute(&parts, p, 1, p - 1, Some((n, &cls)))
                    );
                }
            }
        }
    }

    #[test]
    fn colored_sums_partition_the_full_sum() {
        let k = idx(&[1, 2]);
        for p in [7u64, 11, 13] {
            let ctx = PrimeContext::new(p).unwrap();
            for n in [2u64, 3, 4] {
                let mut total = 0;
                for a in 0..n {
                    for b in 0..n {
                        total = (total + ctx.zeta_colored(&k, n, &[a, b]).unwrap()) % p;
                    }
                }
                assert_eq!(total, ctx.zeta(&k));
            }
        }
    }

    #[test]
    fn index_parsing() {
        assert_eq!(Index::parse("1,2,3").unwrap().parts(), &[1, 2, 3]);
        assert_eq!(Index::parse("").unwrap(), Index::empty());
        assert!(Index::parse("1,0").is_err());
        assert!(Index::parse("1,a").is_err());
        let k = idx(&[1, 2, 3]);
        assert_eq!((k.weight(), k.depth()), (6, 3));
        assert_eq!(k.reversed().parts(), &[3, 2, 1]);
    }

    #[test]
    fn context_rejects_non_primes() {
        assert!(PrimeContext::new(9).is_err());
        assert!(PrimeContext::new(2).is_err());
        assert!(PrimeContext::new(11).is_ok());
    }
}
