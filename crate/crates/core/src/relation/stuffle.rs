//! The harmonic (stuffle) product of colored values.
//!
//! `ζ^f(k)·ζ^g(l)` expands over all quasi-shuffles of `k` and `l`: each slot
//! of the product takes the next part of `k`, the next part of `l`, or both
//! added together. At a unit `α` the new color interleaves `f(α)` and `g(α)`
//! in the same pattern. A merged slot needs the two residues to agree,
//! otherwise (or if either input is `⊠`) the entry is `⊠`.

use super::term::{ColoredTerm, FormalSum};
use crate::error::{Error, Result};
use crate::harmonic::{ColorEntry, ColorMap, Index};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Left,
    Right,
    Merge,
}

fn patterns(r1: usize, r2: usize) -> Vec<Vec<Step>> {
    fn go(r1: usize, r2: usize, prefix: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if r1 == 0 && r2 == 0 {
            out.push(prefix.clone());
            return;
        }
        let mut branch = |step, a, b, out: &mut Vec<Vec<Step>>| {
            prefix.push(step);
            go(a, b, prefix, out);
            prefix.pop();
        };
        if r1 > 0 {
            branch(Step::Left, r1 - 1, r2, out);
        }
        if r2 > 0 {
            branch(Step::Right, r1, r2 - 1, out);
        }
        if r1 > 0 && r2 > 0 {
            branch(Step::Merge, r1 - 1, r2 - 1, out);
        }
    }
    let mut out = Vec::new();
    go(r1, r2, &mut Vec::new(), &mut out);
    out
}

fn combine(pattern: &[Step], f: &ColorEntry, g: &ColorEntry) -> ColorEntry {
    let (ColorEntry::Tuple(a), ColorEntry::Tuple(b)) = (f, g) else {
        return ColorEntry::Boxed;
    };
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(pattern.len());
    for step in pattern {
        match step {
            Step::Left => {
                out.push(a[i]);
                i += 1;
            }
            Step::Right => {
                out.push(b[j]);
                j += 1;
            }
            Step::Merge => {
                if a[i] != b[j] {
                    return ColorEntry::Boxed;
                }
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    ColorEntry::Tuple(out)
}

fn merged_index(pattern: &[Step], k: &[u32], l: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    pattern
        .iter()
        .map(|step| match step {
            Step::Left => {
                i += 1;
                k[i - 1]
            }
            Step::Right => {
                j += 1;
                l[j - 1]
            }
            Step::Merge => {
                i += 1;
                j += 1;
                k[i - 1] + l[j - 1]
            }
        })
        .collect()
}

/// The stuffle product of two colored terms of the same level.
pub fn stuffle_product(a: &ColoredTerm, b: &ColoredTerm) -> Result<FormalSum> {
    let level = a.level();
    if b.level() != level {
        return Err(Error::LevelMismatch(format!(
            "stuffle of levels {} and {}",
            level,
            b.level()
        )));
    }
    let coefficient = &a.coefficient * &b.coefficient;
    let mut out = FormalSum::zero(level);
    for pattern in patterns(a.index.depth(), b.index.depth()) {
        let index = Index::new(merged_index(&pattern, a.index.parts(), b.index.parts()))?;
        let color = ColorMap::from_fn(level, pattern.len(), |alpha| {
            combine(
                &pattern,
                a.color.entry(alpha).expect("total map"),
                b.color.entry(alpha).expect("total map"),
            )
        })?;
        out.push(ColoredTerm::new(coefficient.clone(), index, color)?)?;
    }
    Ok(out)
}

/// Bilinear extension of [`stuffle_product`] to formal sums.
pub fn stuffle_sums(a: &FormalSum, b: &FormalSum) -> Result<FormalSum> {
    if a.level() != b.level() {
        return Err(Error::LevelMismatch(format!(
            "stuffle of levels {} and {}",
            a.level(),
            b.level()
        )));
    }
    let mut out = FormalSum::zero(a.level());
    for s in a.terms() {
        for t in b.terms() {
            out.add(&stuffle_product(&s, &t)?)?;
        }
    }
    Ok(out)
}

/// Number of quasi-shuffles of depths `r1` and `r2`:
/// `Σ_m (r1 + r2 − m)! / (m! (r1 − m)! (r2 − m)!)`, a Delannoy number.
pub fn quasi_shuffle_count(r1: usize, r2: usize) -> u128 {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    (0..=r1.min(r2))
        .map(|m| fact(r1 + r2 - m) / (fact(m) * fact(r1 - m) * fact(r2 - m)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::PrimeContext;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::collections::BTreeMap;

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    #[test]
    fn classical_depth_one() {
        let z1 = ColoredTerm::plain(idx(&[1]));
        let s = stuffle_product(&z1, &z1).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            s.coefficient(&idx(&[1, 1]), &ColorMap::trivial(2)),
            BigRational::from_integer(BigInt::from(2))
        );
        assert_eq!(
            s.coefficient(&idx(&[2]), &ColorMap::trivial(1)),
            BigRational::from_integer(BigInt::from(1))
        );
        let ctx = PrimeContext::new(5).unwrap();
        assert_eq!(s.to_expression().evaluate(&ctx), Ok(0));
    }

    #[test]
    fn depth_two_one_gives_five_terms() {
        // f = (1, 2), g = (1) at level 3, both constant
        let f = ColorMap::uniform(3, vec![1, 2]).unwrap();
        let g = ColorMap::uniform(3, vec![1]).unwrap();
        let a = ColoredTerm::unit(idx(&[2, 3]), f).unwrap();
        let b = ColoredTerm::unit(idx(&[5]), g).unwrap();
        let s = stuffle_product(&a, &b).unwrap();
        assert_eq!(s.len(), 5);
        let terms: Vec<_> = s.terms().collect();
        let get = |parts: &[u32]| terms.iter().find(|t| t.index.parts() == parts).unwrap();
        // h1..h3: interleavings
        assert_eq!(
            get(&[5, 2, 3]).color.entry(1),
            Some(&ColorEntry::Tuple(vec![1, 1, 2]))
        );
        assert_eq!(
            get(&[2, 5, 3]).color.entry(2),
            Some(&ColorEntry::Tuple(vec![1, 1, 2]))
        );
        assert_eq!(
            get(&[2, 3, 5]).color.entry(1),
            Some(&ColorEntry::Tuple(vec![1, 2, 1]))
        );
        // h4: merge with the first slot, residues agree
        assert_eq!(
            get(&[7, 3]).color.entry(1),
            Some(&ColorEntry::Tuple(vec![1, 2]))
        );
        // h5: merge with the second slot, residues 2 != 1
        assert_eq!(get(&[2, 8]).color.entry(1), Some(&ColorEntry::Boxed));
    }

    #[test]
    fn boxed_input_forces_boxed_output() {
        let mut table = BTreeMap::new();
        table.insert(1, ColorEntry::Boxed);
        table.insert(2, ColorEntry::Tuple(vec![0]));
        let f = ColorMap::new(3, 1, table).unwrap();
        let a = ColoredTerm::unit(idx(&[1]), f).unwrap();
        let b = ColoredTerm::bracket(idx(&[2]), 3, 1).unwrap();
        for t in stuffle_product(&a, &b).unwrap().terms() {
            assert_eq!(t.color.entry(1), Some(&ColorEntry::Boxed));
        }
    }

    #[test]
    fn level_mismatch_is_an_error() {
        let a = ColoredTerm::plain(idx(&[1]));
        let b = ColoredTerm::bracket(idx(&[1]), 2, 0).unwrap();
        assert!(matches!(
            stuffle_product(&a, &b),
            Err(Error::LevelMismatch(_))
        ));
    }

    #[test]
    fn delannoy_counts() {
        assert_eq!(quasi_shuffle_count(1, 1), 3);
        assert_eq!(quasi_shuffle_count(2, 1), 5);
        assert_eq!(quasi_shuffle_count(2, 2), 13);
        assert_eq!(quasi_shuffle_count(3, 3), 63);
        for (r1, r2) in [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3)] {
            assert_eq!(patterns(r1, r2).len() as u128, quasi_shuffle_count(r1, r2));
        }
    }
}
