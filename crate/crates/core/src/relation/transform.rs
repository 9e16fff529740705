//! Symbolic transforms of colored values: reversal, the multi-cut
//! decomposition of `ζ(k)` into level-`N` bracket values, the level-2
//! splitting formula, and lifting a level-`N` value to a multiple level.

use super::term::{lcm, power, sign, Atom, ColoredTerm, Expression, FormalSum};
use crate::error::{Error, Result};
use crate::harmonic::{ColorEntry, ColorMap, Index};
use num_rational::BigRational;
use num_traits::One;

/// A term together with the sign picked up by a transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signed {
    pub sign: i8,
    pub term: ColoredTerm,
}

/// `ζ^c(k) = (−1)^{wt} ζ^{c'}(k_r, …, k_1)`, where `c'(α)` is
/// `(α − α_r, …, α − α_1)` for `c(α) = (α_1, …, α_r)` and `⊠` stays `⊠`.
pub fn reverse_transform(t: &ColoredTerm) -> Signed {
    let level = t.level();
    let color = ColorMap::from_fn(level, t.index.depth(), |alpha| {
        match t.color.entry(alpha).expect("total map") {
            ColorEntry::Boxed => ColorEntry::Boxed,
            ColorEntry::Tuple(a) => ColorEntry::Tuple(
                a.iter()
                    .rev()
                    .map(|&ai| (alpha % level + level - ai % level) % level)
                    .collect(),
            ),
        }
    })
    .expect("reversal preserves validity");
    Signed {
        sign: if t.index.weight() % 2 == 0 { 1 } else { -1 },
        term: ColoredTerm {
            coefficient: t.coefficient.clone(),
            index: t.index.reversed(),
            color,
        },
    }
}

/// All `0 <= i_1 <= … <= i_{n−1} <= r`.
fn cuts(r: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(r: usize, left: usize, from: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for i in from..=r {
            prefix.push(i);
            go(r, left - 1, i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(r, n - 1, 0, &mut Vec::new(), &mut out);
    out
}

fn bracket_factor(parts: &[u32], level: u64, j: u64) -> Result<Option<Atom>> {
    if parts.is_empty() {
        return Ok(None);
    }
    let index = Index::new(parts.to_vec())?;
    let color = ColorMap::bracket(level, index.depth(), j)?;
    Ok(Some(Atom::zeta(index, color)?))
}

/// `ζ(k) = N^{wt} Σ_{0 <= i_1 <= … <= i_{N−1} <= r} Π_j ζ^{[j]}_N(k_{(i);j})`,
/// where the `j`-th piece is `(k_{i_j + 1}, …, k_{i_{j+1}})` with `i_0 = 0`,
/// `i_N = r`. Empty pieces contribute 1.
pub fn decompose_level_n(k: &Index, level: u64) -> Result<Expression> {
    if level == 0 {
        return Err(Error::InvalidArgument("level must be positive".into()));
    }
    let parts = k.parts();
    let r = parts.len();
    let coef = power(level, k.weight());
    let mut out = Expression::zero();
    for cut in cuts(r, level as usize) {
        let mut bounds = Vec::with_capacity(level as usize + 1);
        bounds.push(0);
        bounds.extend_from_slice(&cut);
        bounds.push(r);
        let mut factors = Vec::new();
        for j in 0..level as usize {
            if let Some(a) = bracket_factor(&parts[bounds[j]..bounds[j + 1]], level, j as u64)? {
                factors.push(a);
            }
        }
        out.push(coef.clone(), factors);
    }
    Ok(out)
}

/// `ζ^{(2)}(k) = 2^{wt} ζ^{[0]}_2(k)` as an expression (1 for the empty
/// index).
fn zeta2(parts: &[u32]) -> Result<Expression> {
    let weight: u32 = parts.iter().sum();
    Ok(match bracket_factor(parts, 2, 0)? {
        None => Expression::one(),
        Some(a) => Expression::atom(a).scaled(&power(2, weight)),
    })
}

/// `ζ(k_1, …, k_r) = Σ_i (−1)^{k_{i+1} + … + k_r} ζ^{(2)}(k_1, …, k_i)
/// ζ^{(2)}(k_r, …, k_{i+1})`.
pub fn kmy_level2_split(k: &Index) -> Result<Expression> {
    let parts = k.parts();
    let r = parts.len();
    let mut out = Expression::zero();
    for i in 0..=r {
        let tail: Vec<u32> = parts[i..].iter().rev().copied().collect();
        let tail_weight: u32 = tail.iter().sum();
        let term = zeta2(&parts[..i])?
            .mul(&zeta2(&tail)?)
            .scaled(&sign(tail_weight));
        out = out.add(&term);
    }
    Ok(out)
}

/// Rewrites a level-`N` term at a level `M` divisible by `N`:
/// `ζ^f_N(k) = Σ_{0 <= j_i < M/N} ζ^{g_j}_M(k)` with
/// `g_j(α) = (a_1 + j_1 N, …, a_r + j_r N)` for `f(α mod N) = (a_1, …, a_r)`.
pub fn lift_to_level(t: &ColoredTerm, target: u64) -> Result<FormalSum> {
    let level = t.level();
    if target == 0 || target % level != 0 {
        return Err(Error::LevelMismatch(format!(
            "level {target} is not a multiple of {level}"
        )));
    }
    let steps = target / level;
    let depth = t.index.depth();
    let mut out = FormalSum::zero(target);
    let total = steps.pow(depth as u32);
    for code in 0..total {
        let digits: Vec<u64> = (0..depth)
            .map(|i| code / steps.pow(i as u32) % steps)
            .collect();
        let color = ColorMap::from_fn(target, depth, |alpha| {
            match t.color.entry(alpha % level).expect("total map") {
                ColorEntry::Boxed => ColorEntry::Boxed,
                ColorEntry::Tuple(a) => ColorEntry::Tuple(
                    a.iter()
                        .zip(&digits)
                        .map(|(&ai, &d)| (ai % level + d * level) % target)
                        .collect(),
                ),
            }
        })?;
        out.push(ColoredTerm::new(
            t.coefficient.clone(),
            t.index.clone(),
            color,
        )?)?;
    }
    Ok(out)
}

/// Lifts every term of a sum to the common level `target`.
pub fn lift_sum(s: &FormalSum, target: u64) -> Result<FormalSum> {
    let mut out = FormalSum::zero(target);
    for t in s.terms() {
        out.add(&lift_to_level(&t, target)?)?;
    }
    Ok(out)
}

/// Common level of several sums.
pub fn common_level<'a>(sums: impl IntoIterator<Item = &'a FormalSum>) -> u64 {
    sums.into_iter().fold(1, |l, s| lcm(l, s.level()))
}

/// `ζ^c(k) − sign·ζ^{c'}(k')` as an expression that should vanish.
pub fn reversal_defect(t: &ColoredTerm) -> Expression {
    let r = reverse_transform(t);
    let s = if r.sign > 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    Expression::from(t.clone()).sub(&Expression::from(r.term).scaled(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::PrimeContext;

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    #[test]
    fn reversal_examples() {
        let r = reverse_transform(&ColoredTerm::plain(idx(&[1, 2])));
        assert_eq!(r.sign, -1);
        assert_eq!(r.term.index, idx(&[2, 1]));
        let ctx = PrimeContext::new(7).unwrap();
        assert_eq!(
            reversal_defect(&ColoredTerm::plain(idx(&[1, 2]))).evaluate(&ctx),
            Ok(0)
        );
        let e = reverse_transform(&ColoredTerm::plain(Index::empty()));
        assert_eq!(e.sign, 1);
        assert!(e.term.index.is_empty());
    }

    #[test]
    fn double_reversal_is_identity() {
        let t = ColoredTerm::bracket(idx(&[1, 3, 2]), 5, 2).unwrap();
        let once = reverse_transform(&t);
        let twice = reverse_transform(&once.term);
        assert_eq!(twice.term, t);
        assert_eq!(once.sign * twice.sign, 1);
    }

    #[test]
    fn bracket_reversal_numeric() {
        let t = ColoredTerm::bracket(idx(&[1]), 3, 1).unwrap();
        let defect = reversal_defect(&t);
        for p in crate::prime::PrimeRange::new(5, 100).unwrap().primes() {
            assert_eq!(
                defect.evaluate(&PrimeContext::new(p).unwrap()),
                Ok(0),
                "p = {p}"
            );
        }
    }

    #[test]
    fn decomposition_shapes() {
        let one = decompose_level_n(&idx(&[1, 2]), 1).unwrap();
        assert_eq!(one.len(), 1);
        let two = decompose_level_n(&idx(&[1]), 2).unwrap();
        assert_eq!(two.len(), 2);
        let ctx = PrimeContext::new(5).unwrap();
        assert_eq!(two.evaluate(&ctx), Ok(0));
        // C(r + N − 1, N − 1) cuts
        assert_eq!(decompose_level_n(&idx(&[1, 2, 3]), 3).unwrap().len(), 10);
    }

    #[test]
    fn kmy_shapes() {
        assert_eq!(
            kmy_level2_split(&Index::empty()).unwrap(),
            Expression::one()
        );
        let e = kmy_level2_split(&idx(&[1])).unwrap();
        // the two products coincide up to sign and cancel symbolically
        assert!(e.is_zero());
    }

    #[test]
    fn lifting() {
        let t = ColoredTerm::unit(idx(&[1]), ColorMap::uniform(2, vec![0]).unwrap()).unwrap();
        let lifted = lift_to_level(&t, 4).unwrap();
        assert_eq!(lifted.len(), 2);
        assert!(lift_to_level(&t, 6).is_ok());
        assert!(matches!(lift_to_level(&t, 5), Err(Error::LevelMismatch(_))));
    }
}
