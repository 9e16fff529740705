//! Colored terms, their exact-coefficient linear combinations, and
//! polynomial expressions in colored values, `𝔷(k)`, `q_p(N)` and interval
//! sums.

use crate::bernoulli::{frak_z, rational_mod_p};
use crate::congruence::{SkipKind, SkipReason};
use crate::error::{Error, Result};
use crate::harmonic::{ColorMap, Index, PrimeContext};
use crate::prime::{gcd, mul_mod};
use crate::quotient::fermat_quotient;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `q · ζ^c_N(k)` with an exact rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredTerm {
    pub coefficient: BigRational,
    pub index: Index,
    pub color: ColorMap,
}

impl ColoredTerm {
    pub fn new(coefficient: BigRational, index: Index, color: ColorMap) -> Result<Self> {
        if color.arity() != index.depth() {
            return Err(Error::ArityMismatch {
                expected: index.depth(),
                found: color.arity(),
            });
        }
        Ok(ColoredTerm {
            coefficient,
            index,
            color,
        })
    }

    /// Coefficient 1.
    pub fn unit(index: Index, color: ColorMap) -> Result<Self> {
        ColoredTerm::new(BigRational::one(), index, color)
    }

    /// The level-1 value `ζ(k)`.
    pub fn plain(index: Index) -> Self {
        let color = ColorMap::trivial(index.depth());
        ColoredTerm::unit(index, color).expect("arity matches")
    }

    pub fn bracket(index: Index, level: u64, j: u64) -> Result<Self> {
        let color = ColorMap::bracket(level, index.depth(), j)?;
        ColoredTerm::unit(index, color)
    }

    pub fn level(&self) -> u64 {
        self.color.level()
    }

    pub fn scaled(mut self, c: &BigRational) -> Self {
        self.coefficient *= c;
        self
    }
}

/// A finite `ℚ`-combination of colored values at one level, kept in
/// canonical order (by index, then color table) with like terms merged and
/// zero coefficients dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSum {
    level: u64,
    terms: BTreeMap<(Index, ColorMap), BigRational>,
}

impl FormalSum {
    pub fn zero(level: u64) -> Self {
        FormalSum {
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_term(term: ColoredTerm) -> Self {
        let mut s = FormalSum::zero(term.level());
        s.push(term).expect("same level");
        s
    }

    pub fn from_terms(level: u64, terms: impl IntoIterator<Item = ColoredTerm>) -> Result<Self> {
        let mut s = FormalSum::zero(level);
        for t in terms {
            s.push(t)?;
        }
        Ok(s)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: ColoredTerm) -> Result<()> {
        if term.level() != self.level {
            return Err(Error::LevelMismatch(format!(
                "term of level {} added to a sum of level {}",
                term.level(),
                self.level
            )));
        }
        let key = (term.index, term.color);
        let slot = self
            .terms
            .entry(key.clone())
            .or_insert_with(BigRational::zero);
        *slot += term.coefficient;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add(&mut self, other: &FormalSum) -> Result<()> {
        for t in other.terms() {
            self.push(t)?;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: &BigRational) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ColoredTerm> + '_ {
        self.terms.iter().map(|((index, color), c)| ColoredTerm {
            coefficient: c.clone(),
            index: index.clone(),
            color: color.clone(),
        })
    }

    pub fn coefficient(&self, index: &Index, color: &ColorMap) -> BigRational {
        self.terms
            .get(&(index.clone(), color.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Sum of the coefficients.
    pub fn coefficient_total(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn to_expression(&self) -> Expression {
        let mut e = Expression::zero();
        for t in self.terms() {
            e.push(
                t.coefficient,
                vec![Atom::Zeta {
                    index: t.index,
                    color: t.color,
                }],
            );
        }
        e
    }
}

/// A factor of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `ζ^c_N(k)` evaluated at the class of `p`.
    Zeta { index: Index, color: ColorMap },
    /// `𝔷(k) = B_{p−k}/k`.
    FrakZ(u32),
    /// `q_p(N)`, the image of `log N`.
    Log(u64),
    /// The nested sum over `(jp/N, (j+1)p/N)`.
    Interval { index: Index, level: u64, j: u64 },
}

impl Atom {
    pub fn zeta(index: Index, color: ColorMap) -> Result<Atom> {
        if color.arity() != index.depth() {
            return Err(Error::ArityMismatch {
                expected: index.depth(),
                found: color.arity(),
            });
        }
        Ok(Atom::Zeta { index, color })
    }

    pub fn frak_z(k: u32) -> Result<Atom> {
        if k < 2 {
            return Err(Error::InvalidWeight(k));
        }
        Ok(Atom::FrakZ(k))
    }

    pub fn log(n: u64) -> Result<Atom> {
        if n == 0 {
            return Err(Error::InvalidArgument("log needs a positive base".into()));
        }
        Ok(Atom::Log(n))
    }

    pub fn interval(index: Index, level: u64, j: u64) -> Result<Atom> {
        if level == 0 || j >= level {
            return Err(Error::InvalidArgument(format!(
                "interval needs 0 <= j < N, got j = {j}, N = {level}"
            )));
        }
        Ok(Atom::Interval { index, level, j })
    }

    pub fn weight(&self) -> u32 {
        match self {
            Atom::Zeta { index, .. } | Atom::Interval { index, .. } => index.weight(),
            Atom::FrakZ(k) => *k,
            Atom::Log(_) => 1,
        }
    }

    /// The modulus whose prime divisors the atom cannot be evaluated at.
    pub fn level(&self) -> u64 {
        match self {
            Atom::Zeta { color, .. } => color.level(),
            Atom::Interval { level, .. } => *level,
            Atom::FrakZ(_) => 1,
            Atom::Log(n) => *n,
        }
    }

    pub fn evaluate(&self, ctx: &PrimeContext) -> std::result::Result<u64, SkipReason> {
        let p = ctx.p();
        let level_skip =
            |n: u64| SkipReason::new(SkipKind::LevelSharesFactor, format!("p divides {n}"));
        match self {
            Atom::Zeta { index, color } => ctx
                .zeta_colormap(index, color)
                .map_err(|_| level_skip(color.level())),
            Atom::Interval { index, level, j } => ctx
                .interval_sum(index, *level, *j)
                .map_err(|_| level_skip(*level)),
            Atom::FrakZ(k) => frak_z(*k as u64, p).map_err(|_| {
                SkipReason::new(SkipKind::SmallPrime, format!("𝔷({k}) needs p >= {}", k + 2))
            }),
            Atom::Log(n) => fermat_quotient(*n, p)
                .map_err(|_| SkipReason::new(SkipKind::BaseSharesFactor, format!("p divides {n}"))),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Zeta { index, color } if color.level() == 1 => write!(f, "ζ{index}"),
            Atom::Zeta { index, color } => match color.as_bracket() {
                Some(j) => write!(f, "ζ_{}^[{j}]{index}", color.level()),
                None => write!(f, "ζ^{color}{index}"),
            },
            Atom::FrakZ(k) => write!(f, "𝔷({k})"),
            Atom::Log(n) => write!(f, "log({n})"),
            Atom::Interval { index, level, j } => write!(f, "S_{level},{j}{index}"),
        }
    }
}

/// A polynomial in atoms with exact rational coefficients; monomials are
/// sorted factor lists, so equal products share one key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expression {
    monomials: BTreeMap<Vec<Atom>, BigRational>,
}

impl Expression {
    pub fn zero() -> Self {
        Expression::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut e = Expression::zero();
        e.push(c, Vec::new());
        e
    }

    pub fn one() -> Self {
        Expression::constant(BigRational::one())
    }

    pub fn atom(a: Atom) -> Self {
        let mut e = Expression::zero();
        e.push(BigRational::one(), vec![a]);
        e
    }

    pub fn push(&mut self, c: BigRational, mut factors: Vec<Atom>) {
        factors.sort();
        let slot = self
            .monomials
            .entry(factors.clone())
            .or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.monomials.remove(&factors);
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&BigRational, &[Atom])> {
        self.monomials.iter().map(|(f, c)| (c, f.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn add(&self, other: &Expression) -> Expression {
        let mut e = self.clone();
        for (c, f) in other.monomials() {
            e.push(c.clone(), f.to_vec());
        }
        e
    }

    pub fn sub(&self, other: &Expression) -> Expression {
        self.add(&other.scaled(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Expression) -> Expression {
        let mut e = Expression::zero();
        for (c1, f1) in self.monomials() {
            for (c2, f2) in other.monomials() {
                let mut f = f1.to_vec();
                f.extend_from_slice(f2);
                e.push(c1 * c2, f);
            }
        }
        e
    }

    pub fn scaled(&self, c: &BigRational) -> Expression {
        let mut e = Expression::zero();
        for (c0, f) in self.monomials() {
            e.push(c0 * c, f.to_vec());
        }
        e
    }

    /// `lcm` of the atom levels, or 1.
    pub fn level(&self) -> u64 {
        self.atoms().fold(1, |l, a| lcm(l, a.level()))
    }

    /// Largest monomial weight.
    pub fn weight(&self) -> u32 {
        self.monomials
            .keys()
            .map(|f| f.iter().map(Atom::weight).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.monomials.keys().flatten()
    }

    pub fn evaluate(&self, ctx: &PrimeContext) -> std::result::Result<u64, SkipReason> {
        let p = ctx.p();
        let mut total = 0u64;
        for (c, factors) in self.monomials() {
            let coef = rational_mod_p(c, p).ok_or_else(|| {
                SkipReason::new(
                    SkipKind::CoefficientDenominator,
                    format!("p divides the denominator of {c}"),
                )
            })?;
            let mut value = coef;
            for a in factors {
                if value == 0 {
                    break;
                }
                value = mul_mod(value, a.evaluate(ctx)?, p);
            }
            total = (total + value) % p;
        }
        Ok(total)
    }
}

impl From<&FormalSum> for Expression {
    fn from(s: &FormalSum) -> Self {
        s.to_expression()
    }
}

impl From<ColoredTerm> for Expression {
    fn from(t: ColoredTerm) -> Self {
        let mut e = Expression::zero();
        e.push(
            t.coefficient,
            vec![Atom::Zeta {
                index: t.index,
                color: t.color,
            }],
        );
        e
    }
}

pub(crate) fn format_coefficient(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (c, factors)) in self.monomials().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let body: Vec<String> = factors.iter().map(Atom::to_string).collect();
            if factors.is_empty() {
                f.write_str(&format_coefficient(&magnitude))?;
            } else if magnitude.is_one() {
                f.write_str(&body.join("·"))?;
            } else {
                write!(f, "{}·{}", format_coefficient(&magnitude), body.join("·"))?;
            }
        }
        Ok(())
    }
}

/// `(−1)^n` as a rational.
pub(crate) fn sign(n: u32) -> BigRational {
    if n % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// `n^e` as a rational.
pub(crate) fn power(n: u64, e: u32) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(n), e as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    #[test]
    fn formal_sum_merges_and_drops_zeros() {
        let mut s = FormalSum::zero(1);
        s.push(ColoredTerm::plain(idx(&[1, 2]))).unwrap();
        s.push(ColoredTerm::plain(idx(&[1, 2]))).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&idx(&[1, 2]), &ColorMap::trivial(2)), int(2));
        s.push(ColoredTerm::plain(idx(&[1, 2])).scaled(&int(-2)))
            .unwrap();
        assert!(s.is_empty());
        let again = {
            let mut t = s.clone();
            t.scale(&int(3));
            t
        };
        assert_eq!(again, s);
    }

    #[test]
    fn level_mismatch() {
        let mut s = FormalSum::zero(2);
        let err = s.push(ColoredTerm::plain(idx(&[1]))).unwrap_err();
        assert!(matches!(err, Error::LevelMismatch(_)));
    }

    #[test]
    fn expression_arithmetic() {
        let a = Expression::atom(Atom::frak_z(3).unwrap());
        let b = Expression::atom(Atom::log(2).unwrap());
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert_eq!(ab, ba);
        assert!(ab.sub(&ba).is_zero());
        assert_eq!(ab.weight(), 4);
        assert_eq!(ab.level(), 2);
        assert_eq!(a.add(&b).to_string(), "𝔷(3) + log(2)");
    }

    #[test]
    fn evaluation() {
        let ctx = PrimeContext::new(7).unwrap();
        // 3·𝔷(3) − ζ(1,2) vanishes at 7
        let e = Expression::from(ColoredTerm::plain(idx(&[1, 2])))
            .sub(&Expression::atom(Atom::FrakZ(3)).scaled(&int(3)));
        assert_eq!(e.evaluate(&ctx), Ok(0));
        let half = Expression::constant(BigRational::new(BigInt::from(1), BigInt::from(7)));
        assert_eq!(
            half.evaluate(&ctx).unwrap_err().kind,
            SkipKind::CoefficientDenominator
        );
    }
}
