//! Per-prime verification of identities between expressions, and the
//! built-in catalogue.

use super::stuffle::stuffle_product;
use super::term::{lcm, power, Atom, ColoredTerm, Expression};
use super::transform::{decompose_level_n, kmy_level2_split, lift_to_level, reverse_transform};
use crate::congruence::{verify, Congruence, Outcome, SkipKind};
use crate::error::{Error, Result};
use crate::harmonic::{ColorMap, Index, PrimeContext};
use crate::prime::PrimeRange;
use crate::report::CongruenceReport;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// `lhs ≡ rhs` at every prime `p ∤ N` with `p > weight + 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    id: String,
    description: Option<String>,
    level: u64,
    lhs: Expression,
    rhs: Expression,
    skips: Option<Vec<SkipKind>>,
}

/// Level of the colored and interval atoms only; `log` bases are handled
/// by their own skip rule.
fn color_level(e: &Expression) -> u64 {
    e.atoms()
        .filter(|a| !matches!(a, Atom::Log(_)))
        .fold(1, |l, a| lcm(l, a.level()))
}

impl Identity {
    /// Level inferred as the `lcm` of all atom levels.
    pub fn new(id: impl Into<String>, lhs: Expression, rhs: Expression) -> Self {
        let level = lcm(color_level(&lhs), color_level(&rhs));
        Identity {
            id: id.into(),
            description: None,
            level,
            lhs,
            rhs,
            skips: None,
        }
    }

    /// Declared level; every atom level must divide it.
    pub fn with_level(
        id: impl Into<String>,
        level: u64,
        lhs: Expression,
        rhs: Expression,
    ) -> Result<Self> {
        let id = id.into();
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        let needed = lcm(color_level(&lhs), color_level(&rhs));
        if level % needed != 0 {
            return Err(Error::LevelMismatch(format!(
                "identity {id} declares level {level}, but its terms need a multiple of {needed}"
            )));
        }
        Ok(Identity {
            id,
            description: None,
            level,
            lhs,
            rhs,
            skips: None,
        })
    }

    pub fn described(mut self, text: impl Into<String>) -> Self {
        self.description = Some(text.into());
        self
    }

    /// Replaces the inferred precondition set; under strict verification
    /// any other skip reason counts as a failure.
    pub fn with_skips(mut self, kinds: Vec<SkipKind>) -> Self {
        self.skips = Some(kinds);
        self
    }

    /// The explicit precondition set, if one was given.
    pub fn explicit_skips(&self) -> Option<&[SkipKind]> {
        self.skips.as_deref()
    }

    /// Skip reasons this identity can legitimately produce: the weight
    /// bound always, the level only above 1, coefficient denominators and
    /// logarithm bases only when present.
    pub fn inferred_skips(&self) -> Vec<SkipKind> {
        let mut kinds = vec![SkipKind::SmallPrime];
        if self.level > 1 {
            kinds.push(SkipKind::LevelSharesFactor);
        }
        let sides = [&self.lhs, &self.rhs];
        if sides
            .iter()
            .any(|e| e.monomials().any(|(c, _)| !c.denom().is_one()))
        {
            kinds.push(SkipKind::CoefficientDenominator);
        }
        if sides
            .iter()
            .any(|e| e.atoms().any(|a| matches!(a, Atom::Log(_))))
        {
            kinds.push(SkipKind::BaseSharesFactor);
        }
        kinds
    }

    pub fn id_str(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> Option<&str> {
        self.description.as_deref()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.lhs.weight().max(self.rhs.weight())
    }

    pub fn lhs(&self) -> &Expression {
        &self.lhs
    }

    pub fn rhs(&self) -> &Expression {
        &self.rhs
    }

    /// Both sides at one prime, or the reason the prime is skipped.
    pub fn sides(&self, ctx: &PrimeContext) -> std::result::Result<(u64, u64), Outcome> {
        let p = ctx.p();
        if self.level % p == 0 {
            return Err(Outcome::skip(
                SkipKind::LevelSharesFactor,
                format!("p divides the level {}", self.level),
            ));
        }
        let w = self.weight() as u64;
        if p <= w + 2 {
            return Err(Outcome::skip(
                SkipKind::SmallPrime,
                format!("p <= weight + 2 = {}", w + 2),
            ));
        }
        let lhs = self.lhs.evaluate(ctx).map_err(Outcome::Skip)?;
        let rhs = self.rhs.evaluate(ctx).map_err(Outcome::Skip)?;
        Ok((lhs, rhs))
    }
}

impl Congruence for Identity {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        match &self.skips {
            Some(k) => k.clone(),
            None => self.inferred_skips(),
        }
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        match self.sides(ctx) {
            Ok((lhs, rhs)) => Outcome::compare(lhs, rhs),
            Err(skip) => skip,
        }
    }
}

pub fn verify_formal_identity(identity: &Identity, range: &PrimeRange) -> CongruenceReport {
    verify(identity, range)
}

/// The interval sum over `(jp/N, (j+1)p/N)` against `N^{wt} ζ^{[j]}_N(k)`.
pub fn lemma_jsum(k: &Index, level: u64, j: u64) -> Result<Identity> {
    let lhs = Expression::atom(Atom::interval(k.clone(), level, j)?);
    let color = ColorMap::bracket(level, k.depth(), j)?;
    let rhs = Expression::atom(Atom::zeta(k.clone(), color)?).scaled(&power(level, k.weight()));
    Ok(Identity::new(
        format!("jsum-{}-N{level}-j{j}", slug(k)),
        lhs,
        rhs,
    ))
}

pub fn verify_lemma_jsum(
    k: &Index,
    level: u64,
    j: u64,
    range: &PrimeRange,
) -> Result<CongruenceReport> {
    Ok(verify(&lemma_jsum(k, level, j)?, range))
}

/// `1.2.3` for `(1, 2, 3)`, `e` for the empty index.
fn slug(k: &Index) -> String {
    if k.is_empty() {
        return "e".into();
    }
    k.parts()
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(".")
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn idx(parts: &[u32]) -> Index {
    Index::new(parts.to_vec()).expect("positive parts")
}

fn plain(parts: &[u32]) -> Expression {
    Expression::from(ColoredTerm::plain(idx(parts)))
}

fn bracket(parts: &[u32], level: u64, j: u64) -> Expression {
    Expression::from(ColoredTerm::bracket(idx(parts), level, j).expect("j < level"))
}

/// `ζ(k) = Σ` of its level-`N` multi-cut decomposition.
pub fn decomposition_identity(k: &Index, level: u64) -> Result<Identity> {
    let lhs = Expression::from(ColoredTerm::plain(k.clone()));
    Ok(Identity::new(
        format!("decomposition-{}-N{level}", slug(k)),
        lhs,
        decompose_level_n(k, level)?,
    ))
}

/// `ζ(k)` against its level-2 splitting.
pub fn kmy_identity(k: &Index) -> Result<Identity> {
    let lhs = Expression::from(ColoredTerm::plain(k.clone()));
    Ok(Identity::new(
        format!("kmy-{}", slug(k)),
        lhs,
        kmy_level2_split(k)?,
    ))
}

/// `ζ^c(k) = (−1)^{wt} ζ^{c'}(reversed k)`.
pub fn reversal_identity(t: &ColoredTerm) -> Identity {
    let r = reverse_transform(t);
    let s = BigRational::from_integer(BigInt::from(r.sign));
    Identity::new(
        format!("reversal-{}-N{}", slug(&t.index), t.level()),
        Expression::from(t.clone()),
        Expression::from(r.term).scaled(&s),
    )
}

/// `ζ^f(k)·ζ^g(l)` against its stuffle expansion.
pub fn stuffle_identity(a: &ColoredTerm, b: &ColoredTerm) -> Result<Identity> {
    let lhs = Expression::from(a.clone()).mul(&Expression::from(b.clone()));
    let rhs = stuffle_product(a, b)?.to_expression();
    Ok(Identity::new(
        format!(
            "stuffle-{}-{}-N{}",
            slug(&a.index),
            slug(&b.index),
            a.level()
        ),
        lhs,
        rhs,
    ))
}

/// A level-`N` term against the sum of its lifts to level `M`.
pub fn levels_identity(t: &ColoredTerm, target: u64) -> Result<Identity> {
    let rhs = lift_to_level(t, target)?.to_expression();
    Ok(Identity::new(
        format!("levels-{}-N{}-M{target}", slug(&t.index), t.level()),
        Expression::from(t.clone()),
        rhs,
    ))
}

/// Identities shipped with the library; each is verified over a prime
/// window like any user-supplied one.
pub fn builtin_catalogue() -> Vec<Identity> {
    let mut out = Vec::new();

    let example = plain(&[1, 2, 3])
        .scaled(&rat(2, 1))
        .add(&plain(&[1, 2, 1, 2]))
        .add(&plain(&[1, 2, 2, 1]))
        .add(&plain(&[1, 1, 1, 3]));
    out.push(
        Identity::new("example-relation", example, Expression::zero())
            .described("2ζ(1,2,3) + ζ(1,2,1,2) + ζ(1,2,2,1) + ζ(1,1,1,3) = 0"),
    );

    out.push(
        Identity::new(
            "vhz-1-2",
            plain(&[1, 2]),
            Expression::atom(Atom::FrakZ(3)).scaled(&rat(3, 1)),
        )
        .described("ζ(1,2) = 3𝔷(3)"),
    );

    let z1 = ColoredTerm::plain(idx(&[1]));
    out.push(
        stuffle_identity(&z1, &z1)
            .expect("same level")
            .described("ζ(1)ζ(1) = 2ζ(1,1) + ζ(2)"),
    );
    let f = ColoredTerm::bracket(idx(&[2, 3]), 3, 1).expect("valid");
    let g = ColoredTerm::bracket(idx(&[5]), 3, 2).expect("valid");
    out.push(
        stuffle_identity(&f, &g)
            .expect("same level")
            .described("depth (2,1) colored harmonic product at level 3"),
    );

    out.push(reversal_identity(&ColoredTerm::plain(idx(&[1, 2]))).described("ζ(1,2) = −ζ(2,1)"));
    out.push(
        reversal_identity(&ColoredTerm::bracket(idx(&[1]), 3, 1).expect("valid"))
            .described("reversal of ζ^[1]_3(1)"),
    );

    out.push(
        decomposition_identity(&idx(&[1, 2]), 3)
            .expect("valid")
            .described("ζ(1,2) as level-3 bracket products"),
    );
    out.push(
        kmy_identity(&idx(&[1, 2]))
            .expect("valid")
            .described("ζ(1,2) split at level 2"),
    );

    let even =
        ColoredTerm::unit(idx(&[1]), ColorMap::uniform(2, vec![0]).expect("valid")).expect("valid");
    out.push(
        levels_identity(&even, 4)
            .expect("2 divides 4")
            .described("level-2 value as the sum of its two level-4 lifts"),
    );

    out.push(
        lemma_jsum(&idx(&[2]), 3, 1)
            .expect("valid")
            .described("interval sum over (p/3, 2p/3) against 9ζ^[1]_3(2)"),
    );

    let s02 = Expression::atom(Atom::interval(idx(&[1]), 2, 0).expect("valid"));
    out.push(
        Identity::new(
            "eisenstein-formal",
            Expression::atom(Atom::Log(2)).scaled(&rat(2, 1)),
            s02.scaled(&rat(-1, 1)),
        )
        .described("2 log 2 = −s(0, 2)"),
    );

    let lerch_log = (1..3).fold(Expression::zero(), |e, j| {
        e.add(&bracket(&[1], 3, j).scaled(&rat(j as i64, 1)))
    });
    out.push(
        Identity::new("lerch-log-N3", Expression::atom(Atom::Log(3)), lerch_log)
            .described("log 3 = ζ^[1]_3(1) + 2ζ^[2]_3(1)"),
    );

    out.push(
        Identity::new(
            "a-sdi-N2",
            Expression::atom(Atom::Log(2)),
            bracket(&[1], 4, 0).scaled(&rat(-4, 3)),
        )
        .described("log 2 = −(4/3)ζ^[0]_4(1)"),
    );

    let c2 = rat(1, 8) - rat(1, 27) - rat(1, 64) + rat(1, 1728);
    out.push(
        Identity::new(
            "level12-bracket2-k3",
            bracket(&[3], 12, 2).scaled(&rat(2, 1)),
            Expression::atom(Atom::FrakZ(3)).scaled(&c2),
        )
        .described("2ζ^[2]_12(3) = (2⁻³ − 3⁻³ − 4⁻³ + 12⁻³)𝔷(3)"),
    );

    out
}

pub fn builtin(id: &str) -> Option<Identity> {
    builtin_catalogue().into_iter().find(|i| i.id == id)
}

/// A deliberately false identity, `ζ(1,2) = 𝔷(3)`, for exercising failure
/// reporting.
pub fn broken_fixture() -> Identity {
    Identity::new(
        "broken-fixture",
        plain(&[1, 2]),
        Expression::atom(Atom::FrakZ(3)),
    )
}
