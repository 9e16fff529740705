//! Fermat quotients `q_p(N) = (N^{p−1} − 1)/p mod p`, Wieferich sets, the
//! least non-Wieferich base `ℓ_p`, and the congruences linking `q_p` to
//! interval harmonic sums and colored values of weight one.

use crate::congruence::{Congruence, Outcome, SkipKind};
use crate::error::{Error, Result};
use crate::harmonic::{ColorMap, Index, PrimeContext};
use crate::prime::{gcd, is_prime, mul_mod, pow_mod_p2, PrimeRange};
use crate::report::CongruenceReport;
use serde::{Deserialize, Serialize};

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p > u32::MAX as u64 {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be a prime below 2^32"
        )));
    }
    Ok(())
}

/// `q_p(N) mod p`, from `N^{p−1} mod p²`.
pub fn fermat_quotient(n: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    if gcd(n, p) != 1 {
        return Err(Error::SharedFactor { base: n, p });
    }
    let lifted = pow_mod_p2(n, p - 1, p)?.value();
    // N^{p−1} ≡ 1 (mod p), so lifted − 1 is a multiple of p below p²
    Ok((lifted + p * p - 1) % (p * p) / p)
}

/// `p² | N^{p−1} − 1`, tested directly modulo `p²`.
pub fn is_wieferich_base(n: u64, p: u64) -> Result<bool> {
    check_prime(p)?;
    if gcd(n, p) != 1 {
        return Err(Error::SharedFactor { base: n, p });
    }
    Ok(pow_mod_p2(n, p - 1, p)?.value() == 1)
}

/// The least `N` with `2 <= N <= limit` and `q_p(N) ≢ 0`, if any.
pub fn ell_p_upto(p: u64, limit: u64) -> Result<Option<u64>> {
    check_prime(p)?;
    if p == 2 {
        return Err(Error::InvalidArgument(
            "ℓ_p is defined for odd primes".into(),
        ));
    }
    for n in 2..=limit {
        if gcd(n, p) != 1 {
            continue;
        }
        if fermat_quotient(n, p)? != 0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `ℓ_p`: the least `N >= 2` with `p ∤ q_p(N)`. Always below `p`.
pub fn ell_p(p: u64) -> Result<u64> {
    let ell = ell_p_upto(p, p - 1)?.ok_or_else(|| Error::ScanExhausted {
        p,
        what: "q_p(N) vanishes for every 2 <= N < p".into(),
    })?;
    debug_assert!(ell < p);
    Ok(ell)
}

/// `4 (ln p)²`.
pub fn lenstra_bound(p: u64) -> f64 {
    let l = (p as f64).ln();
    4.0 * l * l
}

/// `ℓ_p <= 4 (ln p)²`.
pub fn check_lenstra_bound(p: u64) -> Result<bool> {
    Ok((ell_p(p)? as f64) <= lenstra_bound(p))
}

/// Primes of the window in `W(N)`, i.e. with `p² | N^{p−1} − 1`.
pub fn wieferich_search(base: u64, range: &PrimeRange) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for p in range.primes() {
        if gcd(base, p) == 1 && is_wieferich_base(base, p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Odd primes of the window lying in `W(2) ∩ … ∩ W(M)`, found by bucketing
/// `ℓ_p`: the intersection is exactly `{p : ℓ_p > M}`.
pub fn wieferich_intersection(m: u64, range: &PrimeRange) -> Result<Vec<u64>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "M must be at least 2, got {m}"
        )));
    }
    let mut out = Vec::new();
    for p in range.primes().into_iter().filter(|&p| p > 2) {
        if ell_p(p)? > m {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelWitness {
    pub level: u64,
    pub weight: u32,
    pub p: u64,
    /// `q_p(N)`, nonzero at the witness.
    pub quotient: u64,
    /// Least `j` with `ζ^{[j]}_{p,N}(1) ≢ 0`.
    pub j: u64,
    pub zeta: u64,
    /// `ζ^{[j]}_{p,N}(1)^k`.
    pub power: u64,
}

/// Smallest odd prime `p <= bound`, `p ∤ N`, with `q_p(N) ≢ 0`. Since
/// `q_p(N) ≡ Σ_j j·ζ^{[j]}_{p,N}(1)`, some `ζ^{[j]}(1)` is then nonzero and
/// so is its `k`-th power, a nonzero value of weight `k` and level `N`.
pub fn nonzero_witness_level(level: u64, k: u32, bound: u64) -> Result<Option<LevelWitness>> {
    if level < 2 {
        return Err(Error::InvalidArgument(format!(
            "level must be at least 2, got {level}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidWeight(0));
    }
    if bound < 3 {
        return Ok(None);
    }
    let one = Index::new(vec![1])?;
    for p in PrimeRange::new(3, bound)?.primes() {
        if level % p == 0 {
            continue;
        }
        let quotient = fermat_quotient(level, p)?;
        if quotient == 0 {
            continue;
        }
        let ctx = PrimeContext::new(p)?;
        for j in 1..level {
            let zeta = ctx.zeta_colormap(&one, &ColorMap::bracket(level, 1, j)?)?;
            if zeta != 0 {
                let power = crate::prime::pow_mod_u64(zeta, k as u64, p);
                return Ok(Some(LevelWitness {
                    level,
                    weight: k,
                    p,
                    quotient,
                    j,
                    zeta,
                    power,
                }));
            }
        }
        return Err(Error::Inconsistent(format!(
            "q_{p}({level}) ≢ 0 but every ζ^[j](1) vanishes"
        )));
    }
    Ok(None)
}

fn neg(x: u64, p: u64) -> u64 {
    (p - x % p) % p
}

fn q_or_skip(n: u64, p: u64) -> std::result::Result<u64, Outcome> {
    fermat_quotient(n, p)
        .map_err(|_| Outcome::skip(SkipKind::BaseSharesFactor, format!("p divides {n}")))
}

/// `2 q_p(2) ≡ −s_p(0, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Eisenstein;

impl Congruence for Eisenstein {
    fn id(&self) -> String {
        "eisenstein".into()
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        Vec::new()
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        let q = fermat_quotient(2, p).expect("p odd");
        let s = ctx.s_pk(0, 2, 1).expect("p odd");
        Outcome::compare(2 * q % p, neg(s, p))
    }
}

/// `(N + 1) q_p(2) ≡ −Σ_{0 <= j < N/2} s_p(2j, 2N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sdi {
    pub n: u64,
}

impl Congruence for Sdi {
    fn id(&self) -> String {
        format!("sdi-N{}", self.n)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![SkipKind::LevelSharesFactor]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        let level = 2 * self.n;
        if level % p == 0 {
            return Outcome::skip(
                SkipKind::LevelSharesFactor,
                format!("p divides 2N = {level}"),
            );
        }
        let q = fermat_quotient(2, p).expect("p odd");
        let sum = (0..self.n.div_ceil(2)).fold(0u64, |acc, j| {
            (acc + ctx.s_pk(2 * j, level, 1).expect("p ∤ 2N")) % p
        });
        Outcome::compare(mul_mod((self.n + 1) % p, q, p), neg(sum, p))
    }
}

/// `N q_p(N) ≡ Σ_{j=1}^{N−1} j s_p(j, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lerch {
    pub n: u64,
}

impl Congruence for Lerch {
    fn id(&self) -> String {
        format!("lerch-N{}", self.n)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![SkipKind::LevelSharesFactor]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        if self.n % p == 0 {
            return Outcome::skip(
                SkipKind::LevelSharesFactor,
                format!("p divides N = {}", self.n),
            );
        }
        let q = fermat_quotient(self.n, p).expect("p ∤ N");
        let rhs = (1..self.n).fold(0u64, |acc, j| {
            (acc + mul_mod(j % p, ctx.s_pk(j, self.n, 1).expect("p ∤ N"), p)) % p
        });
        Outcome::compare(mul_mod(self.n % p, q, p), rhs)
    }
}

/// `q_p(2) ≡ −(2N/(N + 1)) Σ_{0 <= j < N/2} ζ^{[2j]}_{p,2N}(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ASdi {
    pub n: u64,
}

impl Congruence for ASdi {
    fn id(&self) -> String {
        format!("a-sdi-N{}", self.n)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![
            SkipKind::LevelSharesFactor,
            SkipKind::CoefficientDenominator,
        ]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        let level = 2 * self.n;
        if level % p == 0 {
            return Outcome::skip(
                SkipKind::LevelSharesFactor,
                format!("p divides 2N = {level}"),
            );
        }
        let Some(inv) = crate::prime::inv_mod_u64((self.n + 1) % p, p) else {
            return Outcome::skip(
                SkipKind::CoefficientDenominator,
                format!("p divides N + 1 = {}", self.n + 1),
            );
        };
        let one = Index::new(vec![1]).expect("positive");
        let sum = (0..self.n.div_ceil(2)).fold(0u64, |acc, j| {
            let color = ColorMap::bracket(level, 1, 2 * j).expect("2j < 2N");
            (acc + ctx.zeta_colormap(&one, &color).expect("p ∤ 2N")) % p
        });
        let coef = neg(mul_mod(level % p, inv, p), p);
        let q = fermat_quotient(2, p).expect("p odd");
        Outcome::compare(q, mul_mod(coef, sum, p))
    }
}

/// `q_p(N) ≡ Σ_{j=1}^{N−1} j ζ^{[j]}_{p,N}(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LerchLog {
    pub n: u64,
}

impl Congruence for LerchLog {
    fn id(&self) -> String {
        format!("lerch-log-N{}", self.n)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![SkipKind::LevelSharesFactor]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        if self.n % p == 0 {
            return Outcome::skip(
                SkipKind::LevelSharesFactor,
                format!("p divides N = {}", self.n),
            );
        }
        let one = Index::new(vec![1]).expect("positive");
        let rhs = (1..self.n).fold(0u64, |acc, j| {
            let color = ColorMap::bracket(self.n, 1, j).expect("j < N");
            let z = ctx.zeta_colormap(&one, &color).expect("p ∤ N");
            (acc + mul_mod(j % p, z, p)) % p
        });
        let q = fermat_quotient(self.n, p).expect("p ∤ N");
        Outcome::compare(q, rhs)
    }
}

/// `q_p(NM) ≡ q_p(N) + q_p(M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogAdditivity {
    pub n: u64,
    pub m: u64,
}

impl Congruence for LogAdditivity {
    fn id(&self) -> String {
        format!("log-additivity-{}-{}", self.n, self.m)
    }

    fn declared_skips(&self) -> Vec<SkipKind> {
        vec![SkipKind::BaseSharesFactor]
    }

    fn check(&self, ctx: &PrimeContext) -> Outcome {
        let p = ctx.p();
        let sides = (|| {
            let qn = q_or_skip(self.n, p)?;
            let qm = q_or_skip(self.m, p)?;
            let qnm = q_or_skip(self.n * self.m, p)?;
            Ok::<_, Outcome>((qnm, (qn + qm) % p))
        })();
        match sides {
            Ok((lhs, rhs)) => Outcome::compare(lhs, rhs),
            Err(skip) => skip,
        }
    }
}

fn positive(name: &str, n: u64, min: u64) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument(format!(
            "{name} must be at least {min}, got {n}"
        )));
    }
    Ok(())
}

pub fn verify_eisenstein(range: &PrimeRange) -> CongruenceReport {
    crate::congruence::verify(&Eisenstein, range)
}

pub fn verify_sdi(n: u64, range: &PrimeRange) -> Result<CongruenceReport> {
    positive("N", n, 1)?;
    Ok(crate::congruence::verify(&Sdi { n }, range))
}

pub fn verify_lerch(n: u64, range: &PrimeRange) -> Result<CongruenceReport> {
    positive("N", n, 2)?;
    Ok(crate::congruence::verify(&Lerch { n }, range))
}

pub fn verify_a_sdi(n: u64, range: &PrimeRange) -> Result<CongruenceReport> {
    positive("N", n, 1)?;
    Ok(crate::congruence::verify(&ASdi { n }, range))
}

pub fn verify_lerch_log_form(n: u64, range: &PrimeRange) -> Result<CongruenceReport> {
    positive("N", n, 2)?;
    Ok(crate::congruence::verify(&LerchLog { n }, range))
}

pub fn verify_log_additivity(n: u64, m: u64, range: &PrimeRange) -> Result<CongruenceReport> {
    positive("N", n, 1)?;
    positive("M", m, 1)?;
    n.checked_mul(m)
        .ok_or_else(|| Error::InvalidArgument("N·M overflows".into()))?;
    Ok(crate::congruence::verify(&LogAdditivity { n, m }, range))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(fermat_quotient(2, 3).unwrap(), 1);
        assert_eq!(fermat_quotient(2, 5).unwrap(), 3);
        assert_eq!(fermat_quotient(3, 7).unwrap(), 6);
        assert_eq!(fermat_quotient(6, 5).unwrap(), 4);
        assert_eq!(fermat_quotient(3, 1093).unwrap(), 312);
        for p in [3, 5, 7, 101, 4294967291] {
            assert_eq!(fermat_quotient(1, p).unwrap(), 0);
        }
        assert_eq!(
            fermat_quotient(10, 5),
            Err(Error::SharedFactor { base: 10, p: 5 })
        );
    }

    #[test]
    fn wieferich_examples() {
        assert!(!is_wieferich_base(2, 3).unwrap());
        assert!(is_wieferich_base(2, 1093).unwrap());
        assert!(is_wieferich_base(2, 3511).unwrap());
        assert_eq!(fermat_quotient(2, 1093).unwrap(), 0);
    }

    #[test]
    fn ell_examples() {
        assert_eq!(ell_p(3).unwrap(), 2);
        assert_eq!(ell_p(5).unwrap(), 2);
        assert_eq!(ell_p(1093).unwrap(), 3);
        assert!(check_lenstra_bound(3).unwrap());
        assert!(check_lenstra_bound(1093).unwrap());
        assert!((lenstra_bound(1093) - 195.8).abs() < 0.1);
    }

    #[test]
    fn intersection_examples() {
        let r = PrimeRange::new(3, 1000).unwrap();
        assert!(wieferich_intersection(2, &r).unwrap().is_empty());
        assert!(wieferich_intersection(1, &r).is_err());
    }

    #[test]
    fn level_witnesses() {
        let w = nonzero_witness_level(2, 1, 100).unwrap().unwrap();
        assert_eq!((w.p, w.quotient, w.j), (3, 1, 1));
        let w5 = nonzero_witness_level(2, 5, 100).unwrap().unwrap();
        assert_eq!(w5.p, 3);
        assert_eq!(w5.power, crate::prime::pow_mod_u64(w5.zeta, 5, 3));
        let w = nonzero_witness_level(6, 1, 100).unwrap().unwrap();
        assert_eq!((w.p, w.quotient), (5, 4));
    }

    #[test]
    fn eisenstein_examples() {
        for p in [3, 5, 7] {
            assert_eq!(Eisenstein.check(&ctx(p)), Outcome::Pass);
        }
    }

    #[test]
    fn sdi_lerch_examples() {
        assert_eq!(Sdi { n: 2 }.check(&ctx(7)), Outcome::Pass);
        assert_eq!(Sdi { n: 3 }.check(&ctx(11)), Outcome::Pass);
        assert!(matches!(Sdi { n: 3 }.check(&ctx(3)), Outcome::Skip(_)));
        assert_eq!(Lerch { n: 3 }.check(&ctx(7)), Outcome::Pass);
        assert_eq!(Lerch { n: 2 }.check(&ctx(5)), Outcome::Pass);
        assert_eq!(Lerch { n: 4 }.check(&ctx(11)), Outcome::Pass);
        // N = 1 is Eisenstein
        for p in [3, 5, 7, 11, 13] {
            assert_eq!(Sdi { n: 1 }.check(&ctx(p)), Eisenstein.check(&ctx(p)));
        }
    }

    #[test]
    fn colored_forms() {
        assert_eq!(ASdi { n: 1 }.check(&ctx(5)), Outcome::Pass);
        assert_eq!(ASdi { n: 2 }.check(&ctx(7)), Outcome::Pass);
        assert_eq!(ASdi { n: 3 }.check(&ctx(11)), Outcome::Pass);
        assert!(matches!(
            ASdi { n: 4 }.check(&ctx(5)),
            Outcome::Skip(r) if r.kind == SkipKind::CoefficientDenominator
        ));
        assert_eq!(LerchLog { n: 2 }.check(&ctx(5)), Outcome::Pass);
        assert_eq!(LerchLog { n: 3 }.check(&ctx(7)), Outcome::Pass);
        assert_eq!(LerchLog { n: 4 }.check(&ctx(11)), Outcome::Pass);
    }

    #[test]
    fn additivity() {
        assert_eq!(fermat_quotient(4, 5).unwrap(), 1);
        assert_eq!(fermat_quotient(6, 7).unwrap(), 1);
        assert_eq!(LogAdditivity { n: 2, m: 2 }.check(&ctx(5)), Outcome::Pass);
        assert_eq!(LogAdditivity { n: 2, m: 3 }.check(&ctx(7)), Outcome::Pass);
        assert!(matches!(
            LogAdditivity { n: 2, m: 3 }.check(&ctx(3)),
            Outcome::Skip(_)
        ));
        let r = verify_log_additivity(1, 5, &PrimeRange::new(3, 200).unwrap()).unwrap();
        assert!(r.is_clean());
    }

    #[test]
    fn reports_over_a_window() {
        let r = PrimeRange::new(3, 3000).unwrap();
        assert!(verify_eisenstein(&r).is_clean());
        for n in 1..=6 {
            assert!(verify_sdi(n, &r).unwrap().is_clean());
            assert!(verify_a_sdi(n, &r).unwrap().is_clean());
        }
        for n in 2..=6 {
            assert!(verify_lerch(n, &r).unwrap().is_clean());
            assert!(verify_lerch_log_form(n, &r).unwrap().is_clean());
        }
        assert!(verify_lerch(1, &r).is_err());
    }
}
