//! Finite multiple zeta values of level `N` modulo primes, Bernoulli numbers
//! mod `p`, Fermat quotients, and large-scale congruence verification.

pub mod bernoulli;
pub mod cli;
pub mod congruence;
pub mod driver;
pub mod error;
pub mod harmonic;
pub mod job;
pub mod prime;
pub mod quotient;
pub mod relation;
pub mod report;

pub use error::{Error, Result};
