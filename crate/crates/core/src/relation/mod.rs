//! Symbolic algebra of colored multiple harmonic values and the numeric
//! verifier for identities between them.

pub mod catalogue;
pub mod identity;
pub mod stuffle;
pub mod term;
pub mod transform;

pub use catalogue::{catalogue_to_json, parse_catalogue, parse_color_table, parse_named_color};
pub use identity::{
    broken_fixture, builtin, builtin_catalogue, decomposition_identity, kmy_identity, lemma_jsum,
    levels_identity, reversal_identity, stuffle_identity, verify_formal_identity,
    verify_lemma_jsum, Identity,
};
pub use stuffle::{quasi_shuffle_count, stuffle_product, stuffle_sums};
pub use term::{Atom, ColoredTerm, Expression, FormalSum};
pub use transform::{
    decompose_level_n, kmy_level2_split, lift_sum, lift_to_level, reverse_transform, Signed,
};
