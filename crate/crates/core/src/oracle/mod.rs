//! Independent checks for the reasoner.
//!
//! [`crisp`] maps fuzzy KBs to crisp ones and decides crisp entailment, and
//! [`grid`] decides fuzzy entailment by searching finite interpretations
//! whose degrees come from a fixed grid.

pub mod crisp;
pub mod grid;

use serde::Serialize;

use crate::syntax::{FuzzyConstraint, Relation};

pub use crisp::{crisp_entails, crisp_map, crisp_map_kb, CrispError, CrispKb};
pub use grid::{default_domain_bound, grid_oracle_entails, GridError, GridVerdict};

/// Position of a fuzzy assertion relative to 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormalisationClass {
    /// `≥ n` with `n > 0.5`, or `≤ n` with `n < 0.5`.
    KbNormalised,
    /// `≥ n` with `n ≤ 0.5`, or `≤ n` with `n ≥ 0.5`.
    QueryNormalised,
    /// Strict relations.
    Neither,
    /// Only produced by [`classify_all`] for an empty set.
    Both,
}

pub fn classify_normalisation(c: &FuzzyConstraint) -> NormalisationClass {
    let half = crate::degree::Degree::half();
    match c.rel {
        Relation::AtLeast if c.degree > half => NormalisationClass::KbNormalised,
        Relation::AtLeast => NormalisationClass::QueryNormalised,
        Relation::AtMost if c.degree < half => NormalisationClass::KbNormalised,
        Relation::AtMost => NormalisationClass::QueryNormalised,
        _ => NormalisationClass::Neither,
    }
}

/// Common class of a set of constraints.
pub fn classify_all<'a>(constraints: impl IntoIterator<Item = &'a FuzzyConstraint>) -> NormalisationClass {
    let mut class = NormalisationClass::Both;
    for c in constraints {
        let next = classify_normalisation(c);
        class = match (class, next) {
            (NormalisationClass::Both, x) => x,
            (x, y) if x == y => x,
            _ => return NormalisationClass::Neither,
        };
    }
    class
}
