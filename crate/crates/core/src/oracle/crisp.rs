//! The crisp image `♯` of a fuzzy KB and crisp entailment.
//!
//! `♯⟨α ≥ n⟩ = α` and `♯⟨a:C ≤ n⟩ = a:¬C`; axioms keep their crisp form.
//! Crisp entailment `K ⊨ α` is decided by the fuzzy reasoner as
//! `{⟨β ≥ 1⟩ : β ∈ K} ⊨ ⟨α ≥ 0.5⟩`.

use thiserror::Error;

use crate::degree::Degree;
use crate::reasoner::{Reasoner, ReasonerError};
use crate::syntax::{Assertion, Axiom, FuzzyConstraint, KnowledgeBase, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrispError {
    #[error("`{0}` bounds a role from above and has no crisp image")]
    RoleUpperBound(Box<FuzzyConstraint>),
    #[error("`{0}` is not a fuzzy assertion (only >= and <= map to crisp assertions)")]
    Strict(Box<FuzzyConstraint>),
}

/// A crisp KB: assertions that hold outright plus a terminology.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrispKb {
    pub assertions: Vec<Assertion>,
    pub tbox: Vec<Axiom>,
}

pub fn crisp_map(c: &FuzzyConstraint) -> Result<Assertion, CrispError> {
    match (c.rel, &c.assertion) {
        (Relation::AtLeast, assertion) => Ok(assertion.clone()),
        (Relation::AtMost, Assertion::Concept { object, concept }) => {
            Ok(Assertion::Concept { object: object.clone(), concept: concept.clone().negate() })
        }
        (Relation::AtMost, Assertion::Role { .. }) => Err(CrispError::RoleUpperBound(Box::new(c.clone()))),
        _ => Err(CrispError::Strict(Box::new(c.clone()))),
    }
}

pub fn crisp_map_kb(kb: &KnowledgeBase) -> Result<CrispKb, CrispError> {
    Ok(CrispKb { assertions: kb.abox.iter().map(crisp_map).collect::<Result<_, _>>()?, tbox: kb.tbox.clone() })
}

impl CrispKb {
    /// The fuzzy KB asserting every crisp assertion to degree 1.
    pub fn to_fuzzy(&self) -> KnowledgeBase {
        KnowledgeBase::new(
            self.assertions.iter().map(|a| FuzzyConstraint::at_least(a.clone(), Degree::one())).collect(),
            self.tbox.clone(),
        )
    }
}

pub fn crisp_entails(kb: &CrispKb, query: &Assertion) -> Result<bool, ReasonerError> {
    Reasoner::new(&kb.to_fuzzy())?.entails(&FuzzyConstraint::at_least(query.clone(), Degree::half()))
}
