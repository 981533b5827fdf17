//! Reasoning in fuzzy ALC under Zadeh semantics.
//!
//! Knowledge bases hold graded assertions `⟨α ≥ n⟩` / `⟨α ≤ n⟩` and an
//! acyclic terminology. Entailment, best truth-value bounds and subsumption
//! are decided with a constraint-propagation tableau over exact rational
//! degrees.

pub mod degree;
pub mod oracle;
pub mod parser;
pub mod reasoner;
pub mod semantics;
pub mod syntax;
pub mod tableau;
pub mod terminology;

pub use degree::{Degree, DegreeError};
pub use syntax::{Assertion, Axiom, Concept, FuzzyConstraint, KnowledgeBase, Name, Object, Relation};
