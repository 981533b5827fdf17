//! Finite fuzzy interpretations and the min/max (Zadeh) semantics.
//!
//! Every lookup that is not listed explicitly defaults to degree 0, so an
//! [`Interpretation`] is a total function over its finite domain.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::degree::Degree;
use crate::syntax::{Assertion, Axiom, Concept, FuzzyConstraint, KnowledgeBase, Name, Object};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("element {0:?} is not in the interpretation domain")]
    UnknownElement(Object),
    #[error("individual `{0}` is not mapped to a domain element")]
    UnmappedIndividual(Name),
    #[error("individuals `{0}` and `{1}` are mapped to the same element")]
    NonInjective(Name, Name),
}

/// A fuzzy interpretation over a finite domain.
///
/// Domain elements are represented as [`Object`]s. Individuals are mapped
/// into the domain through an injective map; variables denote themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interpretation {
    domain: BTreeSet<Object>,
    individuals: BTreeMap<Name, Object>,
    concepts: HashMap<(Name, Object), Degree>,
    roles: HashMap<(Name, Object, Object), Degree>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `element` to the domain. Individual elements are mapped to
    /// themselves.
    pub fn add_element(&mut self, element: Object) {
        if let Object::Individual(name) = &element {
            self.individuals.insert(name.clone(), element.clone());
        }
        self.domain.insert(element);
    }

    /// Maps `name` to `element` (which is added to the domain).
    pub fn map_individual(&mut self, name: &Name, element: Object) -> Result<(), ModelError> {
        if let Some((other, _)) =
            self.individuals.iter().find(|(n, e)| **e == element && *n != name)
        {
            return Err(ModelError::NonInjective(other.clone(), name.clone()));
        }
        self.domain.insert(element.clone());
        self.individuals.insert(name.clone(), element);
        Ok(())
    }

    pub fn set_concept(&mut self, concept: &str, element: Object, degree: Degree) {
        self.concepts.insert((concept.into(), element), degree);
    }

    pub fn set_role(&mut self, role: &str, from: Object, to: Object, degree: Degree) {
        self.roles.insert((role.into(), from, to), degree);
    }

    pub fn domain(&self) -> &BTreeSet<Object> {
        &self.domain
    }

    pub fn individual_map(&self) -> &BTreeMap<Name, Object> {
        &self.individuals
    }

    /// Degree of a primitive concept at `element` (0 when unlisted).
    pub fn concept_degree(&self, concept: &Name, element: &Object) -> Degree {
        self.concepts
            .get(&(concept.clone(), element.clone()))
            .cloned()
            .unwrap_or_else(Degree::zero)
    }

    /// Degree of a role between two elements (0 when unlisted).
    pub fn role_degree(&self, role: &Name, from: &Object, to: &Object) -> Degree {
        self.roles
            .get(&(role.clone(), from.clone(), to.clone()))
            .cloned()
            .unwrap_or_else(Degree::zero)
    }

    /// Listed primitive memberships, sorted for stable output.
    pub fn concept_entries(&self) -> Vec<(&Name, &Object, &Degree)> {
        let mut out: Vec<_> = self.concepts.iter().map(|((c, e), d)| (c, e, d)).collect();
        out.sort();
        out
    }

    /// Listed role memberships, sorted for stable output.
    pub fn role_entries(&self) -> Vec<(&Name, &Object, &Object, &Degree)> {
        let mut out: Vec<_> = self.roles.iter().map(|((r, a, b), d)| (r, a, b, d)).collect();
        out.sort();
        out
    }

    /// Resolves an object of an assertion to its domain element.
    pub fn resolve(&self, object: &Object) -> Result<Object, ModelError> {
        let element = match object {
            Object::Individual(name) => self
                .individuals
                .get(name)
                .cloned()
                .ok_or_else(|| ModelError::UnmappedIndividual(name.clone()))?,
            Object::Variable(_) => object.clone(),
        };
        if !self.domain.contains(&element) {
            return Err(ModelError::UnknownElement(element));
        }
        Ok(element)
    }
}

/// Truth degree of `concept` at the domain element `element`.
pub fn evaluate_concept(
    interp: &Interpretation,
    concept: &Concept,
    element: &Object,
) -> Result<Degree, ModelError> {
    if !interp.domain.contains(element) {
        return Err(ModelError::UnknownElement(element.clone()));
    }
    Ok(eval(interp, concept, element))
}

fn eval(interp: &Interpretation, concept: &Concept, element: &Object) -> Degree {
    match concept {
        Concept::Top => Degree::one(),
        Concept::Bottom => Degree::zero(),
        Concept::Primitive(name) => interp.concept_degree(name, element),
        Concept::Not(c) => eval(interp, c, element).complement(),
        Concept::And(c, d) => eval(interp, c, element).min(eval(interp, d, element)),
        Concept::Or(c, d) => eval(interp, c, element).max(eval(interp, d, element)),
        Concept::Forall(role, c) => interp
            .domain
            .iter()
            .map(|next| {
                interp.role_degree(role, element, next).complement().max(eval(interp, c, next))
            })
            .min()
            .unwrap_or_else(Degree::one),
        Concept::Exists(role, c) => interp
            .domain
            .iter()
            .map(|next| interp.role_degree(role, element, next).min(eval(interp, c, next)))
            .max()
            .unwrap_or_else(Degree::zero),
    }
}

/// Truth degree of an assertion (concept membership or role degree).
pub fn evaluate_assertion(interp: &Interpretation, assertion: &Assertion) -> Result<Degree, ModelError> {
    match assertion {
        Assertion::Concept { object, concept } => {
            let element = interp.resolve(object)?;
            Ok(eval(interp, concept, &element))
        }
        Assertion::Role { subject, filler, role } => {
            let from = interp.resolve(subject)?;
            let to = interp.resolve(filler)?;
            Ok(interp.role_degree(role, &from, &to))
        }
    }
}

pub fn satisfies(interp: &Interpretation, constraint: &FuzzyConstraint) -> Result<bool, ModelError> {
    let value = evaluate_assertion(interp, &constraint.assertion)?;
    Ok(constraint.rel.holds(&value, &constraint.degree))
}

/// Specialisations require `A(d) ≤ C(d)` and definitions `A(d) = C(d)` at every element.
pub fn satisfies_axiom(interp: &Interpretation, axiom: &Axiom) -> bool {
    let lhs = Concept::Primitive(axiom.lhs().clone());
    interp.domain.iter().all(|d| {
        let a = eval(interp, &lhs, d);
        let c = eval(interp, axiom.rhs(), d);
        match axiom {
            Axiom::Specialisation { .. } => a <= c,
            Axiom::Definition { .. } => a == c,
        }
    })
}

pub fn satisfies_kb(interp: &Interpretation, kb: &KnowledgeBase) -> Result<bool, ModelError> {
    for constraint in &kb.abox {
        if !satisfies(interp, constraint)? {
            return Ok(false);
        }
    }
    Ok(kb.tbox.iter().all(|axiom| satisfies_axiom(interp, axiom)))
}

/// Checks every constraint, returning the first violated one.
pub fn first_violation<'a>(
    interp: &Interpretation,
    constraints: impl IntoIterator<Item = &'a FuzzyConstraint>,
) -> Result<Option<&'a FuzzyConstraint>, ModelError> {
    for c in constraints {
        if !satisfies(interp, c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}
