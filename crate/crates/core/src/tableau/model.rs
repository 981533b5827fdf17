//! Canonical model of a clash-free completion.
//!
//! Every primitive assertion gets the least degree allowed by its lower
//! bounds, where a strict bound `> n'` is met with `n' + ε`. A single ε is
//! used for the whole completion: half the smallest gap between distinct
//! values among `{0, 1}`, the degrees of the completion and their
//! complements. This keeps every `n' + ε` below any larger bound it has to
//! respect.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use super::{detect_clash, ClashWitness, ConstraintSet, RuleApplication};
use crate::degree::Degree;
use crate::semantics::{satisfies, Interpretation, ModelError};
use crate::syntax::{Assertion, Concept, FuzzyConstraint, Name, Object, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelExtractionError {
    #[error("constraint set contains a clash: {0}")]
    Clash(Box<ClashWitness>),
    #[error("constraint set is not complete: rule {} still applies", .0.rule)]
    NotComplete(Box<RuleApplication>),
    #[error("canonical degree of {assertion} violates the cap {rel} {bound}")]
    CapViolated { assertion: String, rel: Relation, bound: Degree },
    #[error("canonical model does not satisfy {0}")]
    Unsatisfied(Box<FuzzyConstraint>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Default)]
struct Bounds {
    at_least: Option<Degree>,
    greater: Option<Degree>,
}

impl Bounds {
    fn add(&mut self, rel: Relation, degree: &Degree) {
        let slot = match rel {
            Relation::AtLeast => &mut self.at_least,
            Relation::Greater => &mut self.greater,
            _ => return,
        };
        if slot.as_ref().is_none_or(|d| d < degree) {
            *slot = Some(degree.clone());
        }
    }

    /// Least value meeting every lower bound.
    fn glb(&self, epsilon: &BigRational) -> Option<Degree> {
        let shifted = |n: &Degree| n.checked_add(epsilon);
        match (&self.at_least, &self.greater) {
            (None, None) => Some(Degree::zero()),
            (None, Some(n)) => shifted(n),
            (Some(n), None) => Some(n.clone()),
            (Some(n), Some(m)) if n > m => Some(n.clone()),
            (Some(_), Some(m)) => shifted(m),
        }
    }
}

fn epsilon(set: &ConstraintSet) -> BigRational {
    let mut values: BTreeSet<Degree> = [Degree::zero(), Degree::one()].into_iter().collect();
    for c in set.iter() {
        values.insert(c.degree.clone());
        values.insert(c.degree.complement());
    }
    let values: Vec<&Degree> = values.iter().collect();
    let gap = values
        .windows(2)
        .map(|w| w[1].as_ratio() - w[0].as_ratio())
        .min()
        .unwrap_or_else(BigRational::one);
    gap / BigRational::from_integer(2.into())
}

/// Builds the canonical interpretation of a complete, clash-free set and
/// checks that it satisfies every constraint of the set.
pub fn extract_model(completion: &ConstraintSet) -> Result<Interpretation, ModelExtractionError> {
    if let Some(witness) = detect_clash(completion) {
        return Err(ModelExtractionError::Clash(Box::new(witness)));
    }
    let mut probe = completion.clone();
    if let Some(app) = probe.next_application() {
        return Err(ModelExtractionError::NotComplete(Box::new(app)));
    }

    let eps = epsilon(completion);
    let mut concept_bounds: BTreeMap<(Name, Object), Bounds> = BTreeMap::new();
    let mut role_bounds: BTreeMap<(Name, Object, Object), Bounds> = BTreeMap::new();
    for c in completion.iter() {
        match &c.assertion {
            Assertion::Concept { object, concept: Concept::Primitive(name) } => {
                concept_bounds.entry((name.clone(), object.clone())).or_default().add(c.rel, &c.degree)
            }
            Assertion::Role { subject, filler, role } => role_bounds
                .entry((role.clone(), subject.clone(), filler.clone()))
                .or_default()
                .add(c.rel, &c.degree),
            _ => {}
        }
    }

    let mut interp = Interpretation::new();
    for object in completion.objects() {
        interp.add_element(object);
    }
    let shift_error = |assertion: String, bound: &Bounds| ModelExtractionError::CapViolated {
        assertion,
        rel: Relation::AtMost,
        bound: bound.greater.clone().unwrap_or_else(Degree::one),
    };
    for ((name, object), bounds) in &concept_bounds {
        let value = bounds.glb(&eps).ok_or_else(|| shift_error(format!("{object} : {name}"), bounds))?;
        interp.set_concept(name, object.clone(), value);
    }
    for ((role, subject, filler), bounds) in &role_bounds {
        let label = format!("({subject}, {filler}) : {role}");
        let value = bounds.glb(&eps).ok_or_else(|| shift_error(label.clone(), bounds))?;
        check_caps(completion, role, subject, filler, &value, &label)?;
        interp.set_role(role, subject.clone(), filler.clone(), value);
    }

    for c in completion.iter() {
        if !satisfies(&interp, c)? {
            return Err(ModelExtractionError::Unsatisfied(Box::new(c.clone())));
        }
    }
    Ok(interp)
}

/// Upper caps on a role degree induced by universal lower bounds and
/// existential upper bounds that did not propagate along this pair.
fn check_caps(
    completion: &ConstraintSet,
    role: &Name,
    subject: &Object,
    filler: &Object,
    value: &Degree,
    label: &str,
) -> Result<(), ModelExtractionError> {
    for c in completion.iter() {
        let Assertion::Concept { object, concept } = &c.assertion else { continue };
        if object != subject {
            continue;
        }
        let (r, body, cap_rel, cap) = match (concept, c.rel) {
            (Concept::Forall(r, body), Relation::AtLeast) => (r, body, Relation::AtMost, c.degree.complement()),
            (Concept::Forall(r, body), Relation::Greater) => (r, body, Relation::Less, c.degree.complement()),
            (Concept::Exists(r, body), Relation::AtMost) => (r, body, Relation::AtMost, c.degree.clone()),
            (Concept::Exists(r, body), Relation::Less) => (r, body, Relation::Less, c.degree.clone()),
            _ => continue,
        };
        if r != role {
            continue;
        }
        let propagated = FuzzyConstraint::new(
            Assertion::Concept { object: filler.clone(), concept: (**body).clone() },
            c.rel,
            c.degree.clone(),
        );
        if !completion.contains(&propagated) && !cap_rel.holds(value, &cap) {
            return Err(ModelExtractionError::CapViolated { assertion: label.to_string(), rel: cap_rel, bound: cap });
        }
    }
    Ok(())
}
