//! Concepts, assertions, fuzzy constraints, axioms and knowledge bases.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::degree::Degree;

/// Concept, role and individual names.
pub type Name = Arc<str>;

/// An ALC concept term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Primitive(Name),
    Not(Arc<Concept>),
    And(Arc<Concept>, Arc<Concept>),
    Or(Arc<Concept>, Arc<Concept>),
    Forall(Name, Arc<Concept>),
    Exists(Name, Arc<Concept>),
}

impl Concept {
    pub fn atom(name: &str) -> Self {
        Concept::Primitive(name.into())
    }

    pub fn negate(self) -> Self {
        Concept::Not(Arc::new(self))
    }

    pub fn and(self, other: Concept) -> Self {
        Concept::And(Arc::new(self), Arc::new(other))
    }

    pub fn or(self, other: Concept) -> Self {
        Concept::Or(Arc::new(self), Arc::new(other))
    }

    pub fn forall(role: &str, body: Concept) -> Self {
        Concept::Forall(role.into(), Arc::new(body))
    }

    pub fn exists(role: &str, body: Concept) -> Self {
        Concept::Exists(role.into(), Arc::new(body))
    }

    /// Number of nodes in the term tree.
    pub fn size(&self) -> usize {
        match self {
            Concept::Top | Concept::Bottom | Concept::Primitive(_) => 1,
            Concept::Not(c) | Concept::Forall(_, c) | Concept::Exists(_, c) => 1 + c.size(),
            Concept::And(c, d) | Concept::Or(c, d) => 1 + c.size() + d.size(),
        }
    }

    /// Number of quantifier (`∀`/`∃`) occurrences.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Concept::Top | Concept::Bottom | Concept::Primitive(_) => 0,
            Concept::Not(c) => c.quantifier_count(),
            Concept::Forall(_, c) | Concept::Exists(_, c) => 1 + c.quantifier_count(),
            Concept::And(c, d) | Concept::Or(c, d) => c.quantifier_count() + d.quantifier_count(),
        }
    }

    pub fn collect_primitives(&self, out: &mut BTreeSet<Name>) {
        match self {
            Concept::Top | Concept::Bottom => {}
            Concept::Primitive(name) => {
                out.insert(name.clone());
            }
            Concept::Not(c) | Concept::Forall(_, c) | Concept::Exists(_, c) => {
                c.collect_primitives(out)
            }
            Concept::And(c, d) | Concept::Or(c, d) => {
                c.collect_primitives(out);
                d.collect_primitives(out);
            }
        }
    }

    pub fn collect_roles(&self, out: &mut BTreeSet<Name>) {
        match self {
            Concept::Top | Concept::Bottom | Concept::Primitive(_) => {}
            Concept::Not(c) => c.collect_roles(out),
            Concept::Forall(r, c) | Concept::Exists(r, c) => {
                out.insert(r.clone());
                c.collect_roles(out);
            }
            Concept::And(c, d) | Concept::Or(c, d) => {
                c.collect_roles(out);
                d.collect_roles(out);
            }
        }
    }

    pub fn primitives(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_primitives(&mut out);
        out
    }

    /// True when negation only occurs directly in front of primitives.
    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Top | Concept::Bottom | Concept::Primitive(_) => true,
            Concept::Not(c) => matches!(**c, Concept::Primitive(_)),
            Concept::Forall(_, c) | Concept::Exists(_, c) => c.is_nnf(),
            Concept::And(c, d) | Concept::Or(c, d) => c.is_nnf() && d.is_nnf(),
        }
    }
}

/// An individual (user supplied) or a variable (introduced by the calculus).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    Individual(Name),
    Variable(u32),
}

impl Object {
    pub fn individual(name: &str) -> Self {
        Object::Individual(name.into())
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Object::Variable(_))
    }
}

/// `w:C` or `(w, w'):R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assertion {
    Concept { object: Object, concept: Concept },
    Role { subject: Object, filler: Object, role: Name },
}

impl Assertion {
    pub fn concept(object: &str, concept: Concept) -> Self {
        Assertion::Concept { object: Object::individual(object), concept }
    }

    pub fn role(subject: &str, filler: &str, role: &str) -> Self {
        Assertion::Role {
            subject: Object::individual(subject),
            filler: Object::individual(filler),
            role: role.into(),
        }
    }

    pub fn objects(&self) -> Vec<&Object> {
        match self {
            Assertion::Concept { object, .. } => vec![object],
            Assertion::Role { subject, filler, .. } => vec![subject, filler],
        }
    }

    pub fn concept_part(&self) -> Option<&Concept> {
        match self {
            Assertion::Concept { concept, .. } => Some(concept),
            Assertion::Role { .. } => None,
        }
    }

    /// Applies `f` to the concept of a concept assertion.
    pub fn map_concept<E>(
        &self,
        f: impl FnOnce(&Concept) -> Result<Concept, E>,
    ) -> Result<Assertion, E> {
        Ok(match self {
            Assertion::Concept { object, concept } => {
                Assertion::Concept { object: object.clone(), concept: f(concept)? }
            }
            role => role.clone(),
        })
    }
}

/// Comparison of a constraint: `≥`, `>`, `≤`, `<`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Less,
}

impl Relation {
    /// `≥` and `>` bound the degree from below.
    pub fn is_lower(self) -> bool {
        matches!(self, Relation::AtLeast | Relation::Greater)
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Greater | Relation::Less)
    }

    /// Mirror used when moving through a complement: `≥ ↔ ≤`, `> ↔ <`.
    pub fn mirror(self) -> Self {
        match self {
            Relation::AtLeast => Relation::AtMost,
            Relation::Greater => Relation::Less,
            Relation::AtMost => Relation::AtLeast,
            Relation::Less => Relation::Greater,
        }
    }

    /// Logical negation: `≥ ↔ <`, `> ↔ ≤`.
    pub fn negate(self) -> Self {
        match self {
            Relation::AtLeast => Relation::Less,
            Relation::Greater => Relation::AtMost,
            Relation::AtMost => Relation::Greater,
            Relation::Less => Relation::AtLeast,
        }
    }

    pub fn holds(self, value: &Degree, bound: &Degree) -> bool {
        match self {
            Relation::AtLeast => value >= bound,
            Relation::Greater => value > bound,
            Relation::AtMost => value <= bound,
            Relation::Less => value < bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::Greater => ">",
            Relation::AtMost => "<=",
            Relation::Less => "<",
        }
    }
}

/// `⟨α ⋈ n⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuzzyConstraint {
    pub assertion: Assertion,
    pub rel: Relation,
    pub degree: Degree,
}

impl FuzzyConstraint {
    pub fn new(assertion: Assertion, rel: Relation, degree: Degree) -> Self {
        FuzzyConstraint { assertion, rel, degree }
    }

    pub fn at_least(assertion: Assertion, degree: Degree) -> Self {
        Self::new(assertion, Relation::AtLeast, degree)
    }

    pub fn at_most(assertion: Assertion, degree: Degree) -> Self {
        Self::new(assertion, Relation::AtMost, degree)
    }

    /// The constraint satisfied by exactly the interpretations that violate `self`.
    pub fn negated(&self) -> Self {
        FuzzyConstraint {
            assertion: self.assertion.clone(),
            rel: self.rel.negate(),
            degree: self.degree.clone(),
        }
    }

    /// User-level fuzzy assertions are `⟨α ≥ n⟩` with `n > 0` or `⟨α ≤ n⟩` with `n < 1`.
    pub fn is_user_level(&self) -> bool {
        match self.rel {
            Relation::AtLeast => !self.degree.is_zero(),
            Relation::AtMost => !self.degree.is_one(),
            _ => false,
        }
    }

    pub fn mentions_variable(&self) -> bool {
        self.assertion.objects().iter().any(|o| o.is_variable())
    }
}

/// `A ≺ C` or `A :≈ C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    Specialisation { lhs: Name, rhs: Concept },
    Definition { lhs: Name, rhs: Concept },
}

impl Axiom {
    pub fn specialisation(lhs: &str, rhs: Concept) -> Self {
        Axiom::Specialisation { lhs: lhs.into(), rhs }
    }

    pub fn definition(lhs: &str, rhs: Concept) -> Self {
        Axiom::Definition { lhs: lhs.into(), rhs }
    }

    pub fn lhs(&self) -> &Name {
        match self {
            Axiom::Specialisation { lhs, .. } | Axiom::Definition { lhs, .. } => lhs,
        }
    }

    pub fn rhs(&self) -> &Concept {
        match self {
            Axiom::Specialisation { rhs, .. } | Axiom::Definition { rhs, .. } => rhs,
        }
    }
}

/// Fuzzy assertions plus fuzzy terminological axioms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub abox: Vec<FuzzyConstraint>,
    pub tbox: Vec<Axiom>,
}

impl KnowledgeBase {
    pub fn new(abox: Vec<FuzzyConstraint>, tbox: Vec<Axiom>) -> Self {
        KnowledgeBase { abox, tbox }
    }

    pub fn assertional(abox: Vec<FuzzyConstraint>) -> Self {
        KnowledgeBase { abox, tbox: Vec::new() }
    }

    pub fn is_purely_assertional(&self) -> bool {
        self.tbox.is_empty()
    }

    /// Individuals mentioned by the ABox, sorted by name.
    pub fn individuals(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for c in &self.abox {
            for object in c.assertion.objects() {
                if let Object::Individual(name) = object {
                    out.insert(name.clone());
                }
            }
        }
        out
    }

    /// Every primitive concept name used anywhere in the KB.
    pub fn concept_vocabulary(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for axiom in &self.tbox {
            out.insert(axiom.lhs().clone());
            axiom.rhs().collect_primitives(&mut out);
        }
        for c in &self.abox {
            if let Some(concept) = c.assertion.concept_part() {
                concept.collect_primitives(&mut out);
            }
        }
        out
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
