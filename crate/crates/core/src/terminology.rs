//! Terminology validation and knowledge-base expansion.
//!
//! Expansion turns a KB with an acyclic terminology into a purely
//! assertional one: specialisations `A ≺ C` become definitions
//! `A :≈ C ⊓ A*` with a fresh primitive `A*`, defined names are unfolded
//! inside the terminology until only undefined names remain, and the
//! unfolded terms are then substituted into every assertion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Axiom, Concept, FuzzyConstraint, KnowledgeBase, Name};

/// Default cap on the total number of concept nodes produced by expansion.
pub const DEFAULT_EXPANSION_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    DuplicateLhs(Name),
    /// `path[0]` uses `path[1]` uses ... uses `path[0]`.
    Cycle(Vec<Name>),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateLhs(name) => {
                write!(f, "`{name}` appears more than once on the left-hand side of an axiom")
            }
            Diagnostic::Cycle(path) => {
                let names: Vec<&str> = path.iter().map(|n| &**n).collect();
                write!(f, "cyclic terminology: {} -> {}", names.join(" -> "), names[0])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TerminologyError {
    #[error("invalid terminology: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("expansion exceeded the budget of {budget} concept nodes")]
    BudgetExceeded { budget: usize },
}

/// Reports duplicate left-hand sides and cycles of the `uses` relation.
pub fn validate_terminology(tbox: &[Axiom]) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    let mut rhs_by_lhs: BTreeMap<Name, Vec<&Concept>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for axiom in tbox {
        if !seen.insert(axiom.lhs().clone()) {
            diagnostics.push(Diagnostic::DuplicateLhs(axiom.lhs().clone()));
        }
        rhs_by_lhs.entry(axiom.lhs().clone()).or_default().push(axiom.rhs());
    }

    // Only names with axioms can take part in a cycle.
    let uses: BTreeMap<Name, Vec<Name>> = rhs_by_lhs
        .iter()
        .map(|(lhs, rhss)| {
            let mut direct = BTreeSet::new();
            for rhs in rhss {
                rhs.collect_primitives(&mut direct);
            }
            let direct = direct.into_iter().filter(|n| rhs_by_lhs.contains_key(n)).collect();
            (lhs.clone(), direct)
        })
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let mut marks: HashMap<Name, Mark> = uses.keys().map(|k| (k.clone(), Mark::Fresh)).collect();
    for root in uses.keys() {
        if marks[root] != Mark::Fresh {
            continue;
        }
        // Iterative DFS; `path` holds the active chain.
        let mut path: Vec<Name> = vec![root.clone()];
        let mut cursor: Vec<usize> = vec![0];
        marks.insert(root.clone(), Mark::Active);
        while let Some(node) = path.last().cloned() {
            let i = *cursor.last().unwrap();
            let succs = &uses[&node];
            if i == succs.len() {
                marks.insert(node, Mark::Done);
                path.pop();
                cursor.pop();
                continue;
            }
            *cursor.last_mut().unwrap() += 1;
            let next = &succs[i];
            match marks[next] {
                Mark::Fresh => {
                    marks.insert(next.clone(), Mark::Active);
                    path.push(next.clone());
                    cursor.push(0);
                }
                Mark::Active => {
                    let start = path.iter().position(|n| n == next).unwrap();
                    diagnostics.push(Diagnostic::Cycle(path[start..].to_vec()));
                }
                Mark::Done => {}
            }
        }
    }
    diagnostics
}

/// Picks `<name>*` (adding stars until it is unused).
fn starred_name(name: &Name, taken: &BTreeSet<Name>) -> Name {
    let mut candidate = format!("{name}*");
    while taken.contains(candidate.as_str()) {
        candidate.push('*');
    }
    candidate.into()
}

/// Replaces every `A ≺ C` by `A :≈ C ⊓ A*`. Returns the rewritten
/// terminology and the fresh names, which avoid `vocabulary`.
pub fn eliminate_specialisations(tbox: &[Axiom], vocabulary: &BTreeSet<Name>) -> (Vec<Axiom>, BTreeSet<Name>) {
    let mut taken = vocabulary.clone();
    for axiom in tbox {
        taken.insert(axiom.lhs().clone());
        axiom.rhs().collect_primitives(&mut taken);
    }
    let mut introduced = BTreeSet::new();
    let rewritten = tbox
        .iter()
        .map(|axiom| match axiom {
            Axiom::Specialisation { lhs, rhs } => {
                let star = starred_name(lhs, &taken);
                taken.insert(star.clone());
                introduced.insert(star.clone());
                Axiom::Definition { lhs: lhs.clone(), rhs: rhs.clone().and(Concept::Primitive(star)) }
            }
            definition => definition.clone(),
        })
        .collect();
    (rewritten, introduced)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionOptions {
    /// Apply the ⊤/⊥ absorption laws after substitution.
    pub simplify: bool,
    /// Maximum number of concept nodes the expansion may produce.
    pub budget: usize,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions { simplify: true, budget: DEFAULT_EXPANSION_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    pub introduced_primitives: BTreeSet<Name>,
    /// Each defined name with its fully unfolded defining term.
    pub substitutions: BTreeMap<Name, Concept>,
    pub size_before: usize,
    pub size_after: usize,
}

/// The unfolded terminology; substitutes defined names in arbitrary concepts.
#[derive(Debug, Clone)]
pub struct Expansion {
    definitions: BTreeMap<Name, Concept>,
    introduced: BTreeSet<Name>,
    options: ExpansionOptions,
}

impl Expansion {
    /// Validates the terminology, eliminates specialisations and unfolds it.
    pub fn new(tbox: &[Axiom], vocabulary: &BTreeSet<Name>, options: ExpansionOptions) -> Result<Self, TerminologyError> {
        let diagnostics = validate_terminology(tbox);
        if !diagnostics.is_empty() {
            return Err(TerminologyError::Invalid(diagnostics));
        }
        let (definitions, introduced) = eliminate_specialisations(tbox, vocabulary);
        let raw: HashMap<Name, Concept> =
            definitions.into_iter().map(|a| (a.lhs().clone(), a.rhs().clone())).collect();

        // Unfold in dependency order; acyclicity guarantees termination.
        let mut unfolded: BTreeMap<Name, Concept> = BTreeMap::new();
        let mut budget = Budget { left: options.budget, total: options.budget };
        let mut names: Vec<&Name> = raw.keys().collect();
        names.sort();
        for name in names {
            unfold_name(name, &raw, &mut unfolded, &mut budget, options.simplify)?;
        }
        Ok(Expansion { definitions: unfolded, introduced, options })
    }

    pub fn is_empty(&self) -> bool {
        self.definitions.is_empty()
    }

    pub fn definitions(&self) -> &BTreeMap<Name, Concept> {
        &self.definitions
    }

    pub fn introduced(&self) -> &BTreeSet<Name> {
        &self.introduced
    }

    /// Substitutes every defined name in `concept` by its unfolded term.
    pub fn expand_concept(&self, concept: &Concept) -> Result<Concept, TerminologyError> {
        let mut budget = Budget { left: self.options.budget, total: self.options.budget };
        let out = substitute(concept, &self.definitions, &mut budget)?;
        Ok(if self.options.simplify { simplify(&out) } else { out })
    }

    pub fn expand_constraint(&self, constraint: &FuzzyConstraint) -> Result<FuzzyConstraint, TerminologyError> {
        Ok(FuzzyConstraint {
            assertion: constraint.assertion.map_concept(|c| self.expand_concept(c))?,
            rel: constraint.rel,
            degree: constraint.degree.clone(),
        })
    }
}

struct Budget {
    left: usize,
    total: usize,
}

impl Budget {
    fn spend(&mut self, nodes: usize) -> Result<(), TerminologyError> {
        if nodes > self.left {
            return Err(TerminologyError::BudgetExceeded { budget: self.total });
        }
        self.left -= nodes;
        Ok(())
    }
}

fn unfold_name(
    name: &Name,
    raw: &HashMap<Name, Concept>,
    unfolded: &mut BTreeMap<Name, Concept>,
    budget: &mut Budget,
    simplify_terms: bool,
) -> Result<(), TerminologyError> {
    if unfolded.contains_key(name) {
        return Ok(());
    }
    let rhs = &raw[name];
    for dep in rhs.primitives() {
        if raw.contains_key(&dep) {
            unfold_name(&dep, raw, unfolded, budget, simplify_terms)?;
        }
    }
    let term = substitute(rhs, unfolded, budget)?;
    let term = if simplify_terms { simplify(&term) } else { term };
    unfolded.insert(name.clone(), term);
    Ok(())
}

fn substitute(
    concept: &Concept,
    definitions: &BTreeMap<Name, Concept>,
    budget: &mut Budget,
) -> Result<Concept, TerminologyError> {
    Ok(match concept {
        Concept::Primitive(name) => match definitions.get(name) {
            Some(term) => {
                budget.spend(term.size())?;
                term.clone()
            }
            None => {
                budget.spend(1)?;
                concept.clone()
            }
        },
        Concept::Top | Concept::Bottom => {
            budget.spend(1)?;
            concept.clone()
        }
        Concept::Not(c) => {
            budget.spend(1)?;
            Concept::Not(Arc::new(substitute(c, definitions, budget)?))
        }
        Concept::And(c, d) => {
            budget.spend(1)?;
            Concept::And(Arc::new(substitute(c, definitions, budget)?), Arc::new(substitute(d, definitions, budget)?))
        }
        Concept::Or(c, d) => {
            budget.spend(1)?;
            Concept::Or(Arc::new(substitute(c, definitions, budget)?), Arc::new(substitute(d, definitions, budget)?))
        }
        Concept::Forall(r, c) => {
            budget.spend(1)?;
            Concept::Forall(r.clone(), Arc::new(substitute(c, definitions, budget)?))
        }
        Concept::Exists(r, c) => {
            budget.spend(1)?;
            Concept::Exists(r.clone(), Arc::new(substitute(c, definitions, budget)?))
        }
    })
}

fn abox_size(abox: &[FuzzyConstraint]) -> usize {
    abox.iter().map(|c| 1 + c.assertion.concept_part().map_or(0, Concept::size)).sum()
}

/// Expands `kb` into a purely assertional KB.
pub fn expand(kb: &KnowledgeBase, options: &ExpansionOptions) -> Result<(KnowledgeBase, ExpansionReport, Expansion), TerminologyError> {
    let expansion = Expansion::new(&kb.tbox, &kb.concept_vocabulary(), options.clone())?;
    let size_before = abox_size(&kb.abox) + kb.tbox.iter().map(|a| 1 + a.rhs().size()).sum::<usize>();
    let abox = kb
        .abox
        .iter()
        .map(|c| expansion.expand_constraint(c))
        .collect::<Result<Vec<_>, _>>()?;
    let report = ExpansionReport {
        introduced_primitives: expansion.introduced.clone(),
        substitutions: expansion.definitions.clone(),
        size_before,
        size_after: abox_size(&abox),
    };
    Ok((KnowledgeBase::assertional(abox), report, expansion))
}

/// Negation normal form: negation pushed down to primitive concepts.
pub fn to_nnf(concept: &Concept) -> Concept {
    nnf(concept, false)
}

fn nnf(concept: &Concept, negated: bool) -> Concept {
    match (concept, negated) {
        (Concept::Top, false) | (Concept::Bottom, true) => Concept::Top,
        (Concept::Top, true) | (Concept::Bottom, false) => Concept::Bottom,
        (Concept::Primitive(_), false) => concept.clone(),
        (Concept::Primitive(_), true) => Concept::Not(Arc::new(concept.clone())),
        (Concept::Not(c), _) => nnf(c, !negated),
        (Concept::And(c, d), false) => nnf(c, false).and(nnf(d, false)),
        (Concept::And(c, d), true) => nnf(c, true).or(nnf(d, true)),
        (Concept::Or(c, d), false) => nnf(c, false).or(nnf(d, false)),
        (Concept::Or(c, d), true) => nnf(c, true).and(nnf(d, true)),
        (Concept::Forall(r, c), false) => Concept::Forall(r.clone(), Arc::new(nnf(c, false))),
        (Concept::Forall(r, c), true) => Concept::Exists(r.clone(), Arc::new(nnf(c, true))),
        (Concept::Exists(r, c), false) => Concept::Exists(r.clone(), Arc::new(nnf(c, false))),
        (Concept::Exists(r, c), true) => Concept::Forall(r.clone(), Arc::new(nnf(c, true))),
    }
}

/// ⊤/⊥ absorption: `C ⊓ ⊤ ≅ C`, `C ⊔ ⊤ ≅ ⊤`, `C ⊓ ⊥ ≅ ⊥`, `C ⊔ ⊥ ≅ C`,
/// `¬⊤ ≅ ⊥`, `¬⊥ ≅ ⊤`, `¬¬C ≅ C`, `∀R.⊤ ≅ ⊤`, `∃R.⊥ ≅ ⊥`.
pub fn simplify(concept: &Concept) -> Concept {
    match concept {
        Concept::Top | Concept::Bottom | Concept::Primitive(_) => concept.clone(),
        Concept::Not(c) => match simplify(c) {
            Concept::Top => Concept::Bottom,
            Concept::Bottom => Concept::Top,
            Concept::Not(inner) => (*inner).clone(),
            other => other.negate(),
        },
        Concept::And(c, d) => match (simplify(c), simplify(d)) {
            (Concept::Bottom, _) | (_, Concept::Bottom) => Concept::Bottom,
            (Concept::Top, x) | (x, Concept::Top) => x,
            (x, y) => x.and(y),
        },
        Concept::Or(c, d) => match (simplify(c), simplify(d)) {
            (Concept::Top, _) | (_, Concept::Top) => Concept::Top,
            (Concept::Bottom, x) | (x, Concept::Bottom) => x,
            (x, y) => x.or(y),
        },
        Concept::Forall(r, c) => match simplify(c) {
            Concept::Top => Concept::Top,
            body => Concept::Forall(r.clone(), Arc::new(body)),
        },
        Concept::Exists(r, c) => match simplify(c) {
            Concept::Bottom => Concept::Bottom,
            body => Concept::Exists(r.clone(), Arc::new(body)),
        },
    }
}
