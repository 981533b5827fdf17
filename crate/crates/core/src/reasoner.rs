//! Decision procedures: satisfiability, entailment, best truth-value bounds
//! and subsumption.
//!
//! Everything reduces to satisfiability of a constraint set:
//! `Σ ⊨ ⟨α ≥ n⟩` iff `Σ ∪ {⟨α < n⟩}` is unsatisfiable, and
//! `Σ ⊨ ⟨α ≤ n⟩` iff `Σ ∪ {⟨α > n⟩}` is unsatisfiable.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::degree::Degree;
use crate::syntax::{Assertion, Axiom, Concept, FuzzyConstraint, KnowledgeBase, Name, Object, Relation};
use crate::tableau::trace::complete_trace_with;
use crate::tableau::{complete_with, ConstraintSet, SearchOptions, SearchOutcome, TableauError, DEFAULT_STEP_BUDGET};
use crate::terminology::{expand, Expansion, ExpansionOptions, ExpansionReport, TerminologyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error(transparent)]
    Terminology(#[from] TerminologyError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Depth-first search over full completions.
    #[default]
    Full,
    /// Pre-completions plus one successor chain at a time.
    Trace,
}

#[derive(Debug, Clone)]
pub struct ReasonerOptions {
    pub mode: Mode,
    pub expansion: ExpansionOptions,
    pub step_budget: usize,
}

impl Default for ReasonerOptions {
    fn default() -> Self {
        ReasonerOptions { mode: Mode::Full, expansion: ExpansionOptions::default(), step_budget: DEFAULT_STEP_BUDGET }
    }
}

/// The degrees a glb must come from: `{0, 0.5, 1}`, every lower bound `n`
/// and every complement `1 − n` of an upper bound in the KB.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeCandidates {
    pub values: Vec<Degree>,
}

impl DegreeCandidates {
    pub fn contains(&self, degree: &Degree) -> bool {
        self.values.binary_search(degree).is_ok()
    }

    /// `1 − N`, ascending.
    pub fn complements(&self) -> Vec<Degree> {
        self.values.iter().rev().map(Degree::complement).collect()
    }
}

pub fn degree_candidates(abox: &[FuzzyConstraint]) -> DegreeCandidates {
    let mut values: BTreeSet<Degree> = [Degree::zero(), Degree::half(), Degree::one()].into_iter().collect();
    for c in abox {
        match c.rel {
            Relation::AtLeast => values.insert(c.degree.clone()),
            Relation::AtMost => values.insert(c.degree.complement()),
            _ => false,
        };
    }
    DegreeCandidates { values: values.into_iter().collect() }
}

/// Outcome of a glb or lub computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub degree: Degree,
    /// The degrees the search ranged over.
    pub candidates: Vec<Degree>,
    pub entailment_tests: usize,
    /// The KB has no model, so every bound is entailed.
    pub inconsistent: bool,
}

/// A KB prepared for reasoning: the terminology is unfolded once and the
/// ABox is expanded through it.
#[derive(Debug, Clone)]
pub struct Reasoner {
    abox: Vec<FuzzyConstraint>,
    individuals: BTreeSet<Name>,
    expansion: Expansion,
    report: ExpansionReport,
    options: ReasonerOptions,
}

impl Reasoner {
    pub fn new(kb: &KnowledgeBase) -> Result<Self, ReasonerError> {
        Self::with_options(kb, ReasonerOptions::default())
    }

    pub fn with_options(kb: &KnowledgeBase, options: ReasonerOptions) -> Result<Self, ReasonerError> {
        let (expanded, report, expansion) = expand(kb, &options.expansion)?;
        Ok(Reasoner { abox: expanded.abox, individuals: kb.individuals(), expansion, report, options })
    }

    /// The expanded, purely assertional KB.
    pub fn abox(&self) -> &[FuzzyConstraint] {
        &self.abox
    }

    pub fn individuals(&self) -> &BTreeSet<Name> {
        &self.individuals
    }

    pub fn expansion_report(&self) -> &ExpansionReport {
        &self.report
    }

    pub fn options(&self) -> &ReasonerOptions {
        &self.options
    }

    fn search_options(&self, record_proof: bool) -> SearchOptions {
        SearchOptions { step_budget: self.options.step_budget, record_proof }
    }

    fn constraint_set(&self, extra: Option<FuzzyConstraint>) -> ConstraintSet {
        self.abox.iter().cloned().chain(extra).collect()
    }

    fn satisfiable_with(&self, extra: Option<FuzzyConstraint>) -> Result<bool, ReasonerError> {
        let set = self.constraint_set(extra);
        Ok(match self.options.mode {
            Mode::Full => complete_with(&set, &self.search_options(false))?.result.is_satisfiable(),
            Mode::Trace => complete_trace_with(&set, &self.search_options(false))?.result.is_satisfiable(),
        })
    }

    pub fn is_satisfiable(&self) -> Result<bool, ReasonerError> {
        self.satisfiable_with(None)
    }

    /// Runs the full search on the KB (and the refutation constraint of
    /// `query`, if given), keeping the completion, statistics and proof log.
    pub fn search(&self, query: Option<&FuzzyConstraint>, record_proof: bool) -> Result<SearchOutcome, ReasonerError> {
        let extra = query.map(|q| self.refutation(q)).transpose()?;
        Ok(complete_with(&self.constraint_set(extra), &self.search_options(record_proof))?)
    }

    /// Expands the concepts of `assertion` through the terminology.
    pub fn expand_assertion(&self, assertion: &Assertion) -> Result<Assertion, ReasonerError> {
        Ok(assertion.map_concept(|c| self.expansion.expand_concept(c))?)
    }

    /// The constraint whose unsatisfiability together with the KB proves `query`.
    fn refutation(&self, query: &FuzzyConstraint) -> Result<FuzzyConstraint, ReasonerError> {
        if !matches!(query.rel, Relation::AtLeast | Relation::AtMost) {
            return Err(ReasonerError::InvalidQuery(format!("queries use >= or <=, got {}", query.rel)));
        }
        let assertion = self.expand_assertion(&query.assertion)?;
        Ok(FuzzyConstraint::new(assertion, query.rel.negate(), query.degree.clone()))
    }

    /// `Σ ⊨ query` for a user-level query (`≥ n` with `n > 0`, `≤ n` with `n < 1`).
    pub fn entails(&self, query: &FuzzyConstraint) -> Result<bool, ReasonerError> {
        if !query.is_user_level() {
            return Err(ReasonerError::InvalidQuery(format!(
                "`{query}` is not a fuzzy assertion: use >= with a degree above 0 or <= with a degree below 1"
            )));
        }
        if query.mentions_variable() {
            return Err(ReasonerError::InvalidQuery(format!("`{query}` mentions a variable")));
        }
        self.entails_bound(query)
    }

    /// Entailment for any `≥`/`≤` bound, including the trivial ones.
    fn entails_bound(&self, query: &FuzzyConstraint) -> Result<bool, ReasonerError> {
        let refutation = self.refutation(query)?;
        Ok(!self.satisfiable_with(Some(refutation))?)
    }

    pub fn degree_candidates(&self) -> DegreeCandidates {
        degree_candidates(&self.abox)
    }

    fn inconsistent_bound(&self, degree: Degree, candidates: Vec<Degree>) -> BoundResult {
        BoundResult { degree, candidates, entailment_tests: 0, inconsistent: true }
    }

    /// Greatest `n` with `Σ ⊨ ⟨α ≥ n⟩`.
    pub fn glb(&self, assertion: &Assertion) -> Result<BoundResult, ReasonerError> {
        let candidates = self.degree_candidates().values;
        if !self.is_satisfiable()? {
            return Ok(self.inconsistent_bound(Degree::one(), candidates));
        }
        if let Assertion::Role { .. } = assertion {
            // Roles only get lower bounds from explicit role assertions.
            let degree = self
                .abox
                .iter()
                .filter(|c| c.assertion == *assertion && c.rel == Relation::AtLeast)
                .map(|c| c.degree.clone())
                .max()
                .unwrap_or_else(Degree::zero);
            return Ok(BoundResult { degree, candidates, entailment_tests: 0, inconsistent: false });
        }
        self.max_search(assertion, candidates)
    }

    /// Binary search for the largest entailed lower bound among `candidates`.
    fn max_search(&self, assertion: &Assertion, candidates: Vec<Degree>) -> Result<BoundResult, ReasonerError> {
        // Candidates strictly between the known-entailed index `lo` and the
        // known-refuted index `hi`; index 0 is degree 0, which is always entailed.
        let (mut lo, mut hi) = (0usize, candidates.len());
        let mut tests = 0;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            tests += 1;
            let query = FuzzyConstraint::at_least(assertion.clone(), candidates[mid].clone());
            if self.entails_bound(&query)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(BoundResult { degree: candidates[lo].clone(), candidates, entailment_tests: tests, inconsistent: false })
    }

    /// Least `n` with `Σ ⊨ ⟨α ≤ n⟩`.
    pub fn lub(&self, assertion: &Assertion) -> Result<BoundResult, ReasonerError> {
        let candidates = self.degree_candidates().complements();
        if !self.is_satisfiable()? {
            return Ok(self.inconsistent_bound(Degree::zero(), candidates));
        }
        // Mirror image of the glb search over 1 − N. The largest candidate
        // is 1, which is always entailed; 0 stays a possible answer.
        let (mut lo, mut hi) = (-1isize, candidates.len() as isize - 1);
        let mut tests = 0;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            tests += 1;
            let query = FuzzyConstraint::at_most(assertion.clone(), candidates[mid as usize].clone());
            if self.entails_bound(&query)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(BoundResult {
            degree: candidates[hi as usize].clone(),
            candidates,
            entailment_tests: tests,
            inconsistent: false,
        })
    }

    /// `C ⪯ D` with respect to the terminology of the KB.
    pub fn subsumes(&self, c: &Concept, d: &Concept) -> Result<bool, ReasonerError> {
        subsumption(&self.expansion, c, d, &self.options)
    }

    /// Individuals with their glb of membership in `concept`, best first
    /// (ties by name).
    pub fn rank(&self, concept: &Concept, parallel: bool) -> Result<Vec<(Name, Degree)>, ReasonerError> {
        let names: Vec<Name> = self.individuals.iter().cloned().collect();
        let bound = |name: &Name| -> Result<(Name, Degree), ReasonerError> {
            let assertion = Assertion::Concept { object: Object::Individual(name.clone()), concept: concept.clone() };
            Ok((name.clone(), self.glb(&assertion)?.degree))
        };
        let mut ranked: Vec<(Name, Degree)> = if parallel && names.len() > 1 {
            std::thread::scope(|scope| {
                let handles: Vec<_> = names.iter().map(|n| scope.spawn(move || bound(n))).collect();
                handles.into_iter().map(|h| h.join().expect("rank worker panicked")).collect::<Result<_, _>>()
            })?
        } else {
            names.iter().map(bound).collect::<Result<_, _>>()?
        };
        ranked.sort_by(|(na, da), (nb, db)| db.cmp(da).then_with(|| na.cmp(nb)));
        Ok(ranked)
    }
}

fn subsumption(expansion: &Expansion, c: &Concept, d: &Concept, options: &ReasonerOptions) -> Result<bool, ReasonerError> {
    let c = expansion.expand_concept(c)?;
    let d = expansion.expand_concept(d)?;
    let a = Object::individual("a");
    for m in [Degree::half(), Degree::one()] {
        let premise = FuzzyConstraint::at_least(Assertion::Concept { object: a.clone(), concept: c.clone() }, m.clone());
        let reasoner = Reasoner::with_options(&KnowledgeBase::assertional(vec![premise]), options.clone())?;
        let query = FuzzyConstraint::at_least(Assertion::Concept { object: a.clone(), concept: d.clone() }, m);
        if !reasoner.entails_bound(&query)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_satisfiable(kb: &KnowledgeBase) -> Result<bool, ReasonerError> {
    Reasoner::new(kb)?.is_satisfiable()
}

pub fn entails(kb: &KnowledgeBase, query: &FuzzyConstraint) -> Result<bool, ReasonerError> {
    Reasoner::new(kb)?.entails(query)
}

pub fn glb(kb: &KnowledgeBase, assertion: &Assertion) -> Result<Degree, ReasonerError> {
    Ok(Reasoner::new(kb)?.glb(assertion)?.degree)
}

pub fn lub(kb: &KnowledgeBase, assertion: &Assertion) -> Result<Degree, ReasonerError> {
    Ok(Reasoner::new(kb)?.lub(assertion)?.degree)
}

/// `C ⪯ D` with respect to `tbox`.
pub fn subsumes(tbox: &[Axiom], c: &Concept, d: &Concept) -> Result<bool, ReasonerError> {
    let mut vocabulary = c.primitives();
    vocabulary.extend(d.primitives());
    let options = ReasonerOptions::default();
    let expansion = Expansion::new(tbox, &vocabulary, options.expansion.clone())?;
    subsumption(&expansion, c, d, &options)
}
