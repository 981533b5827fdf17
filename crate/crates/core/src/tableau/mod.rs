//! Constraint-propagation tableau for fuzzy ALC.
//!
//! A [`ConstraintSet`] is expanded by the twenty completion rules until it
//! is complete or contains a clash. [`complete`] searches depth-first over
//! the nondeterministic rules; [`trace::complete_trace`] decides the same
//! question while keeping only one role successor chain alive at a time.

mod model;
mod proof;
pub mod trace;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::degree::Degree;
use crate::syntax::{Assertion, Concept, FuzzyConstraint, Object, Relation};

pub use model::{extract_model, ModelExtractionError};
pub use proof::{ProofEvent, ProofLog, ProofStep};

/// Default cap on rule applications per search.
pub const DEFAULT_STEP_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("search exceeded the budget of {0} rule applications")]
    BudgetExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    /// Not yet known to be satisfied.
    Open,
    /// No rule can ever fire on this constraint again.
    Settled,
    /// Propagation constraint whose role partners before this index were handled.
    Scanned(usize),
}

/// An insertion-ordered set of fuzzy constraints.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    items: Vec<FuzzyConstraint>,
    status: Vec<Status>,
    by_assertion: HashMap<Assertion, Vec<usize>>,
    next_var: u32,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `constraint`; returns false if it was already present.
    pub fn insert(&mut self, constraint: FuzzyConstraint) -> bool {
        if self.contains(&constraint) {
            return false;
        }
        for object in constraint.assertion.objects() {
            if let Object::Variable(id) = object {
                self.next_var = self.next_var.max(id + 1);
            }
        }
        let idx = self.items.len();
        self.by_assertion.entry(constraint.assertion.clone()).or_default().push(idx);
        self.items.push(constraint);
        self.status.push(Status::Open);
        true
    }

    pub fn contains(&self, constraint: &FuzzyConstraint) -> bool {
        self.by_assertion
            .get(&constraint.assertion)
            .is_some_and(|ids| ids.iter().any(|&i| self.items[i] == *constraint))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FuzzyConstraint> {
        self.items.iter()
    }

    pub fn constraints(&self) -> &[FuzzyConstraint] {
        &self.items
    }

    /// Constraints on exactly this assertion.
    pub fn on_assertion<'a>(&'a self, assertion: &Assertion) -> impl Iterator<Item = &'a FuzzyConstraint> {
        self.by_assertion.get(assertion).into_iter().flatten().map(|&i| &self.items[i])
    }

    /// Every object mentioned by some constraint.
    pub fn objects(&self) -> BTreeSet<Object> {
        self.items.iter().flat_map(|c| c.assertion.objects()).cloned().collect()
    }

    /// Number of variables mentioned.
    pub fn variable_count(&self) -> usize {
        self.objects().iter().filter(|o| o.is_variable()).count()
    }

    fn fresh_variable(&self) -> Object {
        Object::Variable(self.next_var)
    }

    /// Computes the rule instance that would fire next, if any.
    pub fn next_application(&mut self) -> Option<RuleApplication> {
        self.next_application_of(true)
    }

    fn next_application_of(&mut self, generating: bool) -> Option<RuleApplication> {
        for i in 0..self.items.len() {
            if let Some(app) = self.deterministic_at(i) {
                return Some(app);
            }
        }
        for i in 0..self.items.len() {
            if let Some(app) = self.nondeterministic_at(i) {
                return Some(app);
            }
        }
        if generating {
            for i in 0..self.items.len() {
                if let Some(app) = self.generating_at(i) {
                    return Some(app);
                }
            }
        }
        None
    }

    fn deterministic_at(&mut self, i: usize) -> Option<RuleApplication> {
        let cursor = match self.status[i] {
            Status::Settled => return None,
            Status::Open => 0,
            Status::Scanned(j) => j,
        };
        let c = &self.items[i];
        let (object, concept) = match &c.assertion {
            Assertion::Role { .. } => {
                self.status[i] = Status::Settled;
                return None;
            }
            Assertion::Concept { object, concept } => (object, concept),
        };
        let (rel, n) = (c.rel, &c.degree);
        let on = |concept: &Concept, rel: Relation, degree: Degree| {
            FuzzyConstraint::new(Assertion::Concept { object: object.clone(), concept: concept.clone() }, rel, degree)
        };
        match concept {
            Concept::Top | Concept::Bottom | Concept::Primitive(_) => {
                self.status[i] = Status::Settled;
                None
            }
            Concept::Not(inner) => {
                let out = on(inner, rel.mirror(), n.complement());
                self.fire_unless_present(i, Rule::new(Connective::Not, rel), vec![c.clone()], vec![out])
            }
            Concept::And(l, r) | Concept::Or(l, r) if Rule::of(concept, rel).kind() == RuleKind::Deterministic => {
                let rule = Rule::of(concept, rel);
                let out = vec![on(l, rel, n.clone()), on(r, rel, n.clone())];
                self.fire_unless_present(i, rule, vec![c.clone()], out)
            }
            Concept::Forall(role, body) | Concept::Exists(role, body)
                if Rule::of(concept, rel).kind() == RuleKind::Deterministic =>
            {
                let rule = Rule::of(concept, rel);
                for j in cursor..self.items.len() {
                    let partner = &self.items[j];
                    let Assertion::Role { subject, filler, role: r } = &partner.assertion else { continue };
                    if subject != object || r != role {
                        continue;
                    }
                    let guard = propagation_guard(partner.assertion.clone(), rule, n);
                    if !conjugated(partner, &guard) {
                        continue;
                    }
                    let out = FuzzyConstraint::new(
                        Assertion::Concept { object: filler.clone(), concept: (**body).clone() },
                        rel,
                        n.clone(),
                    );
                    if !self.contains(&out) {
                        let app = RuleApplication {
                            rule,
                            premises: vec![c.clone(), partner.clone()],
                            alternatives: vec![vec![out]],
                        };
                        self.status[i] = Status::Scanned(j);
                        return Some(app);
                    }
                }
                self.status[i] = Status::Scanned(self.items.len());
                None
            }
            _ => None,
        }
    }

    fn fire_unless_present(
        &mut self,
        i: usize,
        rule: Rule,
        premises: Vec<FuzzyConstraint>,
        conclusions: Vec<FuzzyConstraint>,
    ) -> Option<RuleApplication> {
        if conclusions.iter().all(|c| self.contains(c)) {
            self.status[i] = Status::Settled;
            return None;
        }
        Some(RuleApplication { rule, premises, alternatives: vec![conclusions] })
    }

    fn nondeterministic_at(&mut self, i: usize) -> Option<RuleApplication> {
        if self.status[i] != Status::Open {
            return None;
        }
        let c = &self.items[i];
        let Assertion::Concept { object, concept: concept @ (Concept::And(l, r) | Concept::Or(l, r)) } = &c.assertion
        else {
            return None;
        };
        let rule = Rule::of(concept, c.rel);
        if rule.kind() != RuleKind::Nondeterministic {
            return None;
        }
        let alt = |part: &Concept| {
            FuzzyConstraint::new(Assertion::Concept { object: object.clone(), concept: part.clone() }, c.rel, c.degree.clone())
        };
        let (left, right) = (alt(l), alt(r));
        if self.contains(&left) || self.contains(&right) {
            self.status[i] = Status::Settled;
            return None;
        }
        Some(RuleApplication { rule, premises: vec![c.clone()], alternatives: vec![vec![left], vec![right]] })
    }

    /// The generating rule instance for constraint `i`, unless it is blocked
    /// by an existing witness.
    fn generating_at(&mut self, i: usize) -> Option<RuleApplication> {
        if self.status[i] != Status::Open {
            return None;
        }
        let c = &self.items[i];
        let Assertion::Concept { object, concept: concept @ (Concept::Forall(role, body) | Concept::Exists(role, body)) } =
            &c.assertion
        else {
            return None;
        };
        let rule = Rule::of(concept, c.rel);
        if rule.kind() != RuleKind::Generating {
            return None;
        }
        let (role_rel, role_degree) = generated_role_bound(rule, &c.degree);
        let blocked = self.items.iter().any(|partner| match &partner.assertion {
            Assertion::Role { subject, filler, role: r } => {
                subject == object
                    && r == role
                    && partner.rel == role_rel
                    && partner.degree == role_degree
                    && self.contains(&FuzzyConstraint::new(
                        Assertion::Concept { object: filler.clone(), concept: (**body).clone() },
                        c.rel,
                        c.degree.clone(),
                    ))
            }
            _ => false,
        });
        if blocked {
            self.status[i] = Status::Settled;
            return None;
        }
        let x = self.fresh_variable();
        let conclusions = vec![
            FuzzyConstraint::new(
                Assertion::Role { subject: object.clone(), filler: x.clone(), role: role.clone() },
                role_rel,
                role_degree,
            ),
            FuzzyConstraint::new(Assertion::Concept { object: x, concept: (**body).clone() }, c.rel, c.degree.clone()),
        ];
        Some(RuleApplication { rule, premises: vec![c.clone()], alternatives: vec![conclusions] })
    }

    /// Checks a newly inserted constraint for an immediate contradiction and against its assertion peers.
    fn clash_with(&self, constraint: &FuzzyConstraint) -> Option<ClashWitness> {
        if is_contradictory(constraint) {
            return Some(ClashWitness::Immediate(constraint.clone()));
        }
        self.on_assertion(&constraint.assertion)
            .find(|other| conjugated(constraint, other))
            .map(|other| ClashWitness::Conjugated(other.clone(), constraint.clone()))
    }
}

impl FromIterator<FuzzyConstraint> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = FuzzyConstraint>>(iter: I) -> Self {
        let mut set = ConstraintSet::new();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl PartialEq for ConstraintSet {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.items.iter().all(|c| other.contains(c))
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.items {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The constraint `ψ` whose conjugate lets a propagation rule fire.
fn propagation_guard(role_assertion: Assertion, rule: Rule, n: &Degree) -> FuzzyConstraint {
    let (rel, degree) = match (rule.connective, rule.rel) {
        (Connective::Forall, rel) => (rel.mirror(), n.complement()),
        (_, rel) => (rel, n.clone()),
    };
    FuzzyConstraint::new(role_assertion, rel, degree)
}

/// Relation and degree of the role constraint produced by a generating rule.
fn generated_role_bound(rule: Rule, n: &Degree) -> (Relation, Degree) {
    match rule.connective {
        Connective::Forall => (rule.rel.mirror(), n.complement()),
        _ => (rule.rel, n.clone()),
    }
}

/// True iff `a` and `b` bound the same assertion in a jointly unsatisfiable way.
pub fn conjugated(a: &FuzzyConstraint, b: &FuzzyConstraint) -> bool {
    if a.assertion != b.assertion {
        return false;
    }
    let (low, high) = match (a.rel.is_lower(), b.rel.is_lower()) {
        (true, false) => (a, b),
        (false, true) => (b, a),
        _ => return false,
    };
    let (n, m) = (&low.degree, &high.degree);
    match (low.rel, high.rel) {
        (Relation::AtLeast, Relation::AtMost) => n > m,
        _ => n >= m,
    }
}

fn is_contradictory(c: &FuzzyConstraint) -> bool {
    let concept = c.assertion.concept_part();
    match c.rel {
        Relation::Less if c.degree.is_zero() => true,
        Relation::Greater if c.degree.is_one() => true,
        Relation::AtLeast => matches!(concept, Some(Concept::Bottom)) && !c.degree.is_zero(),
        Relation::AtMost => matches!(concept, Some(Concept::Top)) && !c.degree.is_one(),
        Relation::Greater => matches!(concept, Some(Concept::Bottom)),
        Relation::Less => matches!(concept, Some(Concept::Top)),
    }
}

/// Evidence that a constraint set is unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ClashWitness {
    Immediate(#[serde(serialize_with = "proof::ser_constraint")] FuzzyConstraint),
    Conjugated(
        #[serde(serialize_with = "proof::ser_constraint")] FuzzyConstraint,
        #[serde(serialize_with = "proof::ser_constraint")] FuzzyConstraint,
    ),
}

impl fmt::Display for ClashWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClashWitness::Immediate(c) => write!(f, "{c} is contradictory"),
            ClashWitness::Conjugated(a, b) => write!(f, "{a} conjugates {b}"),
        }
    }
}

/// Finds an immediately contradictory constraint or a conjugated pair.
pub fn detect_clash(set: &ConstraintSet) -> Option<ClashWitness> {
    for (i, c) in set.items.iter().enumerate() {
        if is_contradictory(c) {
            return Some(ClashWitness::Immediate(c.clone()));
        }
        for &j in &set.by_assertion[&c.assertion] {
            if j > i && conjugated(c, &set.items[j]) {
                return Some(ClashWitness::Conjugated(c.clone(), set.items[j].clone()));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Connective {
    Not,
    And,
    Or,
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// Single successor, no new objects (includes the quantifier propagation rules).
    Deterministic,
    Nondeterministic,
    /// Introduces a fresh variable.
    Generating,
}

/// One of the twenty completion rules, named by connective and relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    pub connective: Connective,
    pub rel: Relation,
}

impl Rule {
    pub fn new(connective: Connective, rel: Relation) -> Self {
        Rule { connective, rel }
    }

    fn of(concept: &Concept, rel: Relation) -> Self {
        let connective = match concept {
            Concept::Not(_) => Connective::Not,
            Concept::And(..) => Connective::And,
            Concept::Or(..) => Connective::Or,
            Concept::Forall(..) => Connective::Forall,
            Concept::Exists(..) => Connective::Exists,
            _ => unreachable!("no rule for atomic concepts"),
        };
        Rule { connective, rel }
    }

    pub fn kind(self) -> RuleKind {
        // Lower bounds on ⊓ and ∀ and upper bounds on ⊔ and ∃ split into
        // independent obligations; the dual combinations need a choice or a witness.
        let lower = self.rel.is_lower();
        match self.connective {
            Connective::Not => RuleKind::Deterministic,
            Connective::And if lower => RuleKind::Deterministic,
            Connective::Or if !lower => RuleKind::Deterministic,
            Connective::And | Connective::Or => RuleKind::Nondeterministic,
            Connective::Forall if lower => RuleKind::Deterministic,
            Connective::Exists if !lower => RuleKind::Deterministic,
            Connective::Forall | Connective::Exists => RuleKind::Generating,
        }
    }

    pub fn name(self) -> String {
        let connective = match self.connective {
            Connective::Not => "¬",
            Connective::And => "⊓",
            Connective::Or => "⊔",
            Connective::Forall => "∀",
            Connective::Exists => "∃",
        };
        let rel = match self.rel {
            Relation::AtLeast => "≥",
            Relation::Greater => ">",
            Relation::AtMost => "≤",
            Relation::Less => "<",
        };
        format!("{connective}{rel}")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.name())
    }
}

/// A rule instance: premises and one conclusion list per successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: Rule,
    pub premises: Vec<FuzzyConstraint>,
    pub alternatives: Vec<Vec<FuzzyConstraint>>,
}

/// Applies the next rule instance; `None` when `set` is complete.
pub fn step(set: &ConstraintSet) -> Option<Vec<ConstraintSet>> {
    let mut set = set.clone();
    let app = set.next_application()?;
    Some(
        app.alternatives
            .into_iter()
            .map(|conclusions| {
                let mut succ = set.clone();
                for c in conclusions {
                    succ.insert(c);
                }
                succ
            })
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub enum SatResult {
    /// The first clash-free completion found.
    Satisfiable(ConstraintSet),
    /// One clash per closed branch.
    Unsatisfiable(Vec<(String, ClashWitness)>),
}

impl SatResult {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, SatResult::Satisfiable(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchStats {
    pub rule_applications: usize,
    pub branches: usize,
    pub largest_set: usize,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub step_budget: usize,
    pub record_proof: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { step_budget: DEFAULT_STEP_BUDGET, record_proof: false }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub result: SatResult,
    pub stats: SearchStats,
    pub proof: Option<ProofLog>,
}

/// Depth-first completion search.
pub fn complete(set: &ConstraintSet) -> Result<SatResult, TableauError> {
    Ok(complete_with(set, &SearchOptions::default())?.result)
}

pub fn complete_with(set: &ConstraintSet, options: &SearchOptions) -> Result<SearchOutcome, TableauError> {
    let mut search = Search::new(options, true);
    let result = match search.run(set.clone(), "1".to_string(), false)? {
        Some(done) => SatResult::Satisfiable(done),
        None => SatResult::Unsatisfiable(std::mem::take(&mut search.clashes)),
    };
    Ok(SearchOutcome { result, stats: search.stats, proof: search.proof })
}

/// Every clash-free completion reachable by the search, in branch order.
pub fn enumerate_completions(set: &ConstraintSet, options: &SearchOptions) -> Result<Vec<ConstraintSet>, TableauError> {
    let mut search = Search::new(options, true);
    search.run(set.clone(), "1".to_string(), true)?;
    Ok(search.found)
}

/// Search state shared by full completion, enumeration and pre-completion.
pub(crate) struct Search {
    budget: usize,
    generating: bool,
    pub(crate) stats: SearchStats,
    pub(crate) proof: Option<ProofLog>,
    pub(crate) clashes: Vec<(String, ClashWitness)>,
    pub(crate) found: Vec<ConstraintSet>,
}

impl Search {
    pub(crate) fn new(options: &SearchOptions, generating: bool) -> Self {
        Search {
            budget: options.step_budget,
            generating,
            stats: SearchStats::default(),
            proof: options.record_proof.then(ProofLog::default),
            clashes: Vec::new(),
            found: Vec::new(),
        }
    }

    fn spend(&mut self) -> Result<(), TableauError> {
        self.stats.rule_applications += 1;
        if self.stats.rule_applications > self.budget {
            return Err(TableauError::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn close(&mut self, branch: String, witness: ClashWitness) {
        if let Some(log) = &mut self.proof {
            log.events.push(ProofEvent::Clash { branch: branch.clone(), witness: witness.clone() });
        }
        self.clashes.push((branch, witness));
    }

    /// Runs one branch. Returns the first clash-free completion unless
    /// `exhaustive`, in which case completions are collected in `found`.
    pub(crate) fn run(
        &mut self,
        mut set: ConstraintSet,
        branch: String,
        exhaustive: bool,
    ) -> Result<Option<ConstraintSet>, TableauError> {
        self.stats.branches += 1;
        if let Some(witness) = detect_clash(&set) {
            self.close(branch, witness);
            return Ok(None);
        }
        loop {
            self.stats.largest_set = self.stats.largest_set.max(set.len());
            let Some(app) = set.next_application_of(self.generating) else {
                if let Some(log) = &mut self.proof {
                    log.events.push(ProofEvent::Complete { branch: branch.clone() });
                }
                if exhaustive {
                    self.found.push(set);
                    return Ok(None);
                }
                return Ok(Some(set));
            };
            self.spend()?;
            if let Some(log) = &mut self.proof {
                log.events.push(ProofEvent::Step(ProofStep::new(&branch, &app)));
            }
            if app.alternatives.len() == 1 {
                let conclusions = app.alternatives.into_iter().next().unwrap();
                if let Some(witness) = insert_all(&mut set, conclusions) {
                    self.close(branch, witness);
                    return Ok(None);
                }
                continue;
            }
            for (k, conclusions) in app.alternatives.into_iter().enumerate() {
                let child = format!("{branch}.{}", k + 1);
                let mut succ = set.clone();
                if let Some(witness) = insert_all(&mut succ, conclusions) {
                    self.stats.branches += 1;
                    self.close(child, witness);
                    continue;
                }
                if let Some(done) = self.run(succ, child, exhaustive)? {
                    return Ok(Some(done));
                }
            }
            return Ok(None);
        }
    }
}

/// Inserts the conclusions, stopping at the first clash.
fn insert_all(set: &mut ConstraintSet, conclusions: Vec<FuzzyConstraint>) -> Option<ClashWitness> {
    for c in conclusions {
        if set.contains(&c) {
            continue;
        }
        let clash = set.clash_with(&c);
        set.insert(c);
        if clash.is_some() {
            return clash;
        }
    }
    None
}
