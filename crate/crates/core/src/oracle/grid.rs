//! Entailment by search over finite grid interpretations.
//!
//! The domain is the individuals plus anonymous elements up to a bound, and
//! every primitive membership and role degree is drawn from the grid
//! `{0, 1}`, the constants of the input and their complements, closed under
//! midpoints of neighbouring values. `Σ ⊨ ψ` is refuted by a grid
//! interpretation satisfying `Σ` but not `ψ`.
//!
//! The search space is far too large to enumerate, so it is handed to a SAT
//! solver. Each degree slot `s` gets an order encoding: `y[s][i]` holds iff
//! the slot value is at least `grid[i]`. Over a finite domain every
//! constraint unfolds into a propositional formula over threshold atoms of
//! this form. Every satisfying assignment is decoded and re-checked against
//! the fuzzy semantics before it is reported.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;
use varisat::{ExtendFormula, Lit, Solver};

use crate::degree::Degree;
use crate::semantics::{satisfies, Interpretation, ModelError};
use crate::syntax::{Assertion, Concept, FuzzyConstraint, KnowledgeBase, Name, Object, Relation};

/// Cap on the number of clauses handed to the solver.
pub const MAX_CLAUSES: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("the grid oracle needs a purely assertional KB")]
    NotAssertional,
    #[error("`{0}` mentions a variable")]
    Variable(Box<FuzzyConstraint>),
    #[error("domain bound {bound} is smaller than the {individuals} individuals")]
    DomainTooSmall { bound: usize, individuals: usize },
    #[error("grid encoding exceeds {0} clauses")]
    TooLarge(usize),
    #[error("decoded grid interpretation fails the semantic re-check on {0}")]
    Decoding(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone)]
pub struct GridVerdict {
    pub entailed: bool,
    pub domain_bound: usize,
    pub grid: Vec<Degree>,
    /// Present when the query is not entailed.
    pub countermodel: Option<Interpretation>,
}

fn input_individuals(kb: &KnowledgeBase, query: &FuzzyConstraint) -> BTreeSet<Name> {
    let mut names = kb.individuals();
    for object in query.assertion.objects() {
        if let Object::Individual(name) = object {
            names.insert(name.clone());
        }
    }
    names
}

/// Individuals plus quantifier occurrences of the KB and the query.
pub fn default_domain_bound(kb: &KnowledgeBase, query: &FuzzyConstraint) -> usize {
    let quantifiers: usize = kb
        .abox
        .iter()
        .chain(std::iter::once(query))
        .filter_map(|c| c.assertion.concept_part())
        .map(Concept::quantifier_count)
        .sum();
    (input_individuals(kb, query).len() + quantifiers).max(1)
}

fn build_grid(constraints: &[&FuzzyConstraint]) -> Vec<Degree> {
    let mut base: BTreeSet<Degree> = [Degree::zero(), Degree::one()].into_iter().collect();
    for c in constraints {
        base.insert(c.degree.clone());
        base.insert(c.degree.complement());
    }
    let base: Vec<Degree> = base.into_iter().collect();
    let mut grid = Vec::with_capacity(2 * base.len());
    for pair in base.windows(2) {
        grid.push(pair[0].clone());
        grid.push(pair[0].midpoint(&pair[1]));
    }
    grid.push(Degree::one());
    grid
}

/// Propositional formula over solver literals.
enum Formula {
    Const(bool),
    Lit(Lit),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    fn and(parts: Vec<Formula>) -> Formula {
        let mut kept = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::Const(true) => {}
                Formula::Const(false) => return Formula::Const(false),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => Formula::Const(true),
            1 => kept.pop().unwrap(),
            _ => Formula::And(kept),
        }
    }

    fn or(parts: Vec<Formula>) -> Formula {
        let mut kept = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::Const(false) => {}
                Formula::Const(true) => return Formula::Const(true),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => Formula::Const(false),
            1 => kept.pop().unwrap(),
            _ => Formula::Or(kept),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Slot {
    Concept(Name, usize),
    Role(Name, usize, usize),
}

struct Encoder {
    solver: Solver<'static>,
    grid: Vec<Degree>,
    slots: HashMap<Slot, Vec<Lit>>,
    elements: Vec<Object>,
    clauses: usize,
}

impl Encoder {
    fn add_clause(&mut self, clause: &[Lit]) -> Result<(), GridError> {
        self.clauses += 1;
        if self.clauses > MAX_CLAUSES {
            return Err(GridError::TooLarge(MAX_CLAUSES));
        }
        self.solver.add_clause(clause);
        Ok(())
    }

    /// Order-encoded literals of a slot; entry `i - 1` means "value ≥ grid[i]".
    fn slot(&mut self, slot: Slot) -> Result<Vec<Lit>, GridError> {
        if let Some(lits) = self.slots.get(&slot) {
            return Ok(lits.clone());
        }
        let lits: Vec<Lit> = (1..self.grid.len()).map(|_| self.solver.new_lit()).collect();
        for pair in lits.windows(2) {
            self.add_clause(&[!pair[1], pair[0]])?;
        }
        self.slots.insert(slot, lits.clone());
        Ok(lits)
    }

    fn index(&self, degree: &Degree) -> usize {
        self.grid.binary_search(degree).expect("threshold degrees are grid points")
    }

    /// `slot ρ degree` as a formula.
    fn atom(&mut self, slot: Slot, rel: Relation, degree: &Degree) -> Result<Formula, GridError> {
        let lits = self.slot(slot)?;
        let j = self.index(degree);
        // Literal for "value ≥ grid[i]".
        let at_least = |i: usize| -> Formula {
            if i == 0 {
                Formula::Const(true)
            } else if i >= self.grid.len() {
                Formula::Const(false)
            } else {
                Formula::Lit(lits[i - 1])
            }
        };
        let negate = |f: Formula| match f {
            Formula::Const(b) => Formula::Const(!b),
            Formula::Lit(l) => Formula::Lit(!l),
            _ => unreachable!(),
        };
        Ok(match rel {
            Relation::AtLeast => at_least(j),
            Relation::Greater => at_least(j + 1),
            Relation::AtMost => negate(at_least(j + 1)),
            Relation::Less => negate(at_least(j)),
        })
    }

    fn concept(&mut self, concept: &Concept, e: usize, rel: Relation, n: &Degree) -> Result<Formula, GridError> {
        let lower = rel.is_lower();
        Ok(match concept {
            Concept::Top => Formula::Const(rel.holds(&Degree::one(), n)),
            Concept::Bottom => Formula::Const(rel.holds(&Degree::zero(), n)),
            Concept::Primitive(a) => self.atom(Slot::Concept(a.clone(), e), rel, n)?,
            Concept::Not(c) => self.concept(c, e, rel.mirror(), &n.complement())?,
            Concept::And(c, d) | Concept::Or(c, d) => {
                let parts = vec![self.concept(c, e, rel, n)?, self.concept(d, e, rel, n)?];
                // min ≥ n and max ≤ n split into both parts.
                if lower == matches!(concept, Concept::And(..)) {
                    Formula::and(parts)
                } else {
                    Formula::or(parts)
                }
            }
            Concept::Exists(r, c) => {
                let mut per_element = Vec::with_capacity(self.elements.len());
                for f in 0..self.elements.len() {
                    let parts = vec![self.atom(Slot::Role(r.clone(), e, f), rel, n)?, self.concept(c, f, rel, n)?];
                    per_element.push(if lower { Formula::and(parts) } else { Formula::or(parts) });
                }
                if lower {
                    Formula::or(per_element)
                } else {
                    Formula::and(per_element)
                }
            }
            Concept::Forall(r, c) => {
                let mut per_element = Vec::with_capacity(self.elements.len());
                for f in 0..self.elements.len() {
                    let parts = vec![
                        self.atom(Slot::Role(r.clone(), e, f), rel.mirror(), &n.complement())?,
                        self.concept(c, f, rel, n)?,
                    ];
                    per_element.push(if lower { Formula::or(parts) } else { Formula::and(parts) });
                }
                if lower {
                    Formula::and(per_element)
                } else {
                    Formula::or(per_element)
                }
            }
        })
    }

    fn constraint(&mut self, c: &FuzzyConstraint, position: &HashMap<Name, usize>) -> Result<Formula, GridError> {
        let at = |o: &Object| match o {
            Object::Individual(name) => position[name],
            Object::Variable(_) => unreachable!("variables are rejected up front"),
        };
        match &c.assertion {
            Assertion::Concept { object, concept } => self.concept(concept, at(object), c.rel, &c.degree),
            Assertion::Role { subject, filler, role } => {
                self.atom(Slot::Role(role.clone(), at(subject), at(filler)), c.rel, &c.degree)
            }
        }
    }

    /// Plaisted-Greenbaum: a literal that implies `formula`.
    fn literal(&mut self, formula: Formula) -> Result<Lit, GridError> {
        Ok(match formula {
            Formula::Lit(l) => l,
            Formula::Const(b) => {
                let l = self.solver.new_lit();
                self.add_clause(&[if b { l } else { !l }])?;
                l
            }
            Formula::And(parts) => {
                let l = self.solver.new_lit();
                for p in parts {
                    let pl = self.literal(p)?;
                    self.add_clause(&[!l, pl])?;
                }
                l
            }
            Formula::Or(parts) => {
                let l = self.solver.new_lit();
                let mut clause = vec![!l];
                for p in parts {
                    clause.push(self.literal(p)?);
                }
                self.add_clause(&clause)?;
                l
            }
        })
    }

    fn assert(&mut self, formula: Formula) -> Result<(), GridError> {
        let l = self.literal(formula)?;
        self.add_clause(&[l])
    }
}

/// Decides `kb ⊨ query` over grid interpretations with at most
/// `domain_bound` elements (default: [`default_domain_bound`]).
pub fn grid_oracle_entails(
    kb: &KnowledgeBase,
    query: &FuzzyConstraint,
    domain_bound: Option<usize>,
) -> Result<GridVerdict, GridError> {
    if !kb.is_purely_assertional() {
        return Err(GridError::NotAssertional);
    }
    if let Some(c) = kb.abox.iter().chain(std::iter::once(query)).find(|c| c.mentions_variable()) {
        return Err(GridError::Variable(Box::new(c.clone())));
    }
    let individuals = input_individuals(kb, query);
    let bound = domain_bound.unwrap_or_else(|| default_domain_bound(kb, query)).max(1);
    if bound < individuals.len() {
        return Err(GridError::DomainTooSmall { bound, individuals: individuals.len() });
    }
    let mut elements: Vec<Object> = individuals.iter().map(|n| Object::Individual(n.clone())).collect();
    let position: HashMap<Name, usize> = individuals.iter().cloned().zip(0..).collect();
    elements.extend((0..(bound - individuals.len()) as u32).map(Object::Variable));

    let all: Vec<&FuzzyConstraint> = kb.abox.iter().chain(std::iter::once(query)).collect();
    let grid = build_grid(&all);
    let mut enc = Encoder { solver: Solver::new(), grid: grid.clone(), slots: HashMap::new(), elements, clauses: 0 };
    for c in &kb.abox {
        let f = enc.constraint(c, &position)?;
        enc.assert(f)?;
    }
    let f = enc.constraint(&query.negated(), &position)?;
    enc.assert(f)?;

    let satisfiable = enc.solver.solve().expect("solver runs without proof output");
    if !satisfiable {
        return Ok(GridVerdict { entailed: true, domain_bound: bound, grid, countermodel: None });
    }
    let model = enc.solver.model().expect("model after a satisfiable run");
    let truth: HashMap<usize, bool> = model.iter().map(|l| (l.var().index(), l.is_positive())).collect();
    let mut interp = Interpretation::new();
    for e in &enc.elements {
        interp.add_element(e.clone());
    }
    for (slot, lits) in &enc.slots {
        let level = lits.iter().take_while(|l| truth.get(&l.var().index()).copied() == Some(l.is_positive())).count();
        let value = grid[level].clone();
        match slot {
            Slot::Concept(a, e) => interp.set_concept(a, enc.elements[*e].clone(), value),
            Slot::Role(r, e, f) => interp.set_role(r, enc.elements[*e].clone(), enc.elements[*f].clone(), value),
        }
    }
    for c in &kb.abox {
        if !satisfies(&interp, c)? {
            return Err(GridError::Decoding(c.to_string()));
        }
    }
    if satisfies(&interp, query)? {
        return Err(GridError::Decoding(query.negated().to_string()));
    }
    Ok(GridVerdict { entailed: false, domain_bound: bound, grid, countermodel: Some(interp) })
}
