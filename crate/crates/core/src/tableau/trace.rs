//! Satisfiability with one role successor chain alive at a time.
//!
//! A set is satisfiable iff one of its pre-completions (closure under every
//! rule except the generating ones) is clash-free and, for each generating
//! constraint `g` of that pre-completion, the successor set spawned by `g`
//! is satisfiable. The successor set holds the new role constraint, the
//! constraint on the new variable and everything the universal lower bounds
//! and existential upper bounds of the parent push along the new edge.
//! Successors of one object never interact, so they are checked one after
//! another and discarded.

use serde::Serialize;

use super::{insert_all, ConstraintSet, RuleKind, SearchOptions, TableauError};
use crate::syntax::{Assertion, Concept, FuzzyConstraint};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceStats {
    pub rule_applications: usize,
    pub precompletions: usize,
    /// Successor sets checked.
    pub traces: usize,
    pub max_depth: usize,
    /// Largest total number of constraints held by the sets on the current
    /// successor chain.
    pub peak_live_constraints: usize,
}

#[derive(Debug, Clone)]
pub enum TraceResult {
    /// Carries the clash-free pre-completion of the input whose successors
    /// were all satisfiable.
    Satisfiable(ConstraintSet),
    Unsatisfiable,
}

impl TraceResult {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, TraceResult::Satisfiable(_))
    }
}

#[derive(Debug, Clone)]
pub struct TraceOutcome {
    pub result: TraceResult,
    pub stats: TraceStats,
}

pub fn complete_trace(set: &ConstraintSet) -> Result<TraceResult, TableauError> {
    Ok(complete_trace_with(set, &SearchOptions::default())?.result)
}

pub fn complete_trace_with(set: &ConstraintSet, options: &SearchOptions) -> Result<TraceOutcome, TableauError> {
    let mut tracer = Tracer { budget: options.step_budget, stats: TraceStats::default(), root: None };
    if super::detect_clash(set).is_some() {
        return Ok(TraceOutcome { result: TraceResult::Unsatisfiable, stats: tracer.stats });
    }
    let sat = tracer.precomplete(set.clone(), 0, 0)?;
    let result = match (sat, tracer.root.take()) {
        (true, Some(root)) => TraceResult::Satisfiable(root),
        _ => TraceResult::Unsatisfiable,
    };
    Ok(TraceOutcome { result, stats: tracer.stats })
}

struct Tracer {
    budget: usize,
    stats: TraceStats,
    root: Option<ConstraintSet>,
}

impl Tracer {
    fn spend(&mut self) -> Result<(), TableauError> {
        self.stats.rule_applications += 1;
        if self.stats.rule_applications > self.budget {
            return Err(TableauError::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// Searches the pre-completions of `set` for one whose traces are all clash-free.
    fn precomplete(&mut self, mut set: ConstraintSet, live_above: usize, depth: usize) -> Result<bool, TableauError> {
        loop {
            self.stats.peak_live_constraints = self.stats.peak_live_constraints.max(live_above + set.len());
            let Some(app) = set.next_application_of(false) else {
                return self.check_successors(set, live_above, depth);
            };
            self.spend()?;
            if app.alternatives.len() == 1 {
                let conclusions = app.alternatives.into_iter().next().unwrap();
                if insert_all(&mut set, conclusions).is_some() {
                    return Ok(false);
                }
                continue;
            }
            for conclusions in app.alternatives {
                let mut succ = set.clone();
                if insert_all(&mut succ, conclusions).is_none() && self.precomplete(succ, live_above, depth)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
    }

    fn check_successors(&mut self, mut pre: ConstraintSet, live_above: usize, depth: usize) -> Result<bool, TableauError> {
        self.stats.precompletions += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let live = live_above + pre.len();
        let mut pending = Vec::new();
        for i in 0..pre.len() {
            if let Some(app) = pre.generating_at(i) {
                pending.push(app);
            }
        }
        for app in pending {
            debug_assert_eq!(app.rule.kind(), RuleKind::Generating);
            self.spend()?;
            self.stats.traces += 1;
            let conclusions = &app.alternatives[0];
            let role_constraint = &conclusions[0];
            let mut succ: ConstraintSet = conclusions.iter().cloned().collect();
            for extra in propagations(&pre, role_constraint) {
                succ.insert(extra);
            }
            if super::detect_clash(&succ).is_some() || !self.precomplete(succ, live, depth + 1)? {
                return Ok(false);
            }
        }
        if depth == 0 && self.root.is_none() {
            self.root = Some(pre);
        }
        Ok(true)
    }
}

/// Conclusions the propagation constraints of `pre` derive along `role_constraint`.
fn propagations(pre: &ConstraintSet, role_constraint: &FuzzyConstraint) -> Vec<FuzzyConstraint> {
    let Assertion::Role { subject, filler, role } = &role_constraint.assertion else { return Vec::new() };
    let mut out = Vec::new();
    for c in pre.iter() {
        let Assertion::Concept { object, concept: concept @ (Concept::Forall(r, body) | Concept::Exists(r, body)) } =
            &c.assertion
        else {
            continue;
        };
        if object != subject || r != role {
            continue;
        }
        let rule = super::Rule::of(concept, c.rel);
        if rule.kind() != RuleKind::Deterministic {
            continue;
        }
        let guard = super::propagation_guard(role_constraint.assertion.clone(), rule, &c.degree);
        if super::conjugated(role_constraint, &guard) {
            out.push(FuzzyConstraint::new(
                Assertion::Concept { object: filler.clone(), concept: (**body).clone() },
                c.rel,
                c.degree.clone(),
            ));
        }
    }
    out
}
