//! Shared fixtures and random generators for the integration tests.
//!
//! Random inputs are kept small: primitives `A`, `B`, `C`, the role `R`,
//! individuals `a` and `b`, concept depth at most two and degrees in
//! tenths.

#![allow(dead_code)]

use fuzzy_alc::parser::{parse_concept, parse_constraint, parse_kb};
use fuzzy_alc::{Assertion, Axiom, Concept, Degree, FuzzyConstraint, KnowledgeBase, Relation};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRng, TestRunner};

pub const PRIMITIVES: [&str; 3] = ["A", "B", "C"];
pub const INDIVIDUALS: [&str; 2] = ["a", "b"];

pub fn fixture(name: &str) -> KnowledgeBase {
    let path = format!("{}/tests/fixtures/{name}.fkb", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_kb(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn d(text: &str) -> Degree {
    Degree::parse(text).unwrap()
}

pub fn c(text: &str) -> Concept {
    parse_concept(text).unwrap()
}

pub fn q(text: &str) -> FuzzyConstraint {
    parse_constraint(text).unwrap()
}

/// The assertion part of `text >= 0`.
pub fn assertion(text: &str) -> Assertion {
    parse_constraint(&format!("{text} >= 0")).unwrap().assertion
}

/// `C1 ⊓ … ⊓ Ck` where `C1 = (∃R.A11) ⊓ (∃R.A12) ⊓ ∀R.C2` and the innermost
/// level has no universal part.
pub fn nested_chain(depth: usize) -> Concept {
    let level = |i: usize| Concept::exists("R", Concept::atom(&format!("A{i}1"))).and(Concept::exists("R", Concept::atom(&format!("A{i}2"))));
    let mut concept = level(depth);
    for i in (1..depth).rev() {
        concept = level(i).and(Concept::forall("R", concept));
    }
    concept
}

pub fn degree() -> impl Strategy<Value = Degree> {
    (1i64..=9).prop_map(|k| Degree::ratio(k, 10))
}

pub fn individual() -> impl Strategy<Value = &'static str> {
    prop::sample::select(INDIVIDUALS.to_vec())
}

pub fn concept() -> BoxedStrategy<Concept> {
    concept_over(PRIMITIVES.to_vec())
}

pub fn concept_over(primitives: Vec<&'static str>) -> BoxedStrategy<Concept> {
    let leaf = prop_oneof![
        8 => prop::sample::select(primitives).prop_map(Concept::atom),
        1 => Just(Concept::Top),
        1 => Just(Concept::Bottom),
    ];
    leaf.prop_recursive(2, 10, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Concept::negate),
            (inner.clone(), inner.clone()).prop_map(|(c, d)| c.and(d)),
            (inner.clone(), inner.clone()).prop_map(|(c, d)| c.or(d)),
            inner.clone().prop_map(|c| Concept::forall("R", c)),
            inner.prop_map(|c| Concept::exists("R", c)),
        ]
    })
    .boxed()
}

pub fn bound() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::AtLeast), Just(Relation::AtMost)]
}

pub fn concept_constraint() -> impl Strategy<Value = FuzzyConstraint> {
    (individual(), concept(), bound(), degree())
        .prop_map(|(a, c, rel, n)| FuzzyConstraint::new(Assertion::concept(a, c), rel, n))
}

/// A fuzzy assertion; role assertions are lower bounds unless
/// `role_upper` allows both directions.
pub fn fuzzy_assertion(role_upper: bool) -> BoxedStrategy<FuzzyConstraint> {
    let role_rel = if role_upper { bound().boxed() } else { Just(Relation::AtLeast).boxed() };
    let role = (individual(), individual(), role_rel, degree())
        .prop_map(|(a, b, rel, n)| FuzzyConstraint::new(Assertion::role(a, b, "R"), rel, n));
    prop_oneof![3 => concept_constraint(), 1 => role].boxed()
}

/// A purely assertional KB with one to four assertions.
pub fn assertional_kb(role_upper: bool) -> impl Strategy<Value = KnowledgeBase> {
    prop::collection::vec(fuzzy_assertion(role_upper), 1..=4).prop_map(KnowledgeBase::assertional)
}

/// An acyclic terminology: `X1` is defined over the primitives and `X2`
/// may also use `X1`. Each axiom is a specialisation or a definition.
pub fn terminology() -> impl Strategy<Value = Vec<Axiom>> {
    let rhs1 = concept();
    let rhs2 = concept_over(vec!["A", "B", "X1"]);
    (any::<bool>(), rhs1, any::<bool>(), rhs2).prop_map(|(spec1, c1, spec2, c2)| {
        let axiom = |spec: bool, lhs: &str, rhs: Concept| {
            if spec {
                Axiom::specialisation(lhs, rhs)
            } else {
                Axiom::definition(lhs, rhs)
            }
        };
        vec![axiom(spec1, "X1", c1), axiom(spec2, "X2", c2)]
    })
}

/// Deterministic sampler for loops that need an exact number of cases.
pub struct Sampler {
    runner: TestRunner,
}

impl Sampler {
    pub fn new(seed: u8) -> Self {
        let rng = TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &[seed; 32]);
        Sampler { runner: TestRunner::new_with_rng(Config::default(), rng) }
    }

    pub fn sample<S: Strategy>(&mut self, strategy: &S) -> S::Value {
        strategy.new_tree(&mut self.runner).expect("strategy failed to generate").current()
    }
}
