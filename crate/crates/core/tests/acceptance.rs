//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line reaches stdout. Expected
//! degrees of the fixture examples are their known answers; everything else
//! is checked against an independent procedure (linear scans, the grid
//! oracle, the crisp image or direct evaluation in an interpretation).

mod common;

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use fuzzy_alc::oracle::{
    classify_all, classify_normalisation, crisp_entails, crisp_map, crisp_map_kb, default_domain_bound,
    grid_oracle_entails, NormalisationClass,
};
use fuzzy_alc::reasoner::{Mode, Reasoner, ReasonerOptions};
use fuzzy_alc::semantics::{evaluate_concept, satisfies_axiom, satisfies_kb, Interpretation};
use fuzzy_alc::tableau::trace::complete_trace_with;
use fuzzy_alc::tableau::{complete_with, enumerate_completions, extract_model, ConstraintSet, SatResult, SearchOptions};
use fuzzy_alc::terminology::{to_nnf, Expansion, ExpansionOptions};
use fuzzy_alc::{Assertion, Concept, Degree, FuzzyConstraint, KnowledgeBase, Name, Object, Relation};
use proptest::prelude::*;

type Outcome = Result<String, String>;
type Family = (&'static str, fn(&mut Sampler) -> Outcome);
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn reasoner(kb: &KnowledgeBase) -> Result<Reasoner, String> {
    ok(Reasoner::new(kb))
}

fn trace_reasoner(kb: &KnowledgeBase) -> Result<Reasoner, String> {
    ok(Reasoner::with_options(kb, ReasonerOptions { mode: Mode::Trace, ..Default::default() }))
}

fn with(kb: &KnowledgeBase, extra: impl IntoIterator<Item = FuzzyConstraint>) -> KnowledgeBase {
    let mut out = kb.clone();
    out.abox.extend(extra);
    out
}

// ── Criteria ───────────────────────────────────────────────────────────────

fn example5_reproduction() -> Outcome {
    let r = reasoner(&fixture("example5"))?;
    let q = c("Video and some About . SportKind");
    let v1 = ok(r.glb(&Assertion::concept("v1", q.clone())))?.degree;
    let v2 = ok(r.glb(&Assertion::concept("v2", q.clone())))?.degree;
    ensure!(v1 == d("0.9"), "glb(v1:Q) = {v1}, expected 0.9");
    ensure!(v2 == d("0.6"), "glb(v2:Q) = {v2}, expected 0.6");
    let ranked = ok(r.rank(&q, true))?;
    let order: Vec<&str> = ranked.iter().map(|(n, _)| n.as_ref()).collect();
    ensure!(order == ["v1", "v2"], "rank order {order:?}");
    Ok(format!("glb v1 = {v1}, glb v2 = {v2}, rank {order:?}"))
}

fn example6_reproduction() -> Outcome {
    let kb = fixture("example6");
    let r = reasoner(&kb)?;
    ensure!(ok(r.entails(&q("(a : some R . (D and C)) >= 0.4")))?, "0.4 not entailed");
    ensure!(!ok(r.entails(&q("(a : some R . (D and C)) >= 0.5")))?, "0.5 entailed");
    let glb = ok(r.glb(&assertion("(a : some R . (D and C))")))?;
    ensure!(glb.degree == d("0.4"), "glb = {}", glb.degree);
    let set: ConstraintSet = kb.abox.iter().cloned().chain([q("(a : some R . (D and C)) < 0.5")]).collect();
    let completions = ok(enumerate_completions(&set, &SearchOptions::default()))?;
    ensure!(completions.len() >= 2, "{} clash-free completions", completions.len());
    Ok(format!("glb = {} after {} tests, {} clash-free completions", glb.degree, glb.entailment_tests, completions.len()))
}

fn example7_reproduction() -> Outcome {
    let r = reasoner(&fixture("example4"))?;
    let query = q("(i1 : some About . Car) >= 0.6");
    ensure!(ok(r.entails(&query))?, "not entailed");
    let outcome = ok(r.search(Some(&query), true))?;
    ensure!(!outcome.result.is_satisfiable(), "refutation set satisfiable");
    let proof = outcome.proof.ok_or("no proof log")?;
    let leaves = proof.leaf_branches();
    let closed = proof.closed_branches();
    ensure!(!leaves.is_empty(), "empty proof log");
    for leaf in &leaves {
        ensure!(closed.contains(leaf), "branch {leaf} has no clash");
    }
    Ok(format!("{} leaf branches, all closed", leaves.len()))
}

/// Reference model of the example6 refutation set, with `x` the
/// generated witness.
fn example8_reference_model() -> Interpretation {
    let (a, b, x) = (Object::individual("a"), Object::individual("b"), Object::Variable(0));
    let mut m = Interpretation::new();
    for e in [&a, &b, &x] {
        m.add_element(e.clone());
    }
    m.set_concept("C", b.clone(), d("0.2"));
    m.set_concept("D", b.clone(), d("0.3"));
    m.set_concept("D", x.clone(), d("0.7"));
    m.set_concept("C", x.clone(), d("0.4"));
    m.set_role("R", a.clone(), b, d("0.5"));
    m.set_role("R", a, x, d("0.7"));
    m
}

fn example8_reproduction() -> Outcome {
    let s = with(&fixture("example6"), [q("(a : some R . (D and C)) < 0.5")]);
    let set: ConstraintSet = s.abox.iter().cloned().collect();
    let SatResult::Satisfiable(completion) = ok(fuzzy_alc::tableau::complete(&set))? else {
        return Err("S is unsatisfiable".into());
    };
    let model = ok(extract_model(&completion))?;
    let individuals = model.domain().iter().filter(|o| !o.is_variable()).count();
    ensure!(model.domain().len() == 3 && individuals == 2, "domain {:?}", model.domain());
    ensure!(ok(satisfies_kb(&model, &s))?, "canonical model fails S");
    ensure!(ok(satisfies_kb(&example8_reference_model(), &s))?, "reference model fails S");
    let domain: Vec<String> = model.domain().iter().map(ToString::to_string).collect();
    Ok(format!("canonical model over {{{}}} and reference model both satisfy S", domain.join(", ")))
}

fn examples2_and_3() -> Outcome {
    let ex2 = reasoner(&fixture("example2"))?;
    let glb = ok(ex2.glb(&assertion("(a : B)")))?.degree;
    ensure!(glb == Degree::zero(), "example2: glb(a:B) = {glb}");

    let ex3 = fixture("example3");
    let psi = q("(a : B) <= 0.7");
    ensure!(classify_all(&ex3.abox) == NormalisationClass::KbNormalised, "example3 KB is not KB-normalised");
    ensure!(classify_normalisation(&psi) == NormalisationClass::QueryNormalised, "query not query-normalised");
    let fuzzy = ok(reasoner(&ex3)?.entails(&psi))?;
    let crisp = ok(crisp_entails(&ok(crisp_map_kb(&ex3))?, &ok(crisp_map(&psi))?))?;
    ensure!(fuzzy, "example3: fuzzy entailment fails");
    ensure!(crisp, "example3: crisp entailment fails");
    Ok("example2 glb = 0; example3 fuzzy and crisp entailment both hold".into())
}

fn excluded_middle_constants() -> Outcome {
    let r = reasoner(&KnowledgeBase::default())?;
    let lub = ok(r.lub(&assertion("(a : not C and C)")))?.degree;
    let glb = ok(r.glb(&assertion("(a : not C or C)")))?.degree;
    ensure!(lub == Degree::half(), "lub = {lub}");
    ensure!(glb == Degree::half(), "glb = {glb}");
    Ok(format!("lub(a:¬C⊓C) = {lub}, glb(a:¬C⊔C) = {glb}"))
}

// ── Criterion 7: property families ─────────────────────────────────────────

const PROPERTY_CASES: usize = 1000;

fn random_query_assertion() -> BoxedStrategy<Assertion> {
    prop_oneof![
        4 => (individual(), concept()).prop_map(|(a, c)| Assertion::concept(a, c)),
        1 => (individual(), individual()).prop_map(|(a, b)| Assertion::role(a, b, "R")),
    ]
    .boxed()
}

/// glb and lub come from the candidate sets and coincide with a linear
/// scan over them.
fn bounds_in_candidates(sampler: &mut Sampler) -> Outcome {
    let (kb_s, alpha_s) = (assertional_kb(true), random_query_assertion());
    let mut inconsistent = 0;
    for case in 0..PROPERTY_CASES {
        let kb = sampler.sample(&kb_s);
        let alpha = sampler.sample(&alpha_s);
        let r = reasoner(&kb)?;
        let candidates = r.degree_candidates();
        let glb = ok(r.glb(&alpha))?;
        let lub = ok(r.lub(&alpha))?;
        if glb.inconsistent {
            inconsistent += 1;
            ensure!(glb.degree.is_one() && lub.degree.is_zero(), "case {case}: inconsistent KB bounds");
            continue;
        }
        ensure!(candidates.contains(&glb.degree), "case {case}: glb {} not in N", glb.degree);
        ensure!(candidates.contains(&lub.degree.complement()), "case {case}: lub {} not in 1 − N", lub.degree);
        for n in &candidates.values {
            if !n.is_zero() {
                let at_least = ok(r.entails(&FuzzyConstraint::at_least(alpha.clone(), n.clone())))?;
                ensure!(at_least == (*n <= glb.degree), "case {case}: ≥ {n} scan disagrees with glb {}", glb.degree);
            }
            let m = n.complement();
            if !m.is_one() {
                let at_most = ok(r.entails(&FuzzyConstraint::at_most(alpha.clone(), m.clone())))?;
                ensure!(at_most == (m >= lub.degree), "case {case}: ≤ {m} scan disagrees with lub {}", lub.degree);
            }
        }
    }
    Ok(format!("{PROPERTY_CASES} cases ({inconsistent} inconsistent KBs)"))
}

/// `lub(Σ, a:C) = 1 − glb(Σ, a:¬C)`.
fn duality(sampler: &mut Sampler) -> Outcome {
    let (kb_s, c_s) = (assertional_kb(true), concept());
    let mut case = 0;
    while case < PROPERTY_CASES {
        let kb = sampler.sample(&kb_s);
        let concept = sampler.sample(&c_s);
        let r = reasoner(&kb)?;
        if !ok(r.is_satisfiable())? {
            continue;
        }
        case += 1;
        let lub = ok(r.lub(&Assertion::concept("a", concept.clone())))?.degree;
        let glb = ok(r.glb(&Assertion::concept("a", concept.negate())))?.degree;
        ensure!(lub == glb.complement(), "case {case}: lub {lub} vs 1 − glb {}", glb.complement());
    }
    Ok(format!("{PROPERTY_CASES} consistent cases"))
}

/// Role glb is the largest explicit lower bound on the pair, which must
/// agree with entailment tested degree by degree.
fn role_glb(sampler: &mut Sampler) -> Outcome {
    let kb_s = assertional_kb(true);
    let pair_s = (individual(), individual());
    let mut consistent = 0;
    while consistent < PROPERTY_CASES {
        let kb = sampler.sample(&kb_s);
        let (a, b) = sampler.sample(&pair_s);
        let r = reasoner(&kb)?;
        if !ok(r.is_satisfiable())? {
            continue;
        }
        consistent += 1;
        let alpha = Assertion::role(a, b, "R");
        let explicit = kb
            .abox
            .iter()
            .filter(|c| c.assertion == alpha && c.rel == Relation::AtLeast)
            .map(|c| c.degree.clone())
            .max()
            .unwrap_or_else(Degree::zero);
        let glb = ok(r.glb(&alpha))?.degree;
        ensure!(glb == explicit, "({a}, {b}): glb {glb} vs explicit max {explicit}");
        let mut scanned = Degree::zero();
        for n in r.degree_candidates().values.iter().filter(|n| !n.is_zero()) {
            if ok(r.entails(&FuzzyConstraint::at_least(alpha.clone(), n.clone())))? {
                scanned = scanned.max(n.clone());
            }
        }
        ensure!(glb == scanned, "({a}, {b}): glb {glb} vs scanned {scanned}");
    }
    Ok(format!("{PROPERTY_CASES} consistent cases"))
}

fn modus_ponens(sampler: &mut Sampler) -> Outcome {
    // Degree pairs with m > 1 − n.
    let degrees = (degree(), degree()).prop_filter("m > 1 - n", |(n, m)| *m > n.complement());
    let pair = (concept(), concept());
    let mut counts = [0usize; 5];
    for case in 0..PROPERTY_CASES {
        let (n, m) = sampler.sample(&degrees);
        let (cc, dd) = sampler.sample(&pair);
        let low = n.clone().min(m.clone());
        let entails = |abox: Vec<FuzzyConstraint>, query: FuzzyConstraint| -> Result<bool, String> {
            ok(reasoner(&KnowledgeBase::assertional(abox))?.entails(&query))
        };
        let at_least = |ind: &str, concept: Concept, degree: &Degree| {
            FuzzyConstraint::at_least(Assertion::concept(ind, concept), degree.clone())
        };

        let premises = vec![at_least("a", cc.clone(), &m), at_least("a", cc.clone().negate().or(dd.clone()), &n)];
        ensure!(entails(premises, at_least("a", dd.clone(), &n))?, "case {case}: concept modus ponens, C={cc} D={dd} n={n} m={m}");
        counts[0] += 1;

        let premises = vec![
            FuzzyConstraint::at_least(Assertion::role("a", "b", "R"), m.clone()),
            at_least("a", Concept::forall("R", dd.clone()), &n),
        ];
        ensure!(entails(premises, at_least("b", dd.clone(), &n))?, "case {case}: role modus ponens, D={dd} n={n} m={m}");
        counts[1] += 1;

        let premises =
            vec![at_least("a", Concept::exists("R", cc.clone()), &m), at_least("a", Concept::forall("R", dd.clone()), &n)];
        let goal = at_least("a", Concept::exists("R", cc.clone().and(dd.clone())), &low);
        ensure!(entails(premises, goal)?, "case {case}: ∃/∀ combination, C={cc} D={dd} n={n} m={m}");
        counts[2] += 1;

        // The ∀/∀ combination needs no side condition on the degrees.
        let (n2, m2) = (sampler.sample(&degree()), sampler.sample(&degree()));
        let premises =
            vec![at_least("a", Concept::forall("R", cc.clone()), &m2), at_least("a", Concept::forall("R", dd.clone()), &n2)];
        let goal = at_least("a", Concept::forall("R", cc.clone().and(dd.clone())), &n2.clone().min(m2.clone()));
        ensure!(entails(premises, goal)?, "case {case}: ∀/∀ combination, C={cc} D={dd} n={n2} m={m2}");
        counts[3] += 1;
    }

    // Specialisation: a defined or specialised name is subsumed by its
    // right-hand side, and bounds move along the subsumption.
    let (tbox_s, abox_s) = (terminology(), assertional_kb(true));
    for case in 0..PROPERTY_CASES {
        let tbox = sampler.sample(&tbox_s);
        let abox = sampler.sample(&abox_s).abox;
        let n = sampler.sample(&degree());
        let axiom = &tbox[case % tbox.len()];
        let (sub, sup) = (Concept::Primitive(axiom.lhs().clone()), axiom.rhs().clone());
        let kb = KnowledgeBase::new(abox, tbox.clone());
        let r = reasoner(&kb)?;
        ensure!(ok(r.subsumes(&sub, &sup))?, "case {case}: {sub} not subsumed by {sup}");
        let lower = with(&kb, [FuzzyConstraint::at_least(Assertion::concept("a", sub.clone()), n.clone())]);
        let goal = FuzzyConstraint::at_least(Assertion::concept("a", sup.clone()), n.clone());
        ensure!(ok(reasoner(&lower)?.entails(&goal))?, "case {case}: ≥ {n} does not propagate from {sub} to {sup}");
        let upper = with(&kb, [FuzzyConstraint::at_most(Assertion::concept("a", sup.clone()), n.clone())]);
        let goal = FuzzyConstraint::at_most(Assertion::concept("a", sub.clone()), n.clone());
        ensure!(ok(reasoner(&upper)?.entails(&goal))?, "case {case}: ≤ {n} does not propagate from {sup} to {sub}");
        counts[4] += 1;
    }
    Ok(format!(
        "concept {}, role {}, ∃/∀ {}, ∀/∀ {}, specialisation {}",
        counts[0], counts[1], counts[2], counts[3], counts[4]
    ))
}

/// The equivalence laws, each pair checked by subsumption both ways.
fn equivalence_laws(sampler: &mut Sampler) -> Outcome {
    let triple = (concept(), concept(), concept());
    let tbox = [];
    let equivalent = |x: &Concept, y: &Concept| -> Result<bool, String> {
        Ok(ok(fuzzy_alc::reasoner::subsumes(&tbox, x, y))? && ok(fuzzy_alc::reasoner::subsumes(&tbox, y, x))?)
    };
    for case in 0..PROPERTY_CASES {
        let (x, y, z) = sampler.sample(&triple);
        let (top, bottom) = (Concept::Top, Concept::Bottom);
        let all = |c: Concept| Concept::forall("R", c);
        let some = |c: Concept| Concept::exists("R", c);
        let laws: Vec<(&str, Concept, Concept)> = vec![
            ("¬⊤ ≅ ⊥", top.clone().negate(), bottom.clone()),
            ("C ⊓ ⊤ ≅ C", x.clone().and(top.clone()), x.clone()),
            ("C ⊔ ⊤ ≅ ⊤", x.clone().or(top.clone()), top.clone()),
            ("C ⊓ ⊥ ≅ ⊥", x.clone().and(bottom.clone()), bottom.clone()),
            ("C ⊔ ⊥ ≅ C", x.clone().or(bottom.clone()), x.clone()),
            ("¬¬C ≅ C", x.clone().negate().negate(), x.clone()),
            ("¬(C ⊓ D) ≅ ¬C ⊔ ¬D", x.clone().and(y.clone()).negate(), x.clone().negate().or(y.clone().negate())),
            ("¬(C ⊔ D) ≅ ¬C ⊓ ¬D", x.clone().or(y.clone()).negate(), x.clone().negate().and(y.clone().negate())),
            (
                "C ⊓ (D ⊔ E) ≅ (C ⊓ D) ⊔ (C ⊓ E)",
                x.clone().and(y.clone().or(z.clone())),
                x.clone().and(y.clone()).or(x.clone().and(z.clone())),
            ),
            (
                "C ⊔ (D ⊓ E) ≅ (C ⊔ D) ⊓ (C ⊔ E)",
                x.clone().or(y.clone().and(z.clone())),
                x.clone().or(y.clone()).and(x.clone().or(z.clone())),
            ),
            ("∀R.C ≅ ¬∃R.¬C", all(x.clone()), some(x.clone().negate()).negate()),
            ("∀R.⊤ ≅ ⊤", all(top.clone()), top.clone()),
            ("∃R.⊥ ≅ ⊥", some(bottom.clone()), bottom.clone()),
            ("∀R.C ⊓ ∀R.D ≅ ∀R.(C ⊓ D)", all(x.clone()).and(all(y.clone())), all(x.clone().and(y.clone()))),
        ];
        for (law, lhs, rhs) in &laws {
            ensure!(equivalent(lhs, rhs)?, "case {case}: {law} fails for C={x}, D={y}, E={z}");
        }
    }
    let a = c("A");
    ensure!(!equivalent(&a.clone().and(a.negate()), &Concept::Bottom)?, "A ⊓ ¬A ≅ ⊥ should fail");
    Ok(format!("{PROPERTY_CASES} cases × 14 laws; A ⊓ ¬A ≇ ⊥"))
}

/// Random interpretation over `{a, b, v0}` with degrees in tenths for the
/// given concept names and the role `R`.
fn interpretation() -> impl Strategy<Value = Vec<Degree>> {
    prop::collection::vec((0i64..=10).prop_map(|k| Degree::ratio(k, 10)), 64)
}

fn build_interpretation(concepts: &[Name], values: &[Degree]) -> Interpretation {
    let elements = [Object::individual("a"), Object::individual("b"), Object::Variable(0)];
    let mut m = Interpretation::new();
    for e in &elements {
        m.add_element(e.clone());
    }
    let mut next = values.iter().cycle();
    for name in concepts {
        for e in &elements {
            m.set_concept(name, e.clone(), next.next().unwrap().clone());
        }
    }
    for from in &elements {
        for to in &elements {
            m.set_role("R", from.clone(), to.clone(), next.next().unwrap().clone());
        }
    }
    m
}

fn eval_all(m: &Interpretation, concept: &Concept) -> Result<Vec<Degree>, String> {
    m.domain().iter().map(|e| ok(evaluate_concept(m, concept, e))).collect()
}

/// An interpretation of the primitive and fresh names, extended to the
/// defined names by their unfolded terms, satisfies the terminology and
/// gives every concept the value of its expansion.
fn expansion_preservation(sampler: &mut Sampler) -> Outcome {
    let (tbox_s, c_s, i_s) = (terminology(), concept_over(vec!["A", "B", "C", "X1", "X2"]), interpretation());
    for case in 0..PROPERTY_CASES {
        let tbox = sampler.sample(&tbox_s);
        let concept = sampler.sample(&c_s);
        let values = sampler.sample(&i_s);
        let vocabulary = concept.primitives();
        let expansion = ok(Expansion::new(&tbox, &vocabulary, ExpansionOptions::default()))?;
        let base: Vec<Name> =
            PRIMITIVES.iter().map(|&p| Name::from(p)).chain(expansion.introduced().iter().cloned()).collect();
        let mut m = build_interpretation(&base, &values);
        let elements: Vec<Object> = m.domain().iter().cloned().collect();
        let mut defined: BTreeMap<Name, Vec<Degree>> = BTreeMap::new();
        for (name, term) in expansion.definitions() {
            defined.insert(name.clone(), eval_all(&m, term)?);
        }
        for (name, degrees) in defined {
            for (e, v) in elements.iter().zip(degrees) {
                m.set_concept(&name, e.clone(), v);
            }
        }
        for axiom in &tbox {
            ensure!(satisfies_axiom(&m, axiom), "case {case}: extended interpretation violates {axiom}");
        }
        let expanded = ok(expansion.expand_concept(&concept))?;
        ensure!(
            eval_all(&m, &concept)? == eval_all(&m, &expanded)?,
            "case {case}: {concept} and its expansion {expanded} differ"
        );
    }
    Ok(format!("{PROPERTY_CASES} cases"))
}

fn nnf_evaluation(sampler: &mut Sampler) -> Outcome {
    let (c_s, i_s) = (concept(), interpretation());
    let names: Vec<Name> = PRIMITIVES.iter().map(|&p| Name::from(p)).collect();
    for case in 0..PROPERTY_CASES {
        let concept = sampler.sample(&c_s);
        let m = build_interpretation(&names, &sampler.sample(&i_s));
        let nnf = to_nnf(&concept);
        ensure!(nnf.is_nnf(), "case {case}: {nnf} is not in NNF");
        ensure!(eval_all(&m, &concept)? == eval_all(&m, &nnf)?, "case {case}: {concept} vs {nnf}");
    }
    Ok(format!("{PROPERTY_CASES} cases"))
}

fn property_suite() -> Outcome {
    let mut sampler = Sampler::new(7);
    let families: [Family; 7] = [
        ("bounds in N", bounds_in_candidates),
        ("duality", duality),
        ("role glb", role_glb),
        ("modus ponens", modus_ponens),
        ("equivalence laws", equivalence_laws),
        ("expansion", expansion_preservation),
        ("nnf", nnf_evaluation),
    ];
    let mut details = Vec::new();
    for (name, family) in families {
        let detail = family(&mut sampler).map_err(|e| format!("{name}: {e}"))?;
        details.push(format!("{name}: {detail}"));
    }
    Ok(details.join("; "))
}

// ── Criterion 8: grid oracle ───────────────────────────────────────────────

const ORACLE_CASES: usize = 500;

/// Fixture queries for the oracle and trace comparisons.
fn fixture_queries() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("example2", vec!["(a : B) >= 0.1", "(a : A) >= 0.3", "(a : A or B) <= 0.6"]),
        ("example3", vec!["(a : B) <= 0.7", "(a : B) <= 0.3"]),
        ("example4", vec!["(i1 : some About . Car) >= 0.6", "(i1 : some About . Car) >= 0.7"]),
        ("example5", vec!["(v1 : Video and some About . SportKind) >= 0.9", "(v2 : Video and some About . SportKind) >= 0.7"]),
        ("example6", vec!["(a : some R . (D and C)) >= 0.4", "(a : some R . (D and C)) >= 0.5"]),
        ("example1", vec!["(v2 : Video and some About . some KindOfSport . IndividualSport) >= 1"]),
    ]
}

/// Compares the reasoner with the grid oracle on `kb ⊨ query`. The domain
/// bound is the default, raised to the size of the tableau's canonical
/// countermodel when the reasoner refutes the query.
fn oracle_agrees(kb: &KnowledgeBase, query: &FuzzyConstraint) -> Result<bool, String> {
    let r = reasoner(kb)?;
    let expected = ok(r.entails(query))?;
    let assertional = KnowledgeBase::assertional(r.abox().to_vec());
    let expanded = FuzzyConstraint::new(ok(r.expand_assertion(&query.assertion))?, query.rel, query.degree.clone());
    let mut bound = default_domain_bound(&assertional, &expanded);
    if !expected {
        if let SatResult::Satisfiable(completion) = ok(r.search(Some(query), false))?.result {
            bound = bound.max(completion.objects().len());
        }
    }
    let verdict = ok(grid_oracle_entails(&assertional, &expanded, Some(bound)))?;
    ensure!(
        verdict.entailed == expected,
        "{query}: reasoner says {expected}, grid oracle says {} (bound {bound})",
        verdict.entailed
    );
    Ok(expected)
}

fn oracle_equivalence() -> Outcome {
    let mut fixture_checks = 0;
    for (name, queries) in fixture_queries() {
        let kb = fixture(name);
        for query in queries {
            oracle_agrees(&kb, &q(query)).map_err(|e| format!("{name}: {e}"))?;
            fixture_checks += 1;
        }
    }
    let mut sampler = Sampler::new(8);
    let kb_s = assertional_kb(true);
    let query_s = (random_query_assertion(), bound(), degree())
        .prop_map(|(a, rel, n)| FuzzyConstraint::new(a, rel, n));
    let mut entailed = 0;
    for case in 0..ORACLE_CASES {
        let kb = sampler.sample(&kb_s);
        let query = sampler.sample(&query_s);
        if oracle_agrees(&kb, &query).map_err(|e| format!("random case {case}: {e}"))? {
            entailed += 1;
        }
    }
    Ok(format!("{fixture_checks} fixture queries, {ORACLE_CASES} random KBs ({entailed} entailed)"))
}

// ── Criterion 9: trace mode ────────────────────────────────────────────────

fn trace_agreement() -> Outcome {
    let mut checks = 0;
    for (name, queries) in fixture_queries() {
        let kb = fixture(name);
        let (full, trace) = (reasoner(&kb)?, trace_reasoner(&kb)?);
        ensure!(ok(full.is_satisfiable())? == ok(trace.is_satisfiable())?, "{name}: satisfiability differs");
        for query in queries {
            let query = q(query);
            ensure!(ok(full.entails(&query))? == ok(trace.entails(&query))?, "{name}: {query} differs");
            checks += 2;
        }
    }
    let mut sampler = Sampler::new(9);
    let kb_s = assertional_kb(true);
    let query_s = (random_query_assertion(), bound(), degree())
        .prop_map(|(a, rel, n)| FuzzyConstraint::new(a, rel, n));
    for case in 0..ORACLE_CASES {
        let kb = sampler.sample(&kb_s);
        let query = sampler.sample(&query_s);
        let (full, trace) = (reasoner(&kb)?, trace_reasoner(&kb)?);
        ensure!(ok(full.is_satisfiable())? == ok(trace.is_satisfiable())?, "random case {case}: satisfiability differs");
        ensure!(ok(full.entails(&query))? == ok(trace.entails(&query))?, "random case {case}: {query} differs");
        checks += 2;
    }

    // Nested chains: full completions at small depth, trace mode up to 10.
    let chain_set = |depth: usize| -> ConstraintSet {
        [FuzzyConstraint::at_least(Assertion::concept("a", nested_chain(depth)), d("0.8"))].into_iter().collect()
    };
    for depth in 1..=4 {
        let full = ok(complete_with(&chain_set(depth), &SearchOptions::default()))?;
        let trace = ok(complete_trace_with(&chain_set(depth), &SearchOptions::default()))?;
        ensure!(full.result.is_satisfiable() == trace.result.is_satisfiable(), "chain {depth}: verdicts differ");
        if let SatResult::Satisfiable(done) = &full.result {
            ensure!(done.variable_count() >= (1 << depth), "chain {depth}: {} variables", done.variable_count());
        }
    }
    let mut peaks = Vec::new();
    let mut deepest = Duration::ZERO;
    let mut traces = 0;
    for depth in 1..=10 {
        let start = Instant::now();
        let outcome = ok(complete_trace_with(&chain_set(depth), &SearchOptions::default()))?;
        let elapsed = start.elapsed();
        ensure!(outcome.result.is_satisfiable(), "chain {depth}: trace mode says unsatisfiable");
        peaks.push((nested_chain(depth).size(), outcome.stats.peak_live_constraints));
        deepest = elapsed;
        traces = outcome.stats.traces;
    }
    ensure!(deepest < Duration::from_secs(10), "depth 10 took {deepest:?}");
    // Linear growth: every extra level adds the same number of live constraints.
    let steps: Vec<isize> = peaks.windows(2).map(|w| w[1].1 as isize - w[0].1 as isize).collect();
    ensure!(steps.windows(2).all(|w| w[0] == w[1]), "peak live constraints {peaks:?} are not linear in depth");
    let (size, peak) = peaks[9];
    ensure!(peak <= 2 * size, "depth 10 peak {peak} exceeds twice the input size {size}");
    Ok(format!(
        "{checks} fixture and random checks; depth 10 in {:.2?} over {traces} traces, peak live constraints {peak} for input size {size}",
        deepest
    ))
}

// ── Criterion 10: crisp soundness ──────────────────────────────────────────

/// A lower-bound query: a random concept assertion, or a weakening
/// `C ⊔ E` at a degree no higher than an asserted `⟨a:C ≥ m⟩`.
fn lower_query(kb: &KnowledgeBase, sampler: &mut Sampler) -> FuzzyConstraint {
    let (choice, extra, n, alpha) = sampler.sample(&(0usize..4, concept(), degree(), random_query_assertion()));
    let lowers: Vec<&FuzzyConstraint> = kb.abox.iter().filter(|c| c.rel == Relation::AtLeast).collect();
    if choice < 2 && !lowers.is_empty() {
        let base = lowers[choice % lowers.len()];
        if let Assertion::Concept { object, concept } = &base.assertion {
            let weakened = Assertion::Concept { object: object.clone(), concept: concept.clone().or(extra) };
            return FuzzyConstraint::at_least(weakened, base.degree.clone().min(n));
        }
    }
    FuzzyConstraint::at_least(alpha, n)
}

fn crisp_soundness() -> Outcome {
    let mut sampler = Sampler::new(10);
    let kb_s = assertional_kb(false);
    let (mut satisfiable, mut entailed) = (0, 0);
    while satisfiable < ORACLE_CASES {
        let kb = sampler.sample(&kb_s);
        let r = reasoner(&kb)?;
        if !ok(r.is_satisfiable())? {
            continue;
        }
        satisfiable += 1;
        let query = lower_query(&kb, &mut sampler);
        if ok(r.entails(&query))? {
            entailed += 1;
            let crisp = ok(crisp_entails(&ok(crisp_map_kb(&kb))?, &ok(crisp_map(&query))?))?;
            ensure!(crisp, "Σ = {:?} entails {query} but the crisp image does not", kb.abox.iter().map(ToString::to_string).collect::<Vec<_>>());
        }
    }
    ensure!(entailed > 0, "no entailed query among {satisfiable} cases");

    let ex2 = fixture("example2");
    let crisp = ok(crisp_entails(&ok(crisp_map_kb(&ex2))?, &assertion("(a : B)")))?;
    ensure!(crisp, "♯Σ ⊭ a:B for example2");
    let r = reasoner(&ex2)?;
    for k in 1..=10 {
        let query = FuzzyConstraint::at_least(assertion("(a : B)"), Degree::ratio(k, 10));
        ensure!(!ok(r.entails(&query))?, "example2 entails {query}");
    }
    Ok(format!("{satisfiable} satisfiable KBs, {entailed} entailed queries; example2 refutes the converse"))
}

// ── Runner ─────────────────────────────────────────────────────────────────

fn main() {
    let criteria: [Criterion; 10] = [
        ("example5 glb and ranking", example5_reproduction),
        ("example6 entailment, glb and completions", example6_reproduction),
        ("example4 closed refutation proof", example7_reproduction),
        ("example6 refutation set canonical model", example8_reproduction),
        ("example2 and example3 with crisp images", examples2_and_3),
        ("excluded-middle constants", excluded_middle_constants),
        ("property suite", property_suite),
        ("grid oracle equivalence", oracle_equivalence),
        ("trace mode agreement", trace_agreement),
        ("crisp soundness", crisp_soundness),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, criterion)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|payload| {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {message}"))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {id}: {title} [{elapsed:.2?}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id}: {title} [{elapsed:.2?}] {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
