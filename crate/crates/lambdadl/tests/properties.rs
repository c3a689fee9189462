//! Cross-module properties: the NNF/serialization invariants checked
//! against the finite-model evaluator, the reduction identities between
//! the entailment operations, monotonicity, and cache transparency.

mod support;

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::prelude::*;

use lambdadl::kb::{Axiom, ConceptExpr, KnowledgeBase, RoleExpr};
use lambdadl::reasoner::FiniteInterpretation;
use lambdadl::{Budget, KnowledgeSystem, TableauReasoner};

use support::{random_concept, random_kb, rng};

fn random_interpretation(
    rng: &mut StdRng,
    concepts: &[String],
    roles: &[String],
    objects: &[String],
) -> FiniteInterpretation {
    let universe = rng.random_range(1..=4);
    let mut concept_map = BTreeMap::new();
    for name in concepts {
        let members: BTreeSet<usize> = (0..universe).filter(|_| rng.random_bool(0.5)).collect();
        concept_map.insert(name.clone(), members);
    }
    let mut role_map = BTreeMap::new();
    for name in roles {
        let mut pairs = BTreeSet::new();
        for a in 0..universe {
            for b in 0..universe {
                if rng.random_bool(0.3) {
                    pairs.insert((a, b));
                }
            }
        }
        role_map.insert(name.clone(), pairs);
    }
    let object_map = objects
        .iter()
        .map(|o| (o.clone(), rng.random_range(0..universe)))
        .collect();
    FiniteInterpretation {
        universe,
        concept_map,
        role_map,
        object_map,
    }
}

/// NNF preserves the extension in every interpretation, and is
/// idempotent.
#[test]
fn nnf_is_semantics_preserving() {
    let mut rng = rng(11);
    let concepts: Vec<String> = vec!["A".into(), "B".into(), "C".into()];
    let roles: Vec<String> = vec!["r".into(), "s".into()];
    let objects: Vec<String> = vec!["a".into(), "b".into()];
    for _ in 0..2_000 {
        let concept = random_concept(&mut rng, &concepts, &roles, &objects, 3);
        let nnf = concept.nnf();
        assert_eq!(nnf.nnf(), nnf, "nnf not idempotent for {concept}");
        let interpretation = random_interpretation(&mut rng, &concepts, &roles, &objects);
        assert_eq!(
            interpretation.concept_extension(&concept),
            interpretation.concept_extension(&nnf),
            "extension changed for {concept} vs {nnf}"
        );
    }
}

/// Serialization round-trips the KB content: signature and axiom lists.
#[test]
fn kb_serialization_roundtrips() {
    let mut rng = rng(12);
    for _ in 0..300 {
        let kb = random_kb(&mut rng, 6);
        let text = kb.to_string();
        let reparsed = KnowledgeBase::parse(&text)
            .unwrap_or_else(|e| panic!("reparse failed: {e}\n{text}"));
        assert_eq!(kb, reparsed, "roundtrip mismatch for\n{text}");
    }
}

/// Subsumption is satisfiability of the conjunction with the negated
/// right side, computed through the public operations.
#[test]
fn subsumption_reduces_to_satisfiability() {
    let mut rng = rng(13);
    for _ in 0..60 {
        let ks = support::random_consistent_kb(&mut rng, 6);
        let sig = ks.kb().signature();
        let concepts: Vec<String> = sig.concepts.iter().cloned().collect();
        let roles: Vec<String> = sig.roles.iter().cloned().collect();
        let objects: Vec<String> = sig.objects.iter().cloned().collect();
        for _ in 0..10 {
            let c = random_concept(&mut rng, &concepts, &roles, &objects, 2);
            let d = random_concept(&mut rng, &concepts, &roles, &objects, 2);
            let direct = ks.is_subsumed(&c, &d).unwrap();
            let via_sat = !ks
                .is_satisfiable(&ConceptExpr::and(c.clone(), ConceptExpr::not(d.clone())))
                .unwrap();
            assert_eq!(direct, via_sat, "c = {c}, d = {d}");
        }
    }
}

/// Instance checking coincides with nominal subsumption.
#[test]
fn instance_checking_is_nominal_subsumption() {
    let mut rng = rng(14);
    for _ in 0..60 {
        let ks = support::random_consistent_kb(&mut rng, 6);
        let sig = ks.kb().signature();
        let concepts: Vec<String> = sig.concepts.iter().cloned().collect();
        let roles: Vec<String> = sig.roles.iter().cloned().collect();
        let objects: Vec<String> = sig.objects.iter().cloned().collect();
        for _ in 0..8 {
            let object = objects.choose(&mut rng).unwrap();
            let c = random_concept(&mut rng, &concepts, &roles, &objects, 2);
            let via_instance = ks.is_instance(object, &c).unwrap();
            let via_nominal = ks
                .is_subsumed(&ConceptExpr::nominal(object.clone()), &c)
                .unwrap();
            assert_eq!(via_instance, via_nominal, "{object} : {c}");
        }
    }
}

/// Query answers stay within the named objects (DL safety) and grow
/// monotonically under consistent ABox extension.
#[test]
fn queries_are_dl_safe_and_monotone() {
    let mut rng = rng(15);
    let mut extensions_checked = 0;
    for _ in 0..60 {
        let ks = support::random_consistent_kb(&mut rng, 5);
        let sig = ks.kb().signature();
        let concepts: Vec<String> = sig.concepts.iter().cloned().collect();
        let roles: Vec<String> = sig.roles.iter().cloned().collect();
        let objects: Vec<String> = sig.objects.iter().cloned().collect();
        let concept = random_concept(&mut rng, &concepts, &roles, &objects, 2);
        let before = ks.query_instances(&concept).unwrap();
        for answer in &before {
            assert!(sig.objects.contains(answer), "anonymous answer {answer}");
        }

        // Extend the ABox with one random assertion; skip extensions that
        // make the KB inconsistent.
        let mut axioms: Vec<Axiom> = ks.kb().tbox().to_vec();
        axioms.extend(ks.kb().abox().iter().cloned());
        axioms.push(match rng.random_range(0..2) {
            0 => Axiom::ConceptAssertion {
                object: objects.choose(&mut rng).unwrap().clone(),
                concept: random_concept(&mut rng, &concepts, &roles, &objects, 2),
            },
            _ => Axiom::RoleAssertion {
                subject: objects.choose(&mut rng).unwrap().clone(),
                object: objects.choose(&mut rng).unwrap().clone(),
                role: RoleExpr::atomic(roles.choose(&mut rng).unwrap().clone()),
            },
        });
        let extended = KnowledgeBase::from_axioms(axioms).unwrap();
        let extended_ks = TableauReasoner::with_budget(extended, Budget::default());
        if !extended_ks.is_satisfiable(&ConceptExpr::Top).unwrap() {
            continue;
        }
        extensions_checked += 1;
        let after = extended_ks.query_instances(&concept).unwrap();
        for answer in &before {
            assert!(
                after.contains(answer),
                "monotonicity violated: {answer} lost for {concept}"
            );
        }
    }
    assert!(extensions_checked > 20, "too few consistent extensions");
}

/// The memo table is observationally transparent: a warmed reasoner
/// answers exactly like a fresh one.
#[test]
fn entailment_cache_is_transparent() {
    let mut rng = rng(16);
    for _ in 0..30 {
        let kb = random_kb(&mut rng, 6);
        let warm = TableauReasoner::with_budget(kb.clone(), Budget::default());
        let sig = kb.signature();
        let concepts: Vec<String> = sig.concepts.iter().cloned().collect();
        let roles: Vec<String> = sig.roles.iter().cloned().collect();
        let objects: Vec<String> = sig.objects.iter().cloned().collect();
        let questions: Vec<ConceptExpr> = (0..6)
            .map(|_| random_concept(&mut rng, &concepts, &roles, &objects, 2))
            .collect();
        // Ask twice against the warm reasoner and once against a cold one.
        for concept in &questions {
            let first = warm.query_instances(concept).unwrap();
            let second = warm.query_instances(concept).unwrap();
            let cold = TableauReasoner::with_budget(kb.clone(), Budget::default());
            let fresh = cold.query_instances(concept).unwrap();
            assert_eq!(first, second);
            assert_eq!(first, fresh, "cache changed an answer for {concept}");
        }
    }
}

/// Every entailment call over the corpus terminates inside the default
/// budgets (blocking smoke test).
#[test]
fn entailment_terminates_within_budget() {
    let mut rng = rng(17);
    for _ in 0..40 {
        let kb = random_kb(&mut rng, 6);
        let ks = TableauReasoner::with_budget(kb, Budget::default());
        let sig = ks.kb().signature();
        let concepts: Vec<String> = sig.concepts.iter().cloned().collect();
        let roles: Vec<String> = sig.roles.iter().cloned().collect();
        let objects: Vec<String> = sig.objects.iter().cloned().collect();
        for _ in 0..6 {
            let c = random_concept(&mut rng, &concepts, &roles, &objects, 3);
            ks.is_satisfiable(&c)
                .unwrap_or_else(|e| panic!("budget exhausted on {c}: {e}"));
            let d = random_concept(&mut rng, &concepts, &roles, &objects, 3);
            ks.is_subsumed(&c, &d)
                .unwrap_or_else(|e| panic!("budget exhausted on {c} vs {d}: {e}"));
        }
    }
}

/// Pretty-printing round-trips generator-produced terms.
#[test]
fn generated_terms_roundtrip_through_printer() {
    let ks = support::random_consistent_kb(&mut rng(18), 6);
    let mut generator = support::TermGen::new(&ks, rng(19));
    while generator.pool.len() < 1_500 {
        generator.grow(&ks);
    }
    for (term, _) in &generator.pool {
        let printed = term.to_string();
        let reparsed = lambdadl::syntax::parse_term(&printed)
            .unwrap_or_else(|e| panic!("reparse `{printed}`: {e}"));
        assert_eq!(&reparsed, term, "printed as `{printed}`");
    }
}
