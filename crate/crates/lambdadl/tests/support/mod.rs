//! Shared generators for the property and acceptance suites: random
//! small knowledge bases, well-typed closed terms, and a rule-overlap
//! audit for the reduction relation.

#![allow(dead_code)]

use rand::prelude::*;
use rand::rngs::StdRng;

use lambdadl::eval::{step, step_with_rule, EvalOutcome};
use lambdadl::kb::{Axiom, ConceptExpr, KnowledgeBase, PrimValue, RoleExpr};
use lambdadl::syntax::{CaseArm, Term, TermKind, Type, Value};
use lambdadl::typecheck::{is_subtype, typecheck, TypingContext};
use lambdadl::{Budget, KnowledgeSystem, TableauReasoner};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random concept over the given name pools.
pub fn random_concept(
    rng: &mut StdRng,
    concepts: &[String],
    roles: &[String],
    objects: &[String],
    depth: usize,
) -> ConceptExpr {
    let leaf = depth == 0 || rng.random_bool(0.4);
    if leaf {
        match rng.random_range(0..8) {
            0 => ConceptExpr::Top,
            1 if !objects.is_empty() => {
                ConceptExpr::nominal(objects.choose(rng).unwrap().clone())
            }
            2 => ConceptExpr::Bottom,
            _ => ConceptExpr::atomic(concepts.choose(rng).unwrap().clone()),
        }
    } else {
        let sub = |rng: &mut StdRng| random_concept(rng, concepts, roles, objects, depth - 1);
        let role = |rng: &mut StdRng| {
            let name = roles.choose(rng).unwrap().clone();
            if rng.random_bool(0.25) {
                RoleExpr::inverse_of(name)
            } else {
                RoleExpr::atomic(name)
            }
        };
        match rng.random_range(0..5) {
            0 => ConceptExpr::not(sub(rng)),
            1 => ConceptExpr::and(sub(rng), sub(rng)),
            2 => ConceptExpr::or(sub(rng), sub(rng)),
            3 => ConceptExpr::exists(role(rng), sub(rng)),
            _ => ConceptExpr::forall(role(rng), sub(rng)),
        }
    }
}

/// A random knowledge base within the small-corpus envelope: at most 4
/// concept names, 3 roles, 4 objects, and `max_axioms` axioms.
pub fn random_kb(rng: &mut StdRng, max_axioms: usize) -> KnowledgeBase {
    let concepts: Vec<String> = (0..rng.random_range(2..=4)).map(|i| format!("A{i}")).collect();
    let roles: Vec<String> = (0..rng.random_range(1..=3)).map(|i| format!("r{i}")).collect();
    let objects: Vec<String> = (0..rng.random_range(1..=4)).map(|i| format!("o{i}")).collect();
    let mut axioms = Vec::new();
    for _ in 0..rng.random_range(0..=max_axioms) {
        let axiom = match rng.random_range(0..10) {
            0..=3 => Axiom::Subsumption(
                random_concept(rng, &concepts, &roles, &objects, 2),
                random_concept(rng, &concepts, &roles, &objects, 2),
            ),
            4..=6 => Axiom::ConceptAssertion {
                object: objects.choose(rng).unwrap().clone(),
                concept: random_concept(rng, &concepts, &roles, &objects, 2),
            },
            7..=8 => Axiom::RoleAssertion {
                subject: objects.choose(rng).unwrap().clone(),
                object: objects.choose(rng).unwrap().clone(),
                role: RoleExpr::atomic(roles.choose(rng).unwrap().clone()),
            },
            _ => Axiom::ObjectEquivalence(
                objects.choose(rng).unwrap().clone(),
                objects.choose(rng).unwrap().clone(),
            ),
        };
        axioms.push(axiom);
    }
    // Anchor every declared name so the signature is stable regardless of
    // which axioms the loop above produced.
    for concept in &concepts {
        axioms.push(Axiom::Subsumption(
            ConceptExpr::atomic(concept.clone()),
            ConceptExpr::Top,
        ));
    }
    for role in &roles {
        axioms.push(Axiom::Subsumption(
            ConceptExpr::exists(RoleExpr::atomic(role.clone()), ConceptExpr::Top),
            ConceptExpr::Top,
        ));
    }
    if let Some(first) = objects.first() {
        axioms.push(Axiom::ConceptAssertion {
            object: first.clone(),
            concept: ConceptExpr::Top,
        });
        for object in &objects[1..] {
            axioms.push(Axiom::ConceptAssertion {
                object: object.clone(),
                concept: ConceptExpr::Top,
            });
        }
    }
    KnowledgeBase::from_axioms(axioms).expect("generated KB is well-formed")
}

/// A random *consistent* knowledge base.
pub fn random_consistent_kb(rng: &mut StdRng, max_axioms: usize) -> TableauReasoner {
    loop {
        let kb = random_kb(rng, max_axioms);
        let ks = TableauReasoner::with_budget(kb, Budget::default());
        if ks.is_satisfiable(&ConceptExpr::Top).unwrap_or(false) {
            return ks;
        }
    }
}

/// Pool-based generator for well-typed closed terms: seeds are literals,
/// objects, queries, and empty lists; growth steps combine pool entries
/// through every construct of the language and keep the candidates the
/// checker accepts.
pub struct TermGen {
    pub rng: StdRng,
    pub pool: Vec<(Term, Type)>,
    concepts: Vec<ConceptExpr>,
    counter: usize,
}

impl TermGen {
    pub fn new(ks: &TableauReasoner, mut rng: StdRng) -> Self {
        let sig = ks.kb().signature();
        let concept_names: Vec<String> = sig.concepts.iter().cloned().collect();
        let role_names: Vec<String> = sig.roles.iter().cloned().collect();
        let object_names: Vec<String> = sig.objects.iter().cloned().collect();

        let mut concepts = Vec::new();
        for name in &concept_names {
            concepts.push(ConceptExpr::atomic(name.clone()));
        }
        for name in &object_names {
            concepts.push(ConceptExpr::nominal(name.clone()));
        }
        concepts.push(ConceptExpr::Top);
        for _ in 0..8 {
            concepts.push(random_concept(
                &mut rng,
                &concept_names,
                &role_names,
                &object_names,
                2,
            ));
        }

        let mut gen = TermGen {
            rng,
            pool: Vec::new(),
            concepts,
            counter: 0,
        };
        gen.seed(ks, &object_names, &role_names);
        gen
    }

    fn seed(&mut self, ks: &TableauReasoner, objects: &[String], roles: &[String]) {
        let mut candidates: Vec<Term> = vec![
            Value::bool(true).term(),
            Value::bool(false).term(),
            Value::string("a").term(),
            Value::string("b").term(),
        ];
        for object in objects {
            candidates.push(Value::Object(object.clone()).term());
            for role in roles {
                candidates.push(Term::synthetic(TermKind::Proj {
                    subject: Box::new(Value::Object(object.clone()).term()),
                    role: RoleExpr::atomic(role.clone()),
                }));
                candidates.push(Term::synthetic(TermKind::Proj {
                    subject: Box::new(Value::Object(object.clone()).term()),
                    role: RoleExpr::inverse_of(role.clone()),
                }));
            }
        }
        for concept in self.concepts.clone() {
            candidates.push(Term::synthetic(TermKind::Query(concept.clone())));
            candidates.push(Value::Nil(Type::Concept(concept)).term());
        }
        candidates.push(Value::Nil(Type::BOOL).term());
        candidates.push(Value::Nil(Type::STRING).term());
        for candidate in candidates {
            self.admit(ks, candidate);
        }
        assert!(!self.pool.is_empty(), "seeding produced no typed terms");
    }

    fn admit(&mut self, ks: &TableauReasoner, candidate: Term) -> bool {
        assert!(candidate.is_closed(), "generated term must be closed");
        match typecheck(ks, &TypingContext::new(), &candidate) {
            Ok(ty) => {
                self.pool.push((candidate, ty));
                true
            }
            Err(_) => false,
        }
    }

    fn pick(&mut self) -> (Term, Type) {
        self.pool.choose(&mut self.rng).unwrap().clone()
    }

    fn pick_list(&mut self) -> Option<(Term, Type)> {
        let lists: Vec<usize> = self
            .pool
            .iter()
            .enumerate()
            .filter(|(_, (_, ty))| matches!(ty, Type::List(_)))
            .map(|(i, _)| i)
            .collect();
        let index = lists.choose(&mut self.rng)?;
        Some(self.pool[*index].clone())
    }

    fn pick_concept_term(&mut self) -> Option<(Term, Type)> {
        let entries: Vec<usize> = self
            .pool
            .iter()
            .enumerate()
            .filter(|(_, (_, ty))| matches!(ty, Type::Concept(_)))
            .map(|(i, _)| i)
            .collect();
        let index = entries.choose(&mut self.rng)?;
        Some(self.pool[*index].clone())
    }

    fn fresh_name(&mut self) -> String {
        self.counter += 1;
        format!("v{}", self.counter)
    }

    /// Try to add one grown term; returns whether the pool grew.
    pub fn grow(&mut self, ks: &TableauReasoner) -> bool {
        let candidate = self.propose(ks);
        match candidate {
            Some(term) => self.admit(ks, term),
            None => false,
        }
    }

    fn propose(&mut self, ks: &TableauReasoner) -> Option<Term> {
        let var = |name: &str| Box::new(Term::synthetic(TermKind::Var(name.to_string())));
        match self.rng.random_range(0..14) {
            // Abstraction with a body template, immediately applied half
            // the time so substitution gets exercised.
            0 | 1 => {
                let param = self.fresh_name();
                let annot = self.random_type();
                let body = match self.rng.random_range(0..3) {
                    0 => Term::synthetic(TermKind::Var(param.clone())),
                    1 => self.pick().0,
                    _ => match &annot {
                        Type::Concept(_) => {
                            let role = self.random_role(ks)?;
                            Term::synthetic(TermKind::Proj {
                                subject: var(&param),
                                role,
                            })
                        }
                        Type::List(_) => Term::synthetic(TermKind::Null(var(&param))),
                        _ => Term::synthetic(TermKind::Var(param.clone())),
                    },
                };
                let closure = Value::Closure {
                    param,
                    annot,
                    body: Box::new(body),
                }
                .term();
                if self.rng.random_bool(0.5) {
                    let arg = self.pick().0;
                    Some(Term::synthetic(TermKind::App {
                        func: Box::new(closure),
                        arg: Box::new(arg),
                    }))
                } else {
                    Some(closure)
                }
            }
            2 => {
                let (func, _) = self.pick();
                let (arg, _) = self.pick();
                Some(Term::synthetic(TermKind::App {
                    func: Box::new(func),
                    arg: Box::new(arg),
                }))
            }
            3 => {
                let cond = if self.rng.random_bool(0.7) {
                    Value::bool(self.rng.random_bool(0.5)).term()
                } else {
                    self.pick().0
                };
                let (then_branch, _) = self.pick();
                let (else_branch, _) = self.pick();
                Some(Term::synthetic(TermKind::If {
                    cond: Box::new(cond),
                    then_branch: Box::new(then_branch),
                    else_branch: Box::new(else_branch),
                }))
            }
            4 => {
                let (head, _) = self.pick();
                let (tail, _) = self.pick_list()?;
                Some(Term::synthetic(TermKind::Cons {
                    head: Box::new(head),
                    tail: Box::new(tail),
                }))
            }
            5 => {
                let (list, _) = self.pick_list()?;
                let make = match self.rng.random_range(0..3) {
                    0 => TermKind::Null,
                    1 => TermKind::Head,
                    _ => TermKind::Tail,
                };
                Some(Term::synthetic(make(Box::new(list))))
            }
            6 => {
                let name = self.fresh_name();
                let (bound, _) = self.pick();
                let body = if self.rng.random_bool(0.5) {
                    Term::synthetic(TermKind::Var(name.clone()))
                } else {
                    self.pick().0
                };
                Some(Term::synthetic(TermKind::Let {
                    name,
                    bound: Box::new(bound),
                    body: Box::new(body),
                }))
            }
            7 => {
                let (scrutinee, _) = self.pick_concept_term()?;
                let mut arms = Vec::new();
                for _ in 0..self.rng.random_range(0..=2) {
                    let concept = self.concepts.choose(&mut self.rng)?.clone();
                    let binder = self.fresh_name();
                    let body = if self.rng.random_bool(0.4) {
                        Term::synthetic(TermKind::Var(binder.clone()))
                    } else {
                        self.pick().0
                    };
                    arms.push(CaseArm {
                        concept,
                        binder,
                        body,
                    });
                }
                let (default, _) = self.pick();
                Some(Term::synthetic(TermKind::Case {
                    scrutinee: Box::new(scrutinee),
                    arms,
                    default: Box::new(default),
                }))
            }
            8 => {
                let (lhs, _) = self.pick();
                let (rhs, _) = self.pick();
                Some(Term::synthetic(TermKind::Eq {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                }))
            }
            9 => {
                let (subject, _) = self.pick_concept_term()?;
                let role = self.random_role(ks)?;
                Some(Term::synthetic(TermKind::Proj {
                    subject: Box::new(subject),
                    role,
                }))
            }
            10 => {
                let concept = self.concepts.choose(&mut self.rng)?.clone();
                Some(Term::synthetic(TermKind::Query(concept)))
            }
            // A terminating structural recursion over a list.
            11 => {
                let (list, ty) = self.pick_list()?;
                let Type::List(element) = ty else { return None };
                let f = self.fresh_name();
                let l = self.fresh_name();
                let annot = Type::func(Type::list((*element).clone()), Type::BOOL);
                let recurse = Term::synthetic(TermKind::App {
                    func: var(&f),
                    arg: Box::new(Term::synthetic(TermKind::Tail(var(&l)))),
                });
                let body = Term::synthetic(TermKind::If {
                    cond: Box::new(Term::synthetic(TermKind::Null(var(&l)))),
                    then_branch: Box::new(Value::bool(true).term()),
                    else_branch: Box::new(recurse),
                });
                let walker = Value::Closure {
                    param: f.clone(),
                    annot: annot.clone(),
                    body: Box::new(
                        Value::Closure {
                            param: l,
                            annot: Type::list((*element).clone()),
                            body: Box::new(body),
                        }
                        .term(),
                    ),
                }
                .term();
                Some(Term::synthetic(TermKind::App {
                    func: Box::new(Term::synthetic(TermKind::Fix(Box::new(walker)))),
                    arg: Box::new(list),
                }))
            }
            // The sanctioned stuck forms.
            12 => {
                let annot = self.random_type();
                let nil = Value::Nil(annot).term();
                let make = if self.rng.random_bool(0.5) {
                    TermKind::Head
                } else {
                    TermKind::Tail
                };
                Some(Term::synthetic(make(Box::new(nil))))
            }
            // A divergent fixed point, exercised rarely; the step cap
            // reins it in.
            _ => {
                if !self.rng.random_bool(0.1) {
                    return None;
                }
                let param = self.fresh_name();
                Some(Term::synthetic(TermKind::Fix(Box::new(
                    Value::Closure {
                        param: param.clone(),
                        annot: Type::BOOL,
                        body: Box::new(Term::synthetic(TermKind::Var(param))),
                    }
                    .term(),
                ))))
            }
        }
    }

    fn random_type(&mut self) -> Type {
        match self.rng.random_range(0..6) {
            0 => Type::BOOL,
            1 => Type::STRING,
            2 => Type::list(Type::Concept(self.concepts.choose(&mut self.rng).unwrap().clone())),
            _ => Type::Concept(self.concepts.choose(&mut self.rng).unwrap().clone()),
        }
    }

    fn random_role(&mut self, ks: &TableauReasoner) -> Option<RoleExpr> {
        let sig = ks.kb().signature();
        let names: Vec<&String> = sig.roles.iter().chain(sig.data_roles.iter()).collect();
        let name = names.choose(&mut self.rng)?;
        if sig.data_roles.contains(*name) || self.rng.random_bool(0.75) {
            Some(RoleExpr::atomic((*name).clone()))
        } else {
            Some(RoleExpr::inverse_of((*name).clone()))
        }
    }
}

/// All reduction rules whose pattern matches `term`, independent of the
/// evaluator's own dispatch. Premises of congruence rules (`t → t'`) are
/// discharged by checking the subterm actually steps.
pub fn applicable_rules(ks: &TableauReasoner, term: &Term) -> Vec<&'static str> {
    if term.is_value() {
        return Vec::new();
    }
    let steps = |t: &Term| matches!(step(ks, t), Ok(EvalOutcome::Stepped(_)));
    let mut rules = Vec::new();
    match &term.kind {
        TermKind::Let { bound, .. } => {
            if bound.is_value() {
                rules.push("E-LETV");
            } else if steps(bound) {
                rules.push("E-LET");
            }
        }
        TermKind::Fix(inner) => {
            if matches!(inner.as_value(), Some(Value::Closure { .. })) {
                rules.push("E-FIXV");
            } else if !inner.is_value() && steps(inner) {
                rules.push("E-FIX");
            }
        }
        TermKind::App { func, arg } => {
            if !func.is_value() && steps(func) {
                rules.push("E-APP1");
            }
            if func.is_value() && !arg.is_value() && steps(arg) {
                rules.push("E-APP2");
            }
            if matches!(func.as_value(), Some(Value::Closure { .. })) && arg.is_value() {
                rules.push("E-APPABS");
            }
        }
        TermKind::If { cond, .. } => match cond.as_value() {
            Some(Value::Prim(PrimValue::Bool(true))) => rules.push("E-IF-TRUE"),
            Some(Value::Prim(PrimValue::Bool(false))) => rules.push("E-IF-FALSE"),
            Some(_) => {}
            None => {
                if steps(cond) {
                    rules.push("E-IF");
                }
            }
        },
        TermKind::Cons { head, tail } => {
            if !head.is_value() && steps(head) {
                rules.push("E-CONS1");
            }
            if head.is_value() && !tail.is_value() && steps(tail) {
                rules.push("E-CONS2");
            }
        }
        TermKind::Null(inner) => match inner.as_value() {
            Some(Value::Nil(_)) => rules.push("E-NULL-TRUE"),
            Some(Value::Cons(..)) => rules.push("E-NULL-FALSE"),
            Some(_) => {}
            None => {
                if steps(inner) {
                    rules.push("E-NULL");
                }
            }
        },
        TermKind::Head(inner) => match inner.as_value() {
            Some(Value::Cons(..)) => rules.push("E-HEADV"),
            Some(_) => {}
            None => {
                if steps(inner) {
                    rules.push("E-HEAD");
                }
            }
        },
        TermKind::Tail(inner) => match inner.as_value() {
            Some(Value::Cons(..)) => rules.push("E-TAILV"),
            Some(_) => {}
            None => {
                if steps(inner) {
                    rules.push("E-TAIL");
                }
            }
        },
        TermKind::Query(_) => rules.push("E-QUERY"),
        TermKind::Proj { subject, .. } => match subject.as_value() {
            Some(Value::Object(_)) => rules.push("E-PROJV"),
            Some(_) => {}
            None => {
                if steps(subject) {
                    rules.push("E-PROJ");
                }
            }
        },
        TermKind::Case {
            scrutinee, arms, ..
        } => match scrutinee.as_value() {
            Some(Value::Object(object)) => match arms.first() {
                None => rules.push("E-DISPATCH-DEF"),
                Some(first) => {
                    if ks.is_instance(&object, &first.concept).unwrap() {
                        rules.push("E-DISPATCH-SUCC");
                    } else {
                        rules.push("E-DISPATCH-FAIL");
                    }
                }
            },
            Some(_) => {}
            None => {
                if steps(scrutinee) {
                    rules.push("E-DISPATCH");
                }
            }
        },
        TermKind::Eq { lhs, rhs } => {
            if !lhs.is_value() && steps(lhs) {
                rules.push("E-EQ1");
            }
            if lhs.is_value() && !rhs.is_value() && steps(rhs) {
                rules.push("E-EQ2");
            }
            if let (Some(l), Some(r)) = (lhs.as_value(), rhs.as_value()) {
                match (l, r) {
                    (Value::Object(a), Value::Object(b)) => {
                        if ks.are_equivalent_objects(&a, &b).unwrap() {
                            rules.push("EQ-NOMINAL-TRUE");
                        } else {
                            rules.push("EQ-NOMINAL-FALSE");
                        }
                    }
                    (Value::Prim(a), Value::Prim(b)) => {
                        if a == b {
                            rules.push("EQ-PRIM-TRUE");
                        } else {
                            rules.push("EQ-PRIM-FALSE");
                        }
                    }
                    _ => {}
                }
            }
        }
        TermKind::Var(_) | TermKind::Value(_) => {}
    }
    rules
}

/// The canonical-form check: a value's shape is forced by its type.
pub fn canonical_form_holds(value: &Value, ty: &Type) -> bool {
    match ty {
        Type::Concept(_) => matches!(value, Value::Object(_)),
        Type::Func(..) => matches!(value, Value::Closure { .. }),
        Type::List(_) => matches!(value, Value::Nil(_) | Value::Cons(..)),
        Type::Prim(lambdadl::PrimType::Bool) => {
            matches!(value, Value::Prim(PrimValue::Bool(_)))
        }
        Type::Prim(lambdadl::PrimType::Str) => {
            matches!(value, Value::Prim(PrimValue::Str(_)))
        }
    }
}

/// Walk an evaluation trace checking progress, preservation, and the
/// canonical-forms property; returns the number of steps taken.
pub fn check_soundness_trace(
    ks: &TableauReasoner,
    term: &Term,
    initial_ty: &Type,
    step_cap: usize,
) -> usize {
    let mut current = term.clone();
    let mut current_ty = initial_ty.clone();
    for steps_taken in 0..step_cap {
        match step(ks, &current).expect("reasoner budget exhausted during trace") {
            EvalOutcome::Done(value) => {
                assert!(
                    canonical_form_holds(&value, &current_ty),
                    "canonical form violated: `{value}` : `{current_ty}`"
                );
                return steps_taken;
            }
            EvalOutcome::StuckHeadNil | EvalOutcome::StuckTailNil => return steps_taken,
            EvalOutcome::Stepped(next) => {
                let next_ty = typecheck(ks, &TypingContext::new(), &next).unwrap_or_else(|e| {
                    panic!("preservation: successor ill-typed: {e}\n  term: {next}")
                });
                assert!(
                    is_subtype(ks, &next_ty, &current_ty).expect("subtype check"),
                    "preservation violated: `{next_ty}` not a subtype of `{current_ty}`\n  term: {next}"
                );
                current = next;
                current_ty = next_ty;
            }
        }
    }
    step_cap
}

/// Audit one term: the rule set the patterns admit has at most one
/// element, and the rule the evaluator fires is exactly that element.
pub fn audit_determinism(ks: &TableauReasoner, term: &Term) {
    let rules = applicable_rules(ks, term);
    assert!(
        rules.len() <= 1,
        "multiple rules apply to `{term}`: {rules:?}"
    );
    let (outcome, fired) = step_with_rule(ks, term).expect("step");
    match outcome {
        EvalOutcome::Done(_) => assert!(rules.is_empty(), "value with applicable rules {rules:?}"),
        EvalOutcome::Stepped(_) => {
            assert_eq!(
                rules,
                vec![fired],
                "fired rule disagrees with the pattern audit for `{term}`"
            );
        }
        EvalOutcome::StuckHeadNil | EvalOutcome::StuckTailNil => {
            assert!(rules.is_empty(), "stuck term with applicable rules {rules:?}");
        }
    }
}
