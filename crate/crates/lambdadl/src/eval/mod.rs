//! Small-step, call-by-value reduction of closed terms against a
//! knowledge base.
//!
//! Exactly one rule applies to any non-value term (leftmost-innermost
//! order), so `step` is a function. Queries and projections materialize
//! their answer sets as list values in the reasoner's deterministic
//! order, annotating the trailing nil with the statically known element
//! type. `head nil` and `tail nil` are the only sanctioned stuck forms;
//! any other dead end indicates an ill-typed input and panics.

use crate::kb::{ConceptExpr, PrimType, RoleExpr};
use crate::reasoner::{KnowledgeSystem, ReasonerError};
use crate::syntax::{substitute, substitute_term, CaseArm, Term, TermKind, Type, Value};

/// Result of one reduction step.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalOutcome {
    Stepped(Term),
    Done(Value),
    StuckHeadNil,
    StuckTailNil,
}

/// Evaluation limits and tracing.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub step_limit: usize,
    pub trace: bool,
}

pub const DEFAULT_STEP_LIMIT: usize = 1_000_000;

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            step_limit: DEFAULT_STEP_LIMIT,
            trace: false,
        }
    }
}

/// Which sanctioned stuck form was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StuckKind {
    HeadNil,
    TailNil,
}

/// Final outcome of running a term to completion.
#[derive(Debug, Clone, PartialEq)]
pub enum RunResult {
    Value(Value),
    Stuck { kind: StuckKind, term: Term },
    StepLimitExceeded { last: Term },
}

/// Perform one reduction step on a closed term.
pub fn step(ks: &dyn KnowledgeSystem, term: &Term) -> Result<EvalOutcome, ReasonerError> {
    step_with_rule(ks, term).map(|(outcome, _)| outcome)
}

enum Sub {
    Stepped(Term),
    Stuck(EvalOutcome, &'static str),
}

fn sub_step(ks: &dyn KnowledgeSystem, inner: &Term) -> Result<Sub, ReasonerError> {
    match step_with_rule(ks, inner)? {
        (EvalOutcome::Stepped(next), _) => Ok(Sub::Stepped(next)),
        (EvalOutcome::Done(_), _) => unreachable!("congruence step on a value"),
        (stuck, rule) => Ok(Sub::Stuck(stuck, rule)),
    }
}

macro_rules! congruence {
    ($ks:expr, $inner:expr, $rule:literal, $rebuild:expr) => {
        match sub_step($ks, $inner)? {
            Sub::Stepped(next) => {
                #[allow(clippy::redundant_closure_call)]
                return Ok((EvalOutcome::Stepped(($rebuild)(next)), $rule));
            }
            Sub::Stuck(outcome, rule) => return Ok((outcome, rule)),
        }
    };
}

/// One reduction step together with the name of the rule that fired;
/// values report `"value"` and the stuck forms report themselves.
pub fn step_with_rule(
    ks: &dyn KnowledgeSystem,
    term: &Term,
) -> Result<(EvalOutcome, &'static str), ReasonerError> {
    if let Some(value) = term.as_value() {
        return Ok((EvalOutcome::Done(value), "value"));
    }
    match &term.kind {
        TermKind::Let { name, bound, body } => {
            if let Some(value) = bound.as_value() {
                Ok((
                    EvalOutcome::Stepped(substitute(body, name, &value)),
                    "E-LETV",
                ))
            } else {
                let name = name.clone();
                let body = body.clone();
                congruence!(ks, bound, "E-LET", |next| Term::synthetic(TermKind::Let {
                    name,
                    bound: Box::new(next),
                    body,
                }))
            }
        }
        TermKind::Fix(inner) => match inner.as_value() {
            Some(Value::Closure { param, body, .. }) => Ok((
                EvalOutcome::Stepped(substitute_term(&body, &param, term)),
                "E-FIXV",
            )),
            Some(other) => panic!("fix applied to a non-function value: {other}"),
            None => {
                congruence!(ks, inner, "E-FIX", |next| Term::synthetic(TermKind::Fix(
                    Box::new(next)
                )))
            }
        },
        TermKind::App { func, arg } => {
            if !func.is_value() {
                let arg = arg.clone();
                congruence!(ks, func, "E-APP1", |next| Term::synthetic(TermKind::App {
                    func: Box::new(next),
                    arg,
                }))
            }
            if !arg.is_value() {
                let func = func.clone();
                congruence!(ks, arg, "E-APP2", |next| Term::synthetic(TermKind::App {
                    func,
                    arg: Box::new(next),
                }))
            }
            match func.as_value() {
                Some(Value::Closure { param, body, .. }) => {
                    let argument = arg.as_value().expect("argument is a value");
                    Ok((
                        EvalOutcome::Stepped(substitute(&body, &param, &argument)),
                        "E-APPABS",
                    ))
                }
                other => panic!("applying a non-function value: {other:?}"),
            }
        }
        TermKind::If {
            cond,
            then_branch,
            else_branch,
        } => match cond.as_value() {
            Some(Value::Prim(crate::kb::PrimValue::Bool(true))) => {
                Ok((EvalOutcome::Stepped((**then_branch).clone()), "E-IF-TRUE"))
            }
            Some(Value::Prim(crate::kb::PrimValue::Bool(false))) => {
                Ok((EvalOutcome::Stepped((**else_branch).clone()), "E-IF-FALSE"))
            }
            Some(other) => panic!("if condition is not a boolean: {other}"),
            None => {
                let then_branch = then_branch.clone();
                let else_branch = else_branch.clone();
                congruence!(ks, cond, "E-IF", |next| Term::synthetic(TermKind::If {
                    cond: Box::new(next),
                    then_branch,
                    else_branch,
                }))
            }
        },
        TermKind::Cons { head, tail } => {
            if !head.is_value() {
                let tail = tail.clone();
                congruence!(ks, head, "E-CONS1", |next| Term::synthetic(
                    TermKind::Cons {
                        head: Box::new(next),
                        tail,
                    }
                ))
            }
            let head = head.clone();
            congruence!(ks, tail, "E-CONS2", |next| Term::synthetic(TermKind::Cons {
                head,
                tail: Box::new(next),
            }))
        }
        TermKind::Null(inner) => match inner.as_value() {
            Some(Value::Nil(_)) => Ok((
                EvalOutcome::Stepped(Value::bool(true).term()),
                "E-NULL-TRUE",
            )),
            Some(Value::Cons(..)) => Ok((
                EvalOutcome::Stepped(Value::bool(false).term()),
                "E-NULL-FALSE",
            )),
            Some(other) => panic!("null applied to a non-list value: {other}"),
            None => {
                congruence!(ks, inner, "E-NULL", |next| Term::synthetic(TermKind::Null(
                    Box::new(next)
                )))
            }
        },
        TermKind::Head(inner) => match inner.as_value() {
            Some(Value::Cons(head, _)) => {
                Ok((EvalOutcome::Stepped(head.as_ref().clone().term()), "E-HEADV"))
            }
            Some(Value::Nil(_)) => Ok((EvalOutcome::StuckHeadNil, "head nil")),
            Some(other) => panic!("head applied to a non-list value: {other}"),
            None => {
                congruence!(ks, inner, "E-HEAD", |next| Term::synthetic(TermKind::Head(
                    Box::new(next)
                )))
            }
        },
        TermKind::Tail(inner) => match inner.as_value() {
            Some(Value::Cons(_, tail)) => {
                Ok((EvalOutcome::Stepped(tail.as_ref().clone().term()), "E-TAILV"))
            }
            Some(Value::Nil(_)) => Ok((EvalOutcome::StuckTailNil, "tail nil")),
            Some(other) => panic!("tail applied to a non-list value: {other}"),
            None => {
                congruence!(ks, inner, "E-TAIL", |next| Term::synthetic(TermKind::Tail(
                    Box::new(next)
                )))
            }
        },
        TermKind::Query(concept) => {
            let value = materialize_query(ks, concept, Type::Concept(concept.clone()))?;
            Ok((EvalOutcome::Stepped(value.term()), "E-QUERY"))
        }
        TermKind::Proj { subject, role } => match subject.as_value() {
            Some(Value::Object(object)) => {
                let element_type = projection_element_type(ks, &object, role);
                let value = materialize_projection(ks, &object, role, element_type)?;
                Ok((EvalOutcome::Stepped(value.term()), "E-PROJV"))
            }
            Some(other) => panic!("projection on a non-object value: {other}"),
            None => {
                let role = role.clone();
                congruence!(ks, subject, "E-PROJ", |next| Term::synthetic(
                    TermKind::Proj {
                        subject: Box::new(next),
                        role,
                    }
                ))
            }
        },
        TermKind::Case {
            scrutinee,
            arms,
            default,
        } => match scrutinee.as_value() {
            Some(Value::Object(object)) => {
                let Some((first, rest)) = arms.split_first() else {
                    return Ok((
                        EvalOutcome::Stepped((**default).clone()),
                        "E-DISPATCH-DEF",
                    ));
                };
                if ks.is_instance(&object, &first.concept)? {
                    let bound = substitute(&first.body, &first.binder, &Value::Object(object));
                    Ok((EvalOutcome::Stepped(bound), "E-DISPATCH-SUCC"))
                } else {
                    Ok((
                        EvalOutcome::Stepped(Term::synthetic(TermKind::Case {
                            scrutinee: scrutinee.clone(),
                            arms: rest.to_vec(),
                            default: default.clone(),
                        })),
                        "E-DISPATCH-FAIL",
                    ))
                }
            }
            Some(other) => panic!("typecase on a non-object value: {other}"),
            None => {
                let arms: Vec<CaseArm> = arms.clone();
                let default = default.clone();
                congruence!(ks, scrutinee, "E-DISPATCH", |next| Term::synthetic(
                    TermKind::Case {
                        scrutinee: Box::new(next),
                        arms,
                        default,
                    }
                ))
            }
        },
        TermKind::Eq { lhs, rhs } => {
            if !lhs.is_value() {
                let rhs = rhs.clone();
                congruence!(ks, lhs, "E-EQ1", |next| Term::synthetic(TermKind::Eq {
                    lhs: Box::new(next),
                    rhs,
                }))
            }
            if !rhs.is_value() {
                let lhs = lhs.clone();
                congruence!(ks, rhs, "E-EQ2", |next| Term::synthetic(TermKind::Eq {
                    lhs,
                    rhs: Box::new(next),
                }))
            }
            match (lhs.as_value().unwrap(), rhs.as_value().unwrap()) {
                (Value::Object(a), Value::Object(b)) => {
                    if ks.are_equivalent_objects(&a, &b)? {
                        Ok((
                            EvalOutcome::Stepped(Value::bool(true).term()),
                            "EQ-NOMINAL-TRUE",
                        ))
                    } else {
                        Ok((
                            EvalOutcome::Stepped(Value::bool(false).term()),
                            "EQ-NOMINAL-FALSE",
                        ))
                    }
                }
                (Value::Prim(a), Value::Prim(b)) => {
                    if a == b {
                        Ok((
                            EvalOutcome::Stepped(Value::bool(true).term()),
                            "EQ-PRIM-TRUE",
                        ))
                    } else {
                        Ok((
                            EvalOutcome::Stepped(Value::bool(false).term()),
                            "EQ-PRIM-FALSE",
                        ))
                    }
                }
                (a, b) => panic!("equivalence between unsupported values: {a} = {b}"),
            }
        }
        TermKind::Var(name) => panic!("evaluation of open term: free variable `{name}`"),
        TermKind::Value(_) => unreachable!("handled by as_value"),
    }
}

/// The statically known element type of `a.R`: the primitive range for a
/// data role, otherwise `exists R^-.{a}` (the subject has reduced to the
/// object `a`, whose minimal type is the nominal `{a}`).
fn projection_element_type(ks: &dyn KnowledgeSystem, object: &str, role: &RoleExpr) -> Type {
    if !role.inverted && ks.kb().signature().data_roles.contains(&role.name) {
        Type::Prim(ks.kb().data_range(&role.name).unwrap_or(PrimType::Str))
    } else {
        Type::Concept(ConceptExpr::exists(
            role.inverse(),
            ConceptExpr::nominal(object),
        ))
    }
}

/// σ for queries: the DL-safe answer set as a list value, in the
/// reasoner's deterministic order; an empty answer is `nil[element_type]`.
pub fn materialize_query(
    ks: &dyn KnowledgeSystem,
    concept: &ConceptExpr,
    element_type: Type,
) -> Result<Value, ReasonerError> {
    let objects = ks.query_instances(concept)?;
    Ok(Value::list_of(
        objects.into_iter().map(Value::Object).collect(),
        element_type,
    ))
}

/// σ for projections: entailed role successors for object roles,
/// asserted literals for data roles.
pub fn materialize_projection(
    ks: &dyn KnowledgeSystem,
    object: &str,
    role: &RoleExpr,
    element_type: Type,
) -> Result<Value, ReasonerError> {
    if !role.inverted && ks.kb().signature().data_roles.contains(&role.name) {
        let values = ks.query_data_successors(object, &role.name)?;
        Ok(Value::list_of(
            values.into_iter().map(Value::Prim).collect(),
            element_type,
        ))
    } else {
        let successors = ks.query_role_successors(object, role)?;
        Ok(Value::list_of(
            successors.into_iter().map(Value::Object).collect(),
            element_type,
        ))
    }
}

/// Iterate [`step`] to a value, a sanctioned stuck form, or the step
/// limit.
pub fn evaluate(
    ks: &dyn KnowledgeSystem,
    term: &Term,
    cfg: &EvalConfig,
) -> Result<RunResult, ReasonerError> {
    evaluate_with(ks, term, cfg, |_, _| {})
}

/// Like [`evaluate`]; when tracing is enabled the observer sees every
/// intermediate term with its step index (the initial term is index 0).
pub fn evaluate_with(
    ks: &dyn KnowledgeSystem,
    term: &Term,
    cfg: &EvalConfig,
    mut observer: impl FnMut(usize, &Term),
) -> Result<RunResult, ReasonerError> {
    debug_assert!(cfg.step_limit > 0);
    if cfg.trace {
        observer(0, term);
    }
    let mut current = term.clone();
    let mut steps = 0usize;
    loop {
        match step(ks, &current)? {
            EvalOutcome::Done(value) => return Ok(RunResult::Value(value)),
            EvalOutcome::StuckHeadNil => {
                return Ok(RunResult::Stuck {
                    kind: StuckKind::HeadNil,
                    term: current,
                })
            }
            EvalOutcome::StuckTailNil => {
                return Ok(RunResult::Stuck {
                    kind: StuckKind::TailNil,
                    term: current,
                })
            }
            EvalOutcome::Stepped(next) => {
                steps += 1;
                if cfg.trace {
                    observer(steps, &next);
                }
                current = next;
                if steps >= cfg.step_limit {
                    if let Some(value) = current.as_value() {
                        return Ok(RunResult::Value(value));
                    }
                    return Ok(RunResult::StepLimitExceeded { last: current });
                }
            }
        }
    }
}
