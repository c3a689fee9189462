//! Capture-avoiding substitution.

use std::collections::BTreeSet;

use super::{CaseArm, Term, TermKind, Value};

/// `[name ↦ replacement] body` for a value replacement; only free
/// occurrences are replaced and binders shadow as usual.
pub fn substitute(body: &Term, name: &str, replacement: &Value) -> Term {
    substitute_term(body, name, &replacement.clone().term())
}

/// Term-level substitution (the fixed-point rule substitutes the whole
/// `fix` term, which is not a value). Binders that would capture a free
/// variable of `replacement` are renamed first.
pub fn substitute_term(body: &Term, name: &str, replacement: &Term) -> Term {
    let avoid = replacement.free_vars();
    subst(body, name, replacement, &avoid)
}

fn subst(term: &Term, name: &str, repl: &Term, avoid: &BTreeSet<String>) -> Term {
    let kind = match &term.kind {
        TermKind::Var(x) => {
            if x == name {
                return repl.clone();
            }
            TermKind::Var(x.clone())
        }
        TermKind::Let {
            name: binder,
            bound,
            body,
        } => {
            let bound = Box::new(subst(bound, name, repl, avoid));
            if binder == name {
                TermKind::Let {
                    name: binder.clone(),
                    bound,
                    body: body.clone(),
                }
            } else {
                let (binder, body) = rename_if_captured(binder, body, avoid);
                TermKind::Let {
                    name: binder,
                    bound,
                    body: Box::new(subst(&body, name, repl, avoid)),
                }
            }
        }
        TermKind::Fix(inner) => TermKind::Fix(Box::new(subst(inner, name, repl, avoid))),
        TermKind::App { func, arg } => TermKind::App {
            func: Box::new(subst(func, name, repl, avoid)),
            arg: Box::new(subst(arg, name, repl, avoid)),
        },
        TermKind::If {
            cond,
            then_branch,
            else_branch,
        } => TermKind::If {
            cond: Box::new(subst(cond, name, repl, avoid)),
            then_branch: Box::new(subst(then_branch, name, repl, avoid)),
            else_branch: Box::new(subst(else_branch, name, repl, avoid)),
        },
        TermKind::Cons { head, tail } => TermKind::Cons {
            head: Box::new(subst(head, name, repl, avoid)),
            tail: Box::new(subst(tail, name, repl, avoid)),
        },
        TermKind::Null(inner) => TermKind::Null(Box::new(subst(inner, name, repl, avoid))),
        TermKind::Head(inner) => TermKind::Head(Box::new(subst(inner, name, repl, avoid))),
        TermKind::Tail(inner) => TermKind::Tail(Box::new(subst(inner, name, repl, avoid))),
        TermKind::Query(c) => TermKind::Query(c.clone()),
        TermKind::Proj { subject, role } => TermKind::Proj {
            subject: Box::new(subst(subject, name, repl, avoid)),
            role: role.clone(),
        },
        TermKind::Case {
            scrutinee,
            arms,
            default,
        } => TermKind::Case {
            scrutinee: Box::new(subst(scrutinee, name, repl, avoid)),
            arms: arms
                .iter()
                .map(|arm| {
                    if arm.binder == name {
                        arm.clone()
                    } else {
                        let (binder, body) = rename_if_captured(&arm.binder, &arm.body, avoid);
                        CaseArm {
                            concept: arm.concept.clone(),
                            binder,
                            body: subst(&body, name, repl, avoid),
                        }
                    }
                })
                .collect(),
            default: Box::new(subst(default, name, repl, avoid)),
        },
        TermKind::Eq { lhs, rhs } => TermKind::Eq {
            lhs: Box::new(subst(lhs, name, repl, avoid)),
            rhs: Box::new(subst(rhs, name, repl, avoid)),
        },
        TermKind::Value(value) => TermKind::Value(subst_value(value, name, repl, avoid)),
    };
    Term::new(kind, term.span)
}

fn subst_value(value: &Value, name: &str, repl: &Term, avoid: &BTreeSet<String>) -> Value {
    match value {
        Value::Cons(head, tail) => Value::cons(
            subst_value(head, name, repl, avoid),
            subst_value(tail, name, repl, avoid),
        ),
        Value::Closure { param, annot, body } => {
            if param == name {
                value.clone()
            } else {
                let (param, body) = rename_if_captured(param, body, avoid);
                Value::Closure {
                    param,
                    annot: annot.clone(),
                    body: Box::new(subst(&body, name, repl, avoid)),
                }
            }
        }
        other => other.clone(),
    }
}

/// If `binder` occurs free in the replacement, α-rename it (and its bound
/// occurrences in `body`) to a fresh name before descending.
fn rename_if_captured(binder: &str, body: &Term, avoid: &BTreeSet<String>) -> (String, Term) {
    if !avoid.contains(binder) {
        return (binder.to_string(), body.clone());
    }
    let mut taken = avoid.clone();
    taken.extend(body.free_vars());
    let mut counter = 1;
    let fresh = loop {
        let candidate = format!("{binder}_{counter}");
        if !taken.contains(&candidate) {
            break candidate;
        }
        counter += 1;
    };
    let fresh_var = Term::synthetic(TermKind::Var(fresh.clone()));
    (fresh, substitute_term(body, binder, &fresh_var))
}
