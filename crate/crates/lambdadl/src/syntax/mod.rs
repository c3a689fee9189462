//! Terms, values, and types of the language, with parser and printer.
//!
//! Types are either concept expressions (shared verbatim with [`crate::kb`]),
//! function types, list types, or the primitive types `bool` and `string`.
//! Terms follow a call-by-value λ-calculus extended with lists, a
//! `query C` form, role projection `t.R`, object equivalence `t = t`, and
//! a typecase `case t of | type C as x -> t ... | default t`.

mod parse;
mod print;
mod subst;

pub use parse::{parse_repl_line, parse_term, parse_term_with_bound, parse_type_str, ReplInput};
pub use subst::{substitute, substitute_term};

use std::collections::BTreeSet;

use crate::kb::{ConceptExpr, PrimType, PrimValue, RoleExpr, Span};

/// A type: concept, function, list, or primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Concept(ConceptExpr),
    Func(Box<Type>, Box<Type>),
    List(Box<Type>),
    Prim(PrimType),
}

impl Type {
    pub const BOOL: Type = Type::Prim(PrimType::Bool);
    pub const STRING: Type = Type::Prim(PrimType::Str);

    pub fn concept(c: ConceptExpr) -> Type {
        Type::Concept(c)
    }

    pub fn func(domain: Type, codomain: Type) -> Type {
        Type::Func(Box::new(domain), Box::new(codomain))
    }

    pub fn list(element: Type) -> Type {
        Type::List(Box::new(element))
    }
}

/// One `type C as x -> t` arm of a typecase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseArm {
    pub concept: ConceptExpr,
    pub binder: String,
    pub body: Term,
}

/// A term with its source span. Equality ignores spans.
#[derive(Debug, Clone, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> Term {
        Term { kind, span }
    }

    /// A term with no source position (built during evaluation).
    pub fn synthetic(kind: TermKind) -> Term {
        Term {
            kind,
            span: Span::synthetic(),
        }
    }

    /// View this term as a value, if it is one. `cons v₁ v₂` over value
    /// parts is itself a value.
    pub fn as_value(&self) -> Option<Value> {
        match &self.kind {
            TermKind::Value(v) => Some(v.clone()),
            TermKind::Cons { head, tail } => {
                let head = head.as_value()?;
                let tail = tail.as_value()?;
                Some(Value::cons(head, tail))
            }
            _ => None,
        }
    }

    pub fn is_value(&self) -> bool {
        self.as_value().is_some()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut vars);
        vars
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    Let {
        name: String,
        bound: Box<Term>,
        body: Box<Term>,
    },
    Fix(Box<Term>),
    App {
        func: Box<Term>,
        arg: Box<Term>,
    },
    If {
        cond: Box<Term>,
        then_branch: Box<Term>,
        else_branch: Box<Term>,
    },
    Cons {
        head: Box<Term>,
        tail: Box<Term>,
    },
    Null(Box<Term>),
    Head(Box<Term>),
    Tail(Box<Term>),
    Query(ConceptExpr),
    Proj {
        subject: Box<Term>,
        role: RoleExpr,
    },
    Case {
        scrutinee: Box<Term>,
        arms: Vec<CaseArm>,
        default: Box<Term>,
    },
    Eq {
        lhs: Box<Term>,
        rhs: Box<Term>,
    },
    Var(String),
    Value(Value),
}

/// A value: a KB object, a list, an abstraction, or a primitive literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Object(String),
    /// `nil[T]` — the empty list carries its element type.
    Nil(Type),
    /// `cons v v`; in well-typed programs tails are `Nil` or `Cons`.
    Cons(Box<Value>, Box<Value>),
    Closure {
        param: String,
        annot: Type,
        body: Box<Term>,
    },
    Prim(PrimValue),
}

impl Value {
    pub fn cons(head: Value, tail: Value) -> Value {
        Value::Cons(Box::new(head), Box::new(tail))
    }

    pub fn bool(b: bool) -> Value {
        Value::Prim(PrimValue::Bool(b))
    }

    pub fn string(s: impl Into<String>) -> Value {
        Value::Prim(PrimValue::Str(s.into()))
    }

    pub fn term(self) -> Term {
        Term::synthetic(TermKind::Value(self))
    }

    /// Build a proper list value, annotating the trailing nil with the
    /// element type.
    pub fn list_of(items: Vec<Value>, element_type: Type) -> Value {
        let mut value = Value::Nil(element_type);
        for item in items.into_iter().rev() {
            value = Value::cons(item, value);
        }
        value
    }

    /// Elements of a proper list value.
    pub fn list_items(&self) -> Option<Vec<&Value>> {
        let mut items = Vec::new();
        let mut cursor = self;
        loop {
            match cursor {
                Value::Nil(_) => return Some(items),
                Value::Cons(head, tail) => {
                    items.push(head.as_ref());
                    cursor = tail.as_ref();
                }
                _ => return None,
            }
        }
    }
}

fn collect_free(term: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match &term.kind {
        TermKind::Var(name) => {
            if !bound.iter().any(|b| b == name) {
                out.insert(name.clone());
            }
        }
        TermKind::Let { name, bound: b, body } => {
            collect_free(b, bound, out);
            bound.push(name.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        TermKind::Fix(inner)
        | TermKind::Null(inner)
        | TermKind::Head(inner)
        | TermKind::Tail(inner) => collect_free(inner, bound, out),
        TermKind::App { func, arg } => {
            collect_free(func, bound, out);
            collect_free(arg, bound, out);
        }
        TermKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            collect_free(cond, bound, out);
            collect_free(then_branch, bound, out);
            collect_free(else_branch, bound, out);
        }
        TermKind::Cons { head, tail } => {
            collect_free(head, bound, out);
            collect_free(tail, bound, out);
        }
        TermKind::Query(_) => {}
        TermKind::Proj { subject, .. } => collect_free(subject, bound, out),
        TermKind::Case {
            scrutinee,
            arms,
            default,
        } => {
            collect_free(scrutinee, bound, out);
            for arm in arms {
                bound.push(arm.binder.clone());
                collect_free(&arm.body, bound, out);
                bound.pop();
            }
            collect_free(default, bound, out);
        }
        TermKind::Eq { lhs, rhs } => {
            collect_free(lhs, bound, out);
            collect_free(rhs, bound, out);
        }
        TermKind::Value(value) => collect_free_value(value, bound, out),
    }
}

fn collect_free_value(value: &Value, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match value {
        Value::Cons(head, tail) => {
            collect_free_value(head, bound, out);
            collect_free_value(tail, bound, out);
        }
        Value::Closure { param, body, .. } => {
            bound.push(param.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        _ => {}
    }
}
