//! The typing judgment `Γ ⊢ t : T`, syntax-directed with reasoner-backed
//! subtyping.
//!
//! The checker computes the minimal type of a term. Subsumption enters
//! exactly where the algorithmic system needs it: function application
//! arguments (and the fixed-point rule, which otherwise has no
//! syntax-directed form); control-flow joins in `if`, `cons`, and
//! typecase use the least-upper-bound judgment instead. Concept
//! subtyping, query satisfiability, and the typecase side conditions are
//! forwarded to the knowledge system, which is what lets inferred facts
//! participate in type checking.

use std::fmt;

use crate::kb::{ConceptExpr, NameAcc, PrimType, PrimValue, Span};
use crate::reasoner::{KnowledgeSystem, ReasonerError};
use crate::syntax::{Term, TermKind, Type, Value};

/// Ordered name→type bindings; lookup returns the rightmost (innermost)
/// binding.
#[derive(Debug, Clone, Default)]
pub struct TypingContext {
    bindings: Vec<(String, Type)>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extended(&self, name: impl Into<String>, ty: Type) -> Self {
        let mut ctx = self.clone();
        ctx.bindings.push((name.into(), ty));
        ctx
    }

    /// Append a binding in place (REPL sessions grow their context).
    pub fn bind(&mut self, name: impl Into<String>, ty: Type) {
        self.bindings.push((name.into(), ty));
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn names(&self) -> std::collections::BTreeSet<String> {
        self.bindings.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Type)> {
        self.bindings.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn clear(&mut self) {
        self.bindings.clear();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    Mismatch,
    UnsatisfiableQuery,
    EmptyIntersection,
    SubsumedCase,
    UnboundVariable,
    NonConceptProjection,
    NonListElim,
    UnknownObject,
    UnknownName,
    InvalidConcept,
    Reasoner(ReasonerError),
}

/// A rejection, carrying the violated rule name and the source span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub rule: &'static str,
    pub span: Span,
    pub message: String,
}

impl TypeError {
    fn new(kind: TypeErrorKind, rule: &'static str, span: Span, message: impl Into<String>) -> Self {
        TypeError {
            kind,
            rule,
            span,
            message: message.into(),
        }
    }

    fn with_span(mut self, span: Span) -> Self {
        if self.span == Span::synthetic() {
            self.span = span;
        }
        self
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

impl std::error::Error for TypeError {}

fn reasoner_failure(e: ReasonerError, rule: &'static str, span: Span) -> TypeError {
    TypeError::new(TypeErrorKind::Reasoner(e.clone()), rule, span, e.to_string())
}

/// Least upper bound of two types. Primitive types must match; concepts
/// join by union; lists join elementwise; functions meet on domains and
/// join on codomains. Equal types are their own bound.
pub fn lub(s: &Type, t: &Type) -> Result<Type, TypeError> {
    if s == t {
        return Ok(s.clone());
    }
    match (s, t) {
        (Type::Concept(c), Type::Concept(d)) => {
            Ok(Type::Concept(ConceptExpr::or(c.clone(), d.clone())))
        }
        (Type::List(a), Type::List(b)) => Ok(Type::list(lub(a, b)?)),
        (Type::Func(s1, s2), Type::Func(t1, t2)) => {
            Ok(Type::func(glb(s1, t1)?, lub(s2, t2)?))
        }
        _ => Err(TypeError::new(
            TypeErrorKind::Mismatch,
            "LUB",
            Span::synthetic(),
            format!("no least upper bound of `{s}` and `{t}`"),
        )),
    }
}

/// Greatest lower bound; the mirror of [`lub`] with intersection on
/// concepts and union on function domains.
pub fn glb(s: &Type, t: &Type) -> Result<Type, TypeError> {
    if s == t {
        return Ok(s.clone());
    }
    match (s, t) {
        (Type::Concept(c), Type::Concept(d)) => {
            Ok(Type::Concept(ConceptExpr::and(c.clone(), d.clone())))
        }
        (Type::List(a), Type::List(b)) => Ok(Type::list(glb(a, b)?)),
        (Type::Func(s1, s2), Type::Func(t1, t2)) => {
            Ok(Type::func(lub(s1, t1)?, glb(s2, t2)?))
        }
        _ => Err(TypeError::new(
            TypeErrorKind::Mismatch,
            "GLB",
            Span::synthetic(),
            format!("no greatest lower bound of `{s}` and `{t}`"),
        )),
    }
}

/// The subtype relation: reflexivity, reasoner-decided concept
/// subsumption, covariant lists, and contravariant/covariant functions.
pub fn is_subtype(ks: &dyn KnowledgeSystem, s: &Type, t: &Type) -> Result<bool, ReasonerError> {
    if s == t {
        return Ok(true);
    }
    match (s, t) {
        (Type::Concept(c), Type::Concept(d)) => ks.is_subsumed(c, d),
        (Type::List(a), Type::List(b)) => is_subtype(ks, a, b),
        (Type::Func(s1, s2), Type::Func(t1, t2)) => {
            Ok(is_subtype(ks, t1, s1)? && is_subtype(ks, s2, t2)?)
        }
        _ => Ok(false),
    }
}

/// The subtyping rule to cite when `s <: t` fails, as deep as the shapes
/// allow.
fn blame(s: &Type, t: &Type) -> Option<&'static str> {
    match (s, t) {
        (Type::Concept(_), Type::Concept(_)) => Some("S-CONCEPT"),
        (Type::List(a), Type::List(b)) => blame(a, b).or(Some("S-LIST")),
        (Type::Func(..), Type::Func(..)) => Some("S-FUNC"),
        _ => None,
    }
}

fn require_subtype(
    ks: &dyn KnowledgeSystem,
    s: &Type,
    t: &Type,
    span: Span,
    context_rule: &'static str,
) -> Result<(), TypeError> {
    match is_subtype(ks, s, t) {
        Ok(true) => Ok(()),
        Ok(false) => Err(TypeError::new(
            TypeErrorKind::Mismatch,
            blame(s, t).unwrap_or(context_rule),
            span,
            format!("`{s}` is not a subtype of `{t}`"),
        )),
        Err(e) => Err(reasoner_failure(e, context_rule, span)),
    }
}

/// Check that every name a concept mentions is declared in the KB
/// signature and that datatype fillers sit on data roles.
fn validate_concept(
    ks: &dyn KnowledgeSystem,
    concept: &ConceptExpr,
    span: Span,
    rule: &'static str,
) -> Result<(), TypeError> {
    let sig = ks.kb().signature();
    let mut acc = NameAcc::default();
    concept.collect_names(&mut acc);
    for name in &acc.concepts {
        if !sig.concepts.contains(name) {
            return Err(TypeError::new(
                TypeErrorKind::UnknownName,
                rule,
                span,
                format!("concept `{name}` is not in the knowledge-base signature"),
            ));
        }
    }
    for name in &acc.roles {
        if !sig.roles.contains(name) && !sig.data_roles.contains(name) {
            return Err(TypeError::new(
                TypeErrorKind::UnknownName,
                rule,
                span,
                format!("role `{name}` is not in the knowledge-base signature"),
            ));
        }
    }
    for name in &acc.objects {
        if !sig.objects.contains(name) {
            return Err(TypeError::new(
                TypeErrorKind::UnknownName,
                rule,
                span,
                format!("object `{name}` is not in the knowledge-base signature"),
            ));
        }
    }
    ks.kb().validate_concept(concept).map_err(|e| {
        TypeError::new(TypeErrorKind::InvalidConcept, rule, span, e.to_string())
    })
}

fn validate_type(
    ks: &dyn KnowledgeSystem,
    ty: &Type,
    span: Span,
    rule: &'static str,
) -> Result<(), TypeError> {
    match ty {
        Type::Concept(c) => validate_concept(ks, c, span, rule),
        Type::Func(a, b) => {
            validate_type(ks, a, span, rule)?;
            validate_type(ks, b, span, rule)
        }
        Type::List(e) => validate_type(ks, e, span, rule),
        Type::Prim(_) => Ok(()),
    }
}

/// Compute the minimal type of `term` under `ctx`, or the first
/// violation found.
pub fn typecheck(
    ks: &dyn KnowledgeSystem,
    ctx: &TypingContext,
    term: &Term,
) -> Result<Type, TypeError> {
    let span = term.span;
    match &term.kind {
        TermKind::Var(name) => ctx.lookup(name).cloned().ok_or_else(|| {
            TypeError::new(
                TypeErrorKind::UnboundVariable,
                "T-VAR",
                span,
                format!("unbound variable `{name}`"),
            )
        }),
        TermKind::Value(value) => typecheck_value(ks, ctx, value, span),
        TermKind::Let { name, bound, body } => {
            let bound_ty = typecheck(ks, ctx, bound)?;
            typecheck(ks, &ctx.extended(name.clone(), bound_ty), body)
        }
        TermKind::Fix(inner) => {
            let inner_ty = typecheck(ks, ctx, inner)?;
            match inner_ty {
                Type::Func(domain, codomain) => {
                    require_subtype(ks, &codomain, &domain, span, "T-FIX")?;
                    Ok(*codomain)
                }
                other => Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    "T-FIX",
                    span,
                    format!("fix needs a function from a type to itself, found `{other}`"),
                )),
            }
        }
        TermKind::App { func, arg } => {
            let func_ty = typecheck(ks, ctx, func)?;
            let arg_ty = typecheck(ks, ctx, arg)?;
            match func_ty {
                Type::Func(domain, codomain) => {
                    require_subtype(ks, &arg_ty, &domain, arg.span, "T-APP")?;
                    Ok(*codomain)
                }
                other => Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    "T-APP",
                    func.span,
                    format!("expected a function, found `{other}`"),
                )),
            }
        }
        TermKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let cond_ty = typecheck(ks, ctx, cond)?;
            if cond_ty != Type::BOOL {
                return Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    "T-IF",
                    cond.span,
                    format!("condition must be bool, found `{cond_ty}`"),
                ));
            }
            let then_ty = typecheck(ks, ctx, then_branch)?;
            let else_ty = typecheck(ks, ctx, else_branch)?;
            lub(&then_ty, &else_ty).map_err(|e| e.with_span(span))
        }
        TermKind::Cons { head, tail } => {
            let head_ty = typecheck(ks, ctx, head)?;
            let tail_ty = typecheck(ks, ctx, tail)?;
            match tail_ty {
                Type::List(element) => {
                    let joined = lub(&head_ty, &element).map_err(|e| e.with_span(span))?;
                    Ok(Type::list(joined))
                }
                other => Err(TypeError::new(
                    TypeErrorKind::NonListElim,
                    "T-CONS",
                    tail.span,
                    format!("cons tail must be a list, found `{other}`"),
                )),
            }
        }
        TermKind::Null(inner) => {
            expect_list(ks, ctx, inner, "T-NULL")?;
            Ok(Type::BOOL)
        }
        TermKind::Head(inner) => {
            let element = expect_list(ks, ctx, inner, "T-HEAD")?;
            Ok(element)
        }
        TermKind::Tail(inner) => {
            let element = expect_list(ks, ctx, inner, "T-TAIL")?;
            Ok(Type::list(element))
        }
        TermKind::Query(concept) => {
            validate_concept(ks, concept, span, "T-QUERY")?;
            let satisfiable = ks
                .is_satisfiable(concept)
                .map_err(|e| reasoner_failure(e, "T-QUERY", span))?;
            if !satisfiable {
                return Err(TypeError::new(
                    TypeErrorKind::UnsatisfiableQuery,
                    "T-QUERY",
                    span,
                    format!("query concept `{concept}` is unsatisfiable"),
                ));
            }
            Ok(Type::list(Type::Concept(concept.clone())))
        }
        TermKind::Proj { subject, role } => {
            let subject_ty = typecheck(ks, ctx, subject)?;
            let Type::Concept(concept) = subject_ty else {
                return Err(TypeError::new(
                    TypeErrorKind::NonConceptProjection,
                    "T-PROJ",
                    subject.span,
                    format!("projection needs a concept-typed subject, found `{subject_ty}`"),
                ));
            };
            let sig = ks.kb().signature();
            if sig.data_roles.contains(&role.name) {
                if role.inverted {
                    return Err(TypeError::new(
                        TypeErrorKind::InvalidConcept,
                        "T-PROJ",
                        span,
                        format!("data role `{}` cannot be inverted", role.name),
                    ));
                }
                let prim = ks.kb().data_range(&role.name).unwrap_or(PrimType::Str);
                Ok(Type::list(Type::Prim(prim)))
            } else if sig.roles.contains(&role.name) {
                Ok(Type::list(Type::Concept(ConceptExpr::exists(
                    role.inverse(),
                    concept,
                ))))
            } else {
                Err(TypeError::new(
                    TypeErrorKind::UnknownName,
                    "T-PROJ",
                    span,
                    format!("role `{}` is not in the knowledge-base signature", role.name),
                ))
            }
        }
        TermKind::Case {
            scrutinee,
            arms,
            default,
        } => {
            let scrutinee_ty = typecheck(ks, ctx, scrutinee)?;
            let Type::Concept(discriminee) = &scrutinee_ty else {
                return Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    "T-DISPATCH",
                    scrutinee.span,
                    format!("typecase scrutinee must have a concept type, found `{scrutinee_ty}`"),
                ));
            };
            for arm in arms {
                validate_concept(ks, &arm.concept, arm.body.span, "T-DISPATCH")?;
            }
            // A later arm subsumed by an earlier one can never match.
            for (j, later) in arms.iter().enumerate() {
                for earlier in &arms[..j] {
                    let dead = ks
                        .is_subsumed(&later.concept, &earlier.concept)
                        .map_err(|e| reasoner_failure(e, "T-DISPATCH", span))?;
                    if dead {
                        return Err(TypeError::new(
                            TypeErrorKind::SubsumedCase,
                            "T-DISPATCH",
                            later.body.span,
                            format!(
                                "case arm `{}` is subsumed by earlier arm `{}`",
                                later.concept, earlier.concept
                            ),
                        ));
                    }
                }
            }
            // An arm disjoint from the scrutinee type can never match.
            for arm in arms {
                let overlap = ConceptExpr::and(arm.concept.clone(), discriminee.clone());
                let possible = ks
                    .is_satisfiable(&overlap)
                    .map_err(|e| reasoner_failure(e, "T-DISPATCH", span))?;
                if !possible {
                    return Err(TypeError::new(
                        TypeErrorKind::EmptyIntersection,
                        "T-DISPATCH",
                        arm.body.span,
                        format!(
                            "case arm `{}` cannot match a scrutinee of type `{discriminee}`",
                            arm.concept
                        ),
                    ));
                }
            }
            let mut result = None;
            for arm in arms {
                let arm_ctx = ctx.extended(arm.binder.clone(), Type::Concept(arm.concept.clone()));
                let arm_ty = typecheck(ks, &arm_ctx, &arm.body)?;
                result = Some(match result {
                    None => arm_ty,
                    Some(acc) => lub(&acc, &arm_ty).map_err(|e| e.with_span(span))?,
                });
            }
            let default_ty = typecheck(ks, ctx, default)?;
            match result {
                None => Ok(default_ty),
                Some(acc) => lub(&acc, &default_ty).map_err(|e| e.with_span(span)),
            }
        }
        TermKind::Eq { lhs, rhs } => {
            let lhs_ty = typecheck(ks, ctx, lhs)?;
            let rhs_ty = typecheck(ks, ctx, rhs)?;
            match (&lhs_ty, &rhs_ty) {
                (Type::Concept(c), Type::Concept(d)) => {
                    let overlap = ConceptExpr::and(c.clone(), d.clone());
                    let possible = ks
                        .is_satisfiable(&overlap)
                        .map_err(|e| reasoner_failure(e, "T-EQN", span))?;
                    if !possible {
                        return Err(TypeError::new(
                            TypeErrorKind::EmptyIntersection,
                            "T-EQN",
                            span,
                            format!("`{c}` and `{d}` cannot share an instance"),
                        ));
                    }
                    Ok(Type::BOOL)
                }
                (Type::Prim(a), Type::Prim(b)) if a == b => Ok(Type::BOOL),
                _ => Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    "T-EQN",
                    span,
                    format!("equivalence is not defined between `{lhs_ty}` and `{rhs_ty}`"),
                )),
            }
        }
    }
}

fn expect_list(
    ks: &dyn KnowledgeSystem,
    ctx: &TypingContext,
    term: &Term,
    rule: &'static str,
) -> Result<Type, TypeError> {
    match typecheck(ks, ctx, term)? {
        Type::List(element) => Ok(*element),
        other => Err(TypeError::new(
            TypeErrorKind::NonListElim,
            rule,
            term.span,
            format!("expected a list, found `{other}`"),
        )),
    }
}

fn typecheck_value(
    ks: &dyn KnowledgeSystem,
    ctx: &TypingContext,
    value: &Value,
    span: Span,
) -> Result<Type, TypeError> {
    match value {
        Value::Object(name) => {
            if !ks.kb().is_object(name) {
                return Err(TypeError::new(
                    TypeErrorKind::UnknownObject,
                    "T-OBJECT",
                    span,
                    format!("object `{name}` is not in the knowledge-base signature"),
                ));
            }
            Ok(Type::Concept(ConceptExpr::nominal(name.clone())))
        }
        Value::Nil(annot) => {
            validate_type(ks, annot, span, "T-NIL")?;
            Ok(Type::list(annot.clone()))
        }
        Value::Cons(head, tail) => {
            let head_ty = typecheck_value(ks, ctx, head, span)?;
            match typecheck_value(ks, ctx, tail, span)? {
                Type::List(element) => {
                    let joined = lub(&head_ty, &element).map_err(|e| e.with_span(span))?;
                    Ok(Type::list(joined))
                }
                other => Err(TypeError::new(
                    TypeErrorKind::NonListElim,
                    "T-CONS",
                    span,
                    format!("cons tail must be a list, found `{other}`"),
                )),
            }
        }
        Value::Closure { param, annot, body } => {
            validate_type(ks, annot, span, "T-ABS")?;
            let body_ty = typecheck(ks, &ctx.extended(param.clone(), annot.clone()), body)?;
            Ok(Type::func(annot.clone(), body_ty))
        }
        Value::Prim(PrimValue::Bool(_)) => Ok(Type::BOOL),
        Value::Prim(PrimValue::Str(_)) => Ok(Type::STRING),
    }
}

#[cfg(test)]
mod tests;
