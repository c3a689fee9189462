//! Display impls producing parseable text: `parse(print(t)) == t`.

use std::fmt;

use crate::kb::ConceptExpr;

use super::{Term, TermKind, Type, Value};

// Term precedence: 0 statement-like (let/fun/if/case), 1 equivalence,
// 2 application and the keyword operators, 3 atoms.
impl Term {
    fn prec(&self) -> u8 {
        match &self.kind {
            TermKind::Let { .. } | TermKind::If { .. } | TermKind::Case { .. } => 0,
            TermKind::Eq { .. } => 1,
            TermKind::App { .. }
            | TermKind::Fix(_)
            | TermKind::Cons { .. }
            | TermKind::Null(_)
            | TermKind::Head(_)
            | TermKind::Tail(_)
            | TermKind::Query(_) => 2,
            TermKind::Proj { .. } | TermKind::Var(_) => 3,
            TermKind::Value(v) => v.prec(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.prec();
        if prec < min {
            write!(f, "(")?;
        }
        match &self.kind {
            TermKind::Let { name, bound, body } => {
                write!(f, "let {name} = ")?;
                bound.fmt_prec(f, 0)?;
                write!(f, " in ")?;
                body.fmt_prec(f, 0)?;
            }
            TermKind::Fix(inner) => {
                write!(f, "fix ")?;
                inner.fmt_prec(f, 3)?;
            }
            TermKind::App { func, arg } => {
                func.fmt_prec(f, 2)?;
                write!(f, " ")?;
                arg.fmt_prec(f, 3)?;
            }
            TermKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                write!(f, "if ")?;
                cond.fmt_prec(f, 0)?;
                write!(f, " then ")?;
                then_branch.fmt_prec(f, 0)?;
                write!(f, " else ")?;
                else_branch.fmt_prec(f, 0)?;
            }
            TermKind::Cons { head, tail } => {
                write!(f, "cons ")?;
                head.fmt_prec(f, 3)?;
                write!(f, " ")?;
                tail.fmt_prec(f, 3)?;
            }
            TermKind::Null(inner) => {
                write!(f, "null ")?;
                inner.fmt_prec(f, 3)?;
            }
            TermKind::Head(inner) => {
                write!(f, "head ")?;
                inner.fmt_prec(f, 3)?;
            }
            TermKind::Tail(inner) => {
                write!(f, "tail ")?;
                inner.fmt_prec(f, 3)?;
            }
            TermKind::Query(concept) => write!(f, "query {concept}")?,
            TermKind::Proj { subject, role } => {
                subject.fmt_prec(f, 3)?;
                write!(f, ".{role}")?;
            }
            TermKind::Case {
                scrutinee,
                arms,
                default,
            } => {
                write!(f, "case ")?;
                scrutinee.fmt_prec(f, 0)?;
                write!(f, " of")?;
                for arm in arms {
                    write!(f, " | type {} as {} -> ", arm.concept, arm.binder)?;
                    // Bodies print at level 1 so a nested case cannot
                    // capture the following arms.
                    arm.body.fmt_prec(f, 1)?;
                }
                write!(f, " | default ")?;
                default.fmt_prec(f, 1)?;
            }
            TermKind::Eq { lhs, rhs } => {
                lhs.fmt_prec(f, 2)?;
                write!(f, " = ")?;
                rhs.fmt_prec(f, 2)?;
            }
            TermKind::Var(name) => write!(f, "{name}")?,
            TermKind::Value(value) => value.fmt_prec(f, 0)?,
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Value {
    fn prec(&self) -> u8 {
        match self {
            Value::Closure { .. } => 0,
            Value::Cons(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, _min: u8) -> fmt::Result {
        match self {
            Value::Object(name) => write!(f, "{name}"),
            Value::Nil(annot) => write!(f, "nil[{annot}]"),
            Value::Cons(head, tail) => {
                write!(f, "cons ")?;
                head.fmt_atom(f)?;
                write!(f, " ")?;
                tail.fmt_atom(f)
            }
            Value::Closure { param, annot, body } => {
                write!(f, "fun({param}:{annot}). ")?;
                body.fmt_prec(f, 0)
            }
            Value::Prim(p) => write!(f, "{p}"),
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prec() < 3 {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            write!(f, ")")
        } else {
            self.fmt_prec(f, 3)
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn concept_is_type_atom(c: &ConceptExpr) -> bool {
    !matches!(c, ConceptExpr::And(..) | ConceptExpr::Or(..))
}

// Type precedence: 0 function arrow, 1 union, 2 intersection/list,
// 3 atoms.
impl Type {
    fn prec(&self) -> u8 {
        match self {
            Type::Func(..) => 0,
            Type::Concept(ConceptExpr::Or(..)) => 1,
            Type::Concept(ConceptExpr::And(..)) | Type::List(_) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.prec();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            Type::Concept(c) => write!(f, "{c}")?,
            Type::Func(domain, codomain) => {
                domain.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                codomain.fmt_prec(f, 0)?;
            }
            Type::List(element) => {
                // `T list list` stacks without parentheses; other
                // non-atomic elements need them.
                let elem_min = match element.as_ref() {
                    Type::List(_) => 2,
                    Type::Concept(c) if concept_is_type_atom(c) => 3,
                    Type::Prim(_) => 3,
                    _ => u8::MAX,
                };
                if elem_min == u8::MAX {
                    write!(f, "(")?;
                    element.fmt_prec(f, 0)?;
                    write!(f, ")")?;
                } else {
                    element.fmt_prec(f, elem_min)?;
                }
                write!(f, " list")?;
            }
            Type::Prim(p) => write!(f, "{p}")?,
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
