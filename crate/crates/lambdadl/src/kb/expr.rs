//! Concept and role expressions. These double as the concept types of the
//! term language, so structural equality here is the equality used for
//! cache keys and type comparison; semantic equivalence is the reasoner's
//! job.

use std::collections::BTreeSet;
use std::fmt;

/// Primitive datatype tag: the `xsd:string` / `xsd:boolean` fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimType {
    Bool,
    Str,
}

impl PrimType {
    /// Tag as it appears in concept positions.
    pub fn xsd_name(&self) -> &'static str {
        match self {
            PrimType::Bool => "xsd:boolean",
            PrimType::Str => "xsd:string",
        }
    }
}

impl fmt::Display for PrimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Type-position spelling.
        match self {
            PrimType::Bool => write!(f, "bool"),
            PrimType::Str => write!(f, "string"),
        }
    }
}

/// A literal value of a primitive type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimValue {
    Bool(bool),
    Str(String),
}

impl PrimValue {
    pub fn prim_type(&self) -> PrimType {
        match self {
            PrimValue::Bool(_) => PrimType::Bool,
            PrimValue::Str(_) => PrimType::Str,
        }
    }
}

impl fmt::Display for PrimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimValue::Bool(b) => write!(f, "{b}"),
            PrimValue::Str(s) => {
                write!(f, "\"")?;
                for ch in s.chars() {
                    match ch {
                        '"' => write!(f, "\\\"")?,
                        '\\' => write!(f, "\\\\")?,
                        '\n' => write!(f, "\\n")?,
                        '\t' => write!(f, "\\t")?,
                        _ => write!(f, "{ch}")?,
                    }
                }
                write!(f, "\"")
            }
        }
    }
}

/// A role expression: an atomic role or its inverse. Double inversion is
/// unrepresentable, which keeps roles normalized by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleExpr {
    pub name: String,
    pub inverted: bool,
}

impl RoleExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        RoleExpr {
            name: name.into(),
            inverted: false,
        }
    }

    pub fn inverse_of(name: impl Into<String>) -> Self {
        RoleExpr {
            name: name.into(),
            inverted: true,
        }
    }

    /// `R⁻`; the inverse of an inverse is the atomic role again.
    pub fn inverse(&self) -> RoleExpr {
        RoleExpr {
            name: self.name.clone(),
            inverted: !self.inverted,
        }
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}^-", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// ALCOI(D) concept expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptExpr {
    /// `{a}` — the concept whose extension is exactly the object `a`.
    Nominal(String),
    /// A named concept.
    Atomic(String),
    Top,
    Bottom,
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
    Exists(RoleExpr, Box<ConceptExpr>),
    Forall(RoleExpr, Box<ConceptExpr>),
    /// Datatype leaf; only meaningful as the filler of a quantifier over a
    /// data role.
    Datatype(PrimType),
}

impl ConceptExpr {
    pub fn not(inner: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Not(Box::new(inner))
    }

    pub fn and(lhs: ConceptExpr, rhs: ConceptExpr) -> ConceptExpr {
        ConceptExpr::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: ConceptExpr, rhs: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn exists(role: RoleExpr, filler: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Exists(role, Box::new(filler))
    }

    pub fn forall(role: RoleExpr, filler: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Forall(role, Box::new(filler))
    }

    pub fn atomic(name: impl Into<String>) -> ConceptExpr {
        ConceptExpr::Atomic(name.into())
    }

    pub fn nominal(name: impl Into<String>) -> ConceptExpr {
        ConceptExpr::Nominal(name.into())
    }

    /// Negation normal form: `Not` ends up only directly above
    /// `Atomic`/`Nominal`/`Datatype` leaves. Idempotent and semantics
    /// preserving.
    pub fn nnf(&self) -> ConceptExpr {
        match self {
            ConceptExpr::Not(inner) => inner.negated_nnf(),
            ConceptExpr::And(l, r) => ConceptExpr::and(l.nnf(), r.nnf()),
            ConceptExpr::Or(l, r) => ConceptExpr::or(l.nnf(), r.nnf()),
            ConceptExpr::Exists(role, filler) => ConceptExpr::exists(role.clone(), filler.nnf()),
            ConceptExpr::Forall(role, filler) => ConceptExpr::forall(role.clone(), filler.nnf()),
            leaf => leaf.clone(),
        }
    }

    /// NNF of the negation of `self`.
    pub fn negated_nnf(&self) -> ConceptExpr {
        match self {
            ConceptExpr::Top => ConceptExpr::Bottom,
            ConceptExpr::Bottom => ConceptExpr::Top,
            ConceptExpr::Not(inner) => inner.nnf(),
            ConceptExpr::And(l, r) => ConceptExpr::or(l.negated_nnf(), r.negated_nnf()),
            ConceptExpr::Or(l, r) => ConceptExpr::and(l.negated_nnf(), r.negated_nnf()),
            ConceptExpr::Exists(role, filler) => {
                ConceptExpr::forall(role.clone(), filler.negated_nnf())
            }
            ConceptExpr::Forall(role, filler) => {
                ConceptExpr::exists(role.clone(), filler.negated_nnf())
            }
            leaf => ConceptExpr::not(leaf.clone()),
        }
    }

    /// Collect the names this expression mentions into `acc`.
    pub fn collect_names(&self, acc: &mut NameAcc) {
        match self {
            ConceptExpr::Nominal(obj) => {
                acc.objects.insert(obj.clone());
            }
            ConceptExpr::Atomic(name) => {
                acc.concepts.insert(name.clone());
            }
            ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Datatype(_) => {}
            ConceptExpr::Not(inner) => inner.collect_names(acc),
            ConceptExpr::And(l, r) | ConceptExpr::Or(l, r) => {
                l.collect_names(acc);
                r.collect_names(acc);
            }
            ConceptExpr::Exists(role, filler) | ConceptExpr::Forall(role, filler) => {
                acc.roles.insert(role.name.clone());
                filler.collect_names(acc);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ConceptExpr::Or(..) => 0,
            ConceptExpr::And(..) => 1,
            _ => 2,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            ConceptExpr::Nominal(obj) => write!(f, "{{{obj}}}")?,
            ConceptExpr::Atomic(name) => write!(f, "{name}")?,
            ConceptExpr::Top => write!(f, "Top")?,
            ConceptExpr::Bottom => write!(f, "Bot")?,
            ConceptExpr::Not(inner) => {
                write!(f, "!")?;
                inner.fmt_prec(f, 2)?;
            }
            ConceptExpr::And(l, r) => {
                l.fmt_prec(f, 1)?;
                write!(f, " & ")?;
                r.fmt_prec(f, 2)?;
            }
            ConceptExpr::Or(l, r) => {
                l.fmt_prec(f, 0)?;
                write!(f, " | ")?;
                r.fmt_prec(f, 1)?;
            }
            ConceptExpr::Exists(role, filler) => {
                write!(f, "exists {role}.")?;
                filler.fmt_prec(f, 2)?;
            }
            ConceptExpr::Forall(role, filler) => {
                write!(f, "forall {role}.")?;
                filler.fmt_prec(f, 2)?;
            }
            ConceptExpr::Datatype(tag) => write!(f, "{}", tag.xsd_name())?,
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Names mentioned by an expression, sorted by the signature slot their
/// syntactic position implies.
#[derive(Debug, Default, Clone)]
pub struct NameAcc {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub objects: BTreeSet<String>,
}
