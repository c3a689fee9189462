//! A typed, call-by-value λ-calculus whose types are description-logic
//! concept expressions, together with the machinery it needs:
//!
//! * [`kb`] — ALCOI(D) knowledge bases: concepts, roles, axioms, and the
//!   textual `.kb` format.
//! * [`reasoner`] — decision procedures over a knowledge base (concept
//!   satisfiability, subsumption, instance checking, object equivalence,
//!   DL-safe query answering) backed by a tableau engine, plus a bounded
//!   finite-model countermodel finder used as a test oracle.
//! * [`syntax`] — AST, parser, and printer for the term language.
//! * [`typecheck`] — the typing judgment with reasoner-backed subtyping
//!   and least-upper-bound/greatest-lower-bound computation.
//! * [`eval`] — small-step reduction with query and projection
//!   materialization.

pub mod eval;
pub mod kb;
pub mod reasoner;
pub mod syntax;
pub mod typecheck;

pub use eval::{evaluate, evaluate_with, step, EvalConfig, EvalOutcome, RunResult, StuckKind};
pub use kb::{Axiom, ConceptExpr, KbError, KnowledgeBase, PrimType, PrimValue, RoleExpr, Signature};
pub use reasoner::{Budget, KnowledgeSystem, ReasonerError, TableauReasoner};
pub use syntax::{
    parse_term, parse_term_with_bound, substitute, CaseArm, Term, TermKind, Type, Value,
};
pub use typecheck::{glb, is_subtype, lub, typecheck, TypeError, TypeErrorKind, TypingContext};
