//! Decision procedures over a knowledge base.
//!
//! The [`KnowledgeSystem`] trait is the seam the type checker and the
//! evaluator program against; [`TableauReasoner`] is the built-in
//! implementation, and an external reasoner could be dropped in behind
//! the same trait. All answers follow open-world querying: an operation
//! returns `true` only when the question holds in every model of the
//! knowledge base, and `unknown` collapses to `false`.

mod oracle;
mod tableau;

pub use oracle::{find_countermodel, FiniteInterpretation, DEFAULT_ORACLE_BOUND};

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use crate::kb::{ConceptExpr, KnowledgeBase, PrimValue, RoleExpr};

/// Hard limits on a single entailment query. Exceeding a limit aborts the
/// query with a [`ReasonerError`] rather than returning a wrong boolean.
#[derive(Debug, Clone)]
pub struct Budget {
    pub max_nodes: usize,
    pub max_time: Duration,
}

pub const DEFAULT_NODE_BUDGET: usize = 100_000;
pub const DEFAULT_TIME_BUDGET_MS: u64 = 5_000;

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: DEFAULT_NODE_BUDGET,
            max_time: Duration::from_millis(DEFAULT_TIME_BUDGET_MS),
        }
    }
}

impl Budget {
    /// Defaults, overridden by `LAMBDADL_NODE_BUDGET` and
    /// `LAMBDADL_TIME_BUDGET_MS` when set.
    pub fn from_env() -> Self {
        let mut budget = Budget::default();
        if let Some(nodes) = std::env::var("LAMBDADL_NODE_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
        {
            budget.max_nodes = nodes;
        }
        if let Some(ms) = std::env::var("LAMBDADL_TIME_BUDGET_MS")
            .ok()
            .and_then(|v| v.parse().ok())
        {
            budget.max_time = Duration::from_millis(ms);
        }
        budget
    }
}

/// A query exceeded its resource budget.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReasonerError {
    #[error("tableau node budget exceeded ({limit} nodes)")]
    NodeBudget { limit: usize },
    #[error("reasoner time budget exceeded ({limit_ms} ms)")]
    TimeBudget { limit_ms: u64 },
}

/// The oracle interface between the language and a knowledge base.
pub trait KnowledgeSystem: Send + Sync {
    fn kb(&self) -> &KnowledgeBase;

    /// Does some model of the KB give `c` a non-empty extension?
    fn is_satisfiable(&self, c: &ConceptExpr) -> Result<bool, ReasonerError>;

    /// Does `C ⊑ D` hold in every model of the KB?
    fn is_subsumed(&self, c: &ConceptExpr, d: &ConceptExpr) -> Result<bool, ReasonerError>;

    /// Does `a : C` hold in every model of the KB?
    fn is_instance(&self, object: &str, c: &ConceptExpr) -> Result<bool, ReasonerError>;

    /// Does `a ≡ b` hold in every model of the KB?
    fn are_equivalent_objects(&self, a: &str, b: &str) -> Result<bool, ReasonerError>;

    /// All named objects entailed to be instances of `c`, sorted by name.
    /// Anonymous individuals are never reported (DL-safe queries).
    fn query_instances(&self, c: &ConceptExpr) -> Result<Vec<String>, ReasonerError>;

    /// All named objects `b` with `(a, b) : R` entailed, sorted by name.
    fn query_role_successors(
        &self,
        object: &str,
        role: &RoleExpr,
    ) -> Result<Vec<String>, ReasonerError>;

    /// Literal values asserted for `(a, r)`, sorted. Literals are never
    /// inferred, only read off the ABox.
    fn query_data_successors(
        &self,
        object: &str,
        role: &str,
    ) -> Result<Vec<PrimValue>, ReasonerError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Question {
    Satisfiable(ConceptExpr),
    Instance(String, ConceptExpr),
}

/// The built-in tableau-backed knowledge system with a memo table over
/// canonical questions. The cache is observationally transparent: cached
/// answers equal uncached answers.
pub struct TableauReasoner {
    kb: KnowledgeBase,
    budget: Budget,
    cache: Mutex<HashMap<Question, bool>>,
}

impl TableauReasoner {
    pub fn new(kb: KnowledgeBase) -> Self {
        Self::with_budget(kb, Budget::from_env())
    }

    pub fn with_budget(kb: KnowledgeBase, budget: Budget) -> Self {
        TableauReasoner {
            kb,
            budget,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    fn cached(
        &self,
        question: Question,
        compute: impl FnOnce() -> Result<bool, ReasonerError>,
    ) -> Result<bool, ReasonerError> {
        if let Some(answer) = self.cache.lock().unwrap().get(&question) {
            return Ok(*answer);
        }
        let answer = compute()?;
        self.cache.lock().unwrap().insert(question, answer);
        Ok(answer)
    }

    /// `K ⊨ a : C`, via inconsistency of `K ∪ {a : ¬C}`.
    fn entails_instance(&self, object: &str, c: &ConceptExpr) -> Result<bool, ReasonerError> {
        if !self.kb.is_object(object) {
            return Ok(false);
        }
        let question = Question::Instance(object.to_string(), c.clone());
        self.cached(question, || {
            let addition = vec![(object.to_string(), c.negated_nnf())];
            let mut tableau = tableau::Tableau::new(&self.kb, &self.budget);
            Ok(!tableau.satisfiable(None, &addition)?)
        })
    }
}

impl KnowledgeSystem for TableauReasoner {
    fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    fn is_satisfiable(&self, c: &ConceptExpr) -> Result<bool, ReasonerError> {
        self.cached(Question::Satisfiable(c.clone()), || {
            let mut tableau = tableau::Tableau::new(&self.kb, &self.budget);
            tableau.satisfiable(Some(c), &[])
        })
    }

    fn is_subsumed(&self, c: &ConceptExpr, d: &ConceptExpr) -> Result<bool, ReasonerError> {
        Ok(!self.is_satisfiable(&ConceptExpr::and(c.clone(), d.negated_nnf()))?)
    }

    fn is_instance(&self, object: &str, c: &ConceptExpr) -> Result<bool, ReasonerError> {
        self.entails_instance(object, c)
    }

    fn are_equivalent_objects(&self, a: &str, b: &str) -> Result<bool, ReasonerError> {
        if a == b {
            return Ok(true);
        }
        self.entails_instance(a, &ConceptExpr::nominal(b))
    }

    fn query_instances(&self, c: &ConceptExpr) -> Result<Vec<String>, ReasonerError> {
        let mut out = Vec::new();
        for object in &self.kb.signature().objects {
            if self.entails_instance(object, c)? {
                out.push(object.clone());
            }
        }
        Ok(out)
    }

    fn query_role_successors(
        &self,
        object: &str,
        role: &RoleExpr,
    ) -> Result<Vec<String>, ReasonerError> {
        let mut out = Vec::new();
        for candidate in &self.kb.signature().objects {
            let reaches = ConceptExpr::exists(role.clone(), ConceptExpr::nominal(candidate));
            if self.entails_instance(object, &reaches)? {
                out.push(candidate.clone());
            }
        }
        Ok(out)
    }

    fn query_data_successors(
        &self,
        object: &str,
        role: &str,
    ) -> Result<Vec<PrimValue>, ReasonerError> {
        Ok(self.kb.asserted_data_values(object, role))
    }
}
