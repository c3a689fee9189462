//! Knowledge-base data model: signatures, axioms, and the textual `.kb`
//! format for ALCOI(D) knowledge bases.
//!
//! A knowledge base is a pair of a TBox (terminology: concept inclusions)
//! and an ABox (assertions about objects), plus the signature of names the
//! axioms mention. Everything is immutable after construction.
//!
//! Concrete syntax, one axiom per production (whitespace-insensitive,
//! `//` line comments):
//!
//! ```text
//! C sub D                      concept inclusion
//! C equiv D                    concept equality (stored as two inclusions)
//! Domain(R, C)                 abbreviation for  exists R.Top sub C
//! Range(R, C)                  abbreviation for  Top sub forall R.C
//! a : C                        concept assertion
//! (a, b) : R                   role assertion (R may be `r` or `r^-`)
//! (a, "text") : r              data assertion (also `true`/`false`)
//! a = b                        object equivalence
//! ```
//!
//! Concepts: names, `Top`, `Bot`, `{a}`, `!C`, `C & D`, `C | D`,
//! `exists R.C`, `forall R.C`, `xsd:string`, `xsd:boolean`. Roles are
//! names with an optional `^-` inverse suffix. A role is a *data role*
//! when it has a `Range(..)` axiom with a datatype filler or a
//! literal-valued assertion; data roles and object roles are disjoint.

mod expr;
mod lex;
pub(crate) mod parse;

pub use expr::{ConceptExpr, NameAcc, PrimType, PrimValue, RoleExpr};
pub use lex::{line_col, Cursor, ParseError, Span, Token, TokenKind};
pub use parse::{parse_concept, parse_concept_str};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A terminological or assertional axiom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// `C ⊑ D`
    Subsumption(ConceptExpr, ConceptExpr),
    /// `C ≡ D`; expanded into the two inclusions when a knowledge base is
    /// built, so it never appears in a constructed TBox.
    ConceptEquality(ConceptExpr, ConceptExpr),
    /// `a : C`
    ConceptAssertion { object: String, concept: ConceptExpr },
    /// `(a, b) : R`
    RoleAssertion {
        subject: String,
        object: String,
        role: RoleExpr,
    },
    /// `(a, v) : r` for a literal `v`
    DataAssertion {
        subject: String,
        role: String,
        value: PrimValue,
    },
    /// `a ≡ b` on objects
    ObjectEquivalence(String, String),
}

impl Axiom {
    pub fn is_terminological(&self) -> bool {
        matches!(self, Axiom::Subsumption(..) | Axiom::ConceptEquality(..))
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Subsumption(l, r) => write!(f, "{l} sub {r}"),
            Axiom::ConceptEquality(l, r) => write!(f, "{l} equiv {r}"),
            Axiom::ConceptAssertion { object, concept } => write!(f, "{object} : {concept}"),
            Axiom::RoleAssertion {
                subject,
                object,
                role,
            } => write!(f, "({subject}, {object}) : {role}"),
            Axiom::DataAssertion {
                subject,
                role,
                value,
            } => write!(f, "({subject}, {value}) : {role}"),
            Axiom::ObjectEquivalence(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

/// The sets of names a knowledge base is built from. `roles` and
/// `data_roles` are disjoint, and every name an axiom mentions lands in
/// exactly one set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub data_roles: BTreeSet<String>,
    pub objects: BTreeSet<String>,
}

/// Errors from loading a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("semantic error: {message}")]
    Semantic { message: String },
}

impl KbError {
    fn semantic(message: impl Into<String>) -> Self {
        KbError::Semantic {
            message: message.into(),
        }
    }
}

/// An immutable ALCOI(D) knowledge base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    signature: Signature,
    tbox: Vec<Axiom>,
    abox: Vec<Axiom>,
    data_ranges: BTreeMap<String, PrimType>,
}

impl KnowledgeBase {
    /// Parse the textual format. The resulting signature is exactly the
    /// set of names the axioms mention, and axioms keep source order.
    pub fn parse(text: &str) -> Result<Self, KbError> {
        let axioms = parse::parse_axioms(text)?;
        Self::from_axioms(axioms)
    }

    /// Build a knowledge base from axioms, classifying names and
    /// validating the (D)-fragment restrictions. `ConceptEquality` is
    /// expanded into its two inclusions here.
    pub fn from_axioms(axioms: Vec<Axiom>) -> Result<Self, KbError> {
        let mut tbox = Vec::new();
        let mut abox = Vec::new();
        for axiom in axioms {
            match axiom {
                Axiom::ConceptEquality(l, r) => {
                    tbox.push(Axiom::Subsumption(l.clone(), r.clone()));
                    tbox.push(Axiom::Subsumption(r, l));
                }
                ax if ax.is_terminological() => tbox.push(ax),
                ax => abox.push(ax),
            }
        }

        let mut acc = NameAcc::default();
        let mut data_evidence: BTreeMap<String, Vec<PrimType>> = BTreeMap::new();
        let mut object_role_evidence: BTreeSet<String> = BTreeSet::new();

        for axiom in tbox.iter().chain(abox.iter()) {
            match axiom {
                Axiom::Subsumption(l, r) | Axiom::ConceptEquality(l, r) => {
                    l.collect_names(&mut acc);
                    r.collect_names(&mut acc);
                    // Range-style axiom with a datatype filler declares a
                    // data role.
                    if let (ConceptExpr::Top, ConceptExpr::Forall(role, filler)) = (l, r) {
                        if let ConceptExpr::Datatype(tag) = **filler {
                            if role.inverted {
                                return Err(KbError::semantic(format!(
                                    "range axiom on inverted role `{role}`"
                                )));
                            }
                            data_evidence.entry(role.name.clone()).or_default().push(tag);
                        }
                    }
                }
                Axiom::ConceptAssertion { object, concept } => {
                    acc.objects.insert(object.clone());
                    concept.collect_names(&mut acc);
                }
                Axiom::RoleAssertion {
                    subject,
                    object,
                    role,
                } => {
                    acc.objects.insert(subject.clone());
                    acc.objects.insert(object.clone());
                    acc.roles.insert(role.name.clone());
                    object_role_evidence.insert(role.name.clone());
                }
                Axiom::DataAssertion {
                    subject,
                    role,
                    value,
                } => {
                    acc.objects.insert(subject.clone());
                    acc.roles.insert(role.clone());
                    data_evidence
                        .entry(role.clone())
                        .or_default()
                        .push(value.prim_type());
                }
                Axiom::ObjectEquivalence(a, b) => {
                    acc.objects.insert(a.clone());
                    acc.objects.insert(b.clone());
                }
            }
        }

        let mut data_ranges = BTreeMap::new();
        for (role, tags) in &data_evidence {
            if object_role_evidence.contains(role) {
                return Err(KbError::semantic(format!(
                    "role `{role}` is used with both object and literal fillers"
                )));
            }
            let first = tags[0];
            if tags.iter().any(|t| *t != first) {
                return Err(KbError::semantic(format!(
                    "data role `{role}` mixes string and boolean values"
                )));
            }
            data_ranges.insert(role.clone(), first);
        }

        let data_roles: BTreeSet<String> = data_ranges.keys().cloned().collect();
        let roles: BTreeSet<String> = acc
            .roles
            .iter()
            .filter(|r| !data_roles.contains(*r))
            .cloned()
            .collect();

        for name in &acc.concepts {
            if acc.roles.contains(name) {
                return Err(KbError::semantic(format!(
                    "name `{name}` is used both as a concept and as a role"
                )));
            }
            if acc.objects.contains(name) {
                return Err(KbError::semantic(format!(
                    "name `{name}` is used both as a concept and as an object"
                )));
            }
        }
        for name in &acc.roles {
            if acc.objects.contains(name) {
                return Err(KbError::semantic(format!(
                    "name `{name}` is used both as a role and as an object"
                )));
            }
        }

        let signature = Signature {
            concepts: acc.concepts,
            roles,
            data_roles,
            objects: acc.objects,
        };

        let kb = KnowledgeBase {
            signature,
            tbox,
            abox,
            data_ranges,
        };
        for axiom in kb.tbox.iter().chain(kb.abox.iter()) {
            match axiom {
                Axiom::Subsumption(l, r) | Axiom::ConceptEquality(l, r) => {
                    kb.validate_concept(l)?;
                    kb.validate_concept(r)?;
                }
                Axiom::ConceptAssertion { concept, .. } => kb.validate_concept(concept)?,
                Axiom::RoleAssertion { role, .. } => {
                    if kb.signature.data_roles.contains(&role.name) {
                        return Err(KbError::semantic(format!(
                            "data role `{}` used as an object role",
                            role.name
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(kb)
    }

    /// Check the (D)-fragment restrictions on a concept against this KB:
    /// datatype leaves appear only as direct fillers of quantifiers over
    /// data roles, and data roles are never inverted or given object
    /// fillers.
    pub fn validate_concept(&self, concept: &ConceptExpr) -> Result<(), KbError> {
        match concept {
            ConceptExpr::Datatype(_) => Err(KbError::semantic(
                "datatype may only appear as the filler of a quantifier over a data role",
            )),
            ConceptExpr::Not(inner) => self.validate_concept(inner),
            ConceptExpr::And(l, r) | ConceptExpr::Or(l, r) => {
                self.validate_concept(l)?;
                self.validate_concept(r)
            }
            ConceptExpr::Exists(role, filler) | ConceptExpr::Forall(role, filler) => {
                let is_data = self.signature.data_roles.contains(&role.name);
                if is_data && role.inverted {
                    return Err(KbError::semantic(format!(
                        "data role `{}` cannot be inverted",
                        role.name
                    )));
                }
                match (is_data, filler.as_ref()) {
                    (true, ConceptExpr::Datatype(_)) | (true, ConceptExpr::Top) => Ok(()),
                    (true, other) => Err(KbError::semantic(format!(
                        "data role `{}` requires a datatype or Top filler, found `{other}`",
                        role.name
                    ))),
                    (false, ConceptExpr::Datatype(_)) => Err(KbError::semantic(format!(
                        "role `{}` has a datatype filler but is not declared as a data role \
                         (add a Range axiom or a literal assertion)",
                        role.name
                    ))),
                    (false, _) => self.validate_concept(filler),
                }
            }
            _ => Ok(()),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Terminological axioms, in source order. Only `Subsumption` after
    /// construction.
    pub fn tbox(&self) -> &[Axiom] {
        &self.tbox
    }

    /// Assertional axioms, in source order.
    pub fn abox(&self) -> &[Axiom] {
        &self.abox
    }

    /// The datatype of a data role, from its range axiom or its asserted
    /// literal values.
    pub fn data_range(&self, role: &str) -> Option<PrimType> {
        self.data_ranges.get(role).copied()
    }

    pub fn is_object(&self, name: &str) -> bool {
        self.signature.objects.contains(name)
    }

    /// Literal values asserted for `(object, role)`, sorted.
    pub fn asserted_data_values(&self, object: &str, role: &str) -> Vec<PrimValue> {
        let mut values: Vec<PrimValue> = self
            .abox
            .iter()
            .filter_map(|ax| match ax {
                Axiom::DataAssertion {
                    subject,
                    role: r,
                    value,
                } if subject == object && r == role => Some(value.clone()),
                _ => None,
            })
            .collect();
        values.sort();
        values
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axiom in self.tbox.iter().chain(self.abox.iter()) {
            writeln!(f, "{axiom}")?;
        }
        Ok(())
    }
}
