//! Bounded finite-model search, used as a one-sided oracle for the
//! tableau: a returned interpretation satisfies every KB axiom and
//! violates the goal, so the corresponding entailment must be `false`.
//! `None` only means "no countermodel up to the size bound" — models may
//! need larger or infinite universes, so it is *not* an entailment proof.

use std::collections::{BTreeMap, BTreeSet};

use crate::kb::{Axiom, ConceptExpr, KnowledgeBase, NameAcc, PrimType, RoleExpr};

/// Default universe-size bound for [`find_countermodel`].
pub const DEFAULT_ORACLE_BOUND: usize = 4;

/// An explicit interpretation over a finite universe `0..universe`.
///
/// Datatype membership is tracked as two marker pseudo-concepts keyed
/// `xsd:string` / `xsd:boolean` in `concept_map`, and data roles appear in
/// `role_map` like object roles; this mirrors how the tableau reduces the
/// (D) fragment. `object_map` is total on the objects of the KB under
/// test; two objects may share an element (no unique name assumption).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInterpretation {
    pub universe: usize,
    pub concept_map: BTreeMap<String, BTreeSet<usize>>,
    pub role_map: BTreeMap<String, BTreeSet<(usize, usize)>>,
    pub object_map: BTreeMap<String, usize>,
}

impl FiniteInterpretation {
    pub fn role_extension(&self, role: &RoleExpr) -> BTreeSet<(usize, usize)> {
        let base = self.role_map.get(&role.name).cloned().unwrap_or_default();
        if role.inverted {
            base.into_iter().map(|(a, b)| (b, a)).collect()
        } else {
            base
        }
    }

    /// The extension of a concept expression, by direct evaluation of the
    /// interpretation-based semantics.
    pub fn concept_extension(&self, concept: &ConceptExpr) -> BTreeSet<usize> {
        let all: BTreeSet<usize> = (0..self.universe).collect();
        match concept {
            ConceptExpr::Nominal(object) => self
                .object_map
                .get(object)
                .map(|e| [*e].into())
                .unwrap_or_default(),
            ConceptExpr::Atomic(name) => self.concept_map.get(name).cloned().unwrap_or_default(),
            ConceptExpr::Top => all,
            ConceptExpr::Bottom => BTreeSet::new(),
            ConceptExpr::Not(inner) => {
                let inner = self.concept_extension(inner);
                all.difference(&inner).copied().collect()
            }
            ConceptExpr::And(l, r) => {
                let l = self.concept_extension(l);
                let r = self.concept_extension(r);
                l.intersection(&r).copied().collect()
            }
            ConceptExpr::Or(l, r) => {
                let l = self.concept_extension(l);
                let r = self.concept_extension(r);
                l.union(&r).copied().collect()
            }
            ConceptExpr::Exists(role, filler) => {
                let pairs = self.role_extension(role);
                let filler = self.concept_extension(filler);
                all.into_iter()
                    .filter(|a| pairs.iter().any(|(x, y)| x == a && filler.contains(y)))
                    .collect()
            }
            ConceptExpr::Forall(role, filler) => {
                let pairs = self.role_extension(role);
                let filler = self.concept_extension(filler);
                all.into_iter()
                    .filter(|a| pairs.iter().all(|(x, y)| x != a || filler.contains(y)))
                    .collect()
            }
            ConceptExpr::Datatype(tag) => self
                .concept_map
                .get(tag.xsd_name())
                .cloned()
                .unwrap_or_default(),
        }
    }

    /// Truth of one axiom in this interpretation. Data assertions are
    /// checked in their reduced `a : exists r.<tag>` form.
    pub fn satisfies_axiom(&self, axiom: &Axiom) -> bool {
        match axiom {
            Axiom::Subsumption(l, r) => self
                .concept_extension(l)
                .is_subset(&self.concept_extension(r)),
            Axiom::ConceptEquality(l, r) => {
                self.concept_extension(l) == self.concept_extension(r)
            }
            Axiom::ConceptAssertion { object, concept } => match self.object_map.get(object) {
                Some(e) => self.concept_extension(concept).contains(e),
                None => false,
            },
            Axiom::RoleAssertion {
                subject,
                object,
                role,
            } => match (self.object_map.get(subject), self.object_map.get(object)) {
                (Some(a), Some(b)) => self.role_extension(role).contains(&(*a, *b)),
                _ => false,
            },
            Axiom::DataAssertion {
                subject,
                role,
                value,
            } => self.satisfies_axiom(&Axiom::ConceptAssertion {
                object: subject.clone(),
                concept: ConceptExpr::exists(
                    RoleExpr::atomic(role.clone()),
                    ConceptExpr::Datatype(value.prim_type()),
                ),
            }),
            Axiom::ObjectEquivalence(a, b) => {
                match (self.object_map.get(a), self.object_map.get(b)) {
                    (Some(x), Some(y)) => x == y,
                    _ => false,
                }
            }
        }
    }

    pub fn is_model_of(&self, kb: &KnowledgeBase) -> bool {
        kb.tbox()
            .iter()
            .chain(kb.abox().iter())
            .all(|ax| self.satisfies_axiom(ax))
    }
}

/// Search for an interpretation of universe size `1..=max_size` that is a
/// model of `kb` but falsifies `goal`. Exhaustive up to the bound and
/// deterministic; the first interpretation in enumeration order wins.
pub fn find_countermodel(
    kb: &KnowledgeBase,
    goal: &Axiom,
    max_size: usize,
) -> Option<FiniteInterpretation> {
    let search = Search::new(kb, goal);
    for n in 1..=max_size {
        if let Some(model) = search.run(n) {
            debug_assert!(model.is_model_of(kb) && !model.satisfies_axiom(goal));
            return Some(model);
        }
    }
    None
}

struct Search {
    concepts: Vec<String>,
    roles: Vec<String>,
    objects: Vec<String>,
    /// (axiom, required truth value)
    constraints: Vec<(Axiom, bool)>,
}

struct Partial {
    n: usize,
    /// object index → element
    placement: Vec<usize>,
    /// concept index → element → membership
    concept_bits: Vec<Vec<Option<bool>>>,
    /// role index → from * n + to → membership
    role_bits: Vec<Vec<Option<bool>>>,
}

#[derive(Clone, Copy, Debug)]
enum Var {
    Concept(usize, usize),
    Role(usize, usize, usize),
}

/// Three-valued truth under a partial assignment; `Unknown` carries the
/// first unassigned variable the value hinges on, which is the variable
/// the search splits on next.
#[derive(Clone, Copy)]
enum Ev {
    Known(bool),
    Unknown(Var),
}

impl Ev {
    fn negate(self) -> Ev {
        match self {
            Ev::Known(b) => Ev::Known(!b),
            unknown => unknown,
        }
    }
}

fn and_ev(a: Ev, b: Ev) -> Ev {
    match (a, b) {
        (Ev::Known(false), _) | (_, Ev::Known(false)) => Ev::Known(false),
        (Ev::Known(true), x) | (x, Ev::Known(true)) => x,
        (unknown @ Ev::Unknown(_), _) => unknown,
    }
}

fn or_ev(a: Ev, b: Ev) -> Ev {
    match (a, b) {
        (Ev::Known(true), _) | (_, Ev::Known(true)) => Ev::Known(true),
        (Ev::Known(false), x) | (x, Ev::Known(false)) => x,
        (unknown @ Ev::Unknown(_), _) => unknown,
    }
}

impl Search {
    fn new(kb: &KnowledgeBase, goal: &Axiom) -> Self {
        let mut acc = NameAcc::default();
        let collect_axiom = |axiom: &Axiom, acc: &mut NameAcc| match axiom {
            Axiom::Subsumption(l, r) | Axiom::ConceptEquality(l, r) => {
                l.collect_names(acc);
                r.collect_names(acc);
            }
            Axiom::ConceptAssertion { object, concept } => {
                acc.objects.insert(object.clone());
                concept.collect_names(acc);
            }
            Axiom::RoleAssertion {
                subject,
                object,
                role,
            } => {
                acc.objects.insert(subject.clone());
                acc.objects.insert(object.clone());
                acc.roles.insert(role.name.clone());
            }
            Axiom::DataAssertion { subject, role, .. } => {
                acc.objects.insert(subject.clone());
                acc.roles.insert(role.clone());
            }
            Axiom::ObjectEquivalence(a, b) => {
                acc.objects.insert(a.clone());
                acc.objects.insert(b.clone());
            }
        };
        for axiom in kb.tbox().iter().chain(kb.abox().iter()) {
            collect_axiom(axiom, &mut acc);
        }
        collect_axiom(goal, &mut acc);
        acc.concepts.extend(kb.signature().concepts.iter().cloned());
        acc.roles.extend(kb.signature().roles.iter().cloned());
        acc.roles.extend(kb.signature().data_roles.iter().cloned());
        acc.objects.extend(kb.signature().objects.iter().cloned());

        let uses_datatypes = kb
            .tbox()
            .iter()
            .chain(kb.abox().iter())
            .chain(std::iter::once(goal))
            .any(mentions_datatype);
        let mut concepts: Vec<String> = acc.concepts.into_iter().collect();
        let mut constraints: Vec<(Axiom, bool)> = Vec::new();
        if uses_datatypes {
            concepts.push(PrimType::Str.xsd_name().to_string());
            concepts.push(PrimType::Bool.xsd_name().to_string());
            // The two datatype value spaces are disjoint.
            constraints.push((
                Axiom::Subsumption(
                    ConceptExpr::and(
                        ConceptExpr::Datatype(PrimType::Str),
                        ConceptExpr::Datatype(PrimType::Bool),
                    ),
                    ConceptExpr::Bottom,
                ),
                true,
            ));
        }
        for axiom in kb.tbox().iter().chain(kb.abox().iter()) {
            constraints.push((axiom.clone(), true));
        }
        constraints.push((goal.clone(), false));

        Search {
            concepts,
            roles: acc.roles.into_iter().collect(),
            objects: acc.objects.into_iter().collect(),
            constraints,
        }
    }

    fn run(&self, n: usize) -> Option<FiniteInterpretation> {
        let mut placement = vec![0usize; self.objects.len()];
        self.place(n, &mut placement, 0)
    }

    /// Enumerate object placements as restricted growth strings (the first
    /// object lands on element 0 and each later object on a used element
    /// or the next fresh one), which skips isomorphic relabelings.
    fn place(&self, n: usize, placement: &mut Vec<usize>, idx: usize) -> Option<FiniteInterpretation> {
        if idx == self.objects.len() {
            let mut partial = Partial {
                n,
                placement: placement.clone(),
                concept_bits: vec![vec![None; n]; self.concepts.len()],
                role_bits: vec![vec![None; n * n]; self.roles.len()],
            };
            return self.assign(&mut partial);
        }
        let used = placement[..idx].iter().copied().max().map_or(0, |m| m + 1);
        for elem in 0..=used.min(n - 1) {
            placement[idx] = elem;
            if let Some(model) = self.place(n, placement, idx + 1) {
                return Some(model);
            }
        }
        None
    }

    /// Split on the first variable some undetermined constraint hinges
    /// on; variables no constraint cares about are never branched and
    /// default to `false` in the frozen model.
    fn assign(&self, partial: &mut Partial) -> Option<FiniteInterpretation> {
        let var = match self.status(partial) {
            Status::Violated => return None,
            Status::Satisfied => return Some(self.freeze(partial)),
            Status::Open(var) => var,
        };
        for value in [false, true] {
            match var {
                Var::Concept(c, e) => partial.concept_bits[c][e] = Some(value),
                Var::Role(r, from, to) => {
                    partial.role_bits[r][from * partial.n + to] = Some(value)
                }
            }
            if let Some(model) = self.assign(partial) {
                return Some(model);
            }
        }
        match var {
            Var::Concept(c, e) => partial.concept_bits[c][e] = None,
            Var::Role(r, from, to) => partial.role_bits[r][from * partial.n + to] = None,
        }
        None
    }

    fn status(&self, partial: &Partial) -> Status {
        let mut open: Option<Var> = None;
        for (axiom, required) in &self.constraints {
            match self.eval_axiom(partial, axiom) {
                Ev::Known(actual) if actual != *required => return Status::Violated,
                Ev::Known(_) => {}
                Ev::Unknown(var) => {
                    if open.is_none() {
                        open = Some(var);
                    }
                }
            }
        }
        match open {
            Some(var) => Status::Open(var),
            None => Status::Satisfied,
        }
    }

    /// Fill undetermined bits with `false`; constraints already hold for
    /// every completion when this is called.
    fn freeze(&self, partial: &Partial) -> FiniteInterpretation {
        let mut concept_map: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (c, name) in self.concepts.iter().enumerate() {
            let members: BTreeSet<usize> = (0..partial.n)
                .filter(|e| partial.concept_bits[c][*e] == Some(true))
                .collect();
            concept_map.insert(name.clone(), members);
        }
        let mut role_map: BTreeMap<String, BTreeSet<(usize, usize)>> = BTreeMap::new();
        for (r, name) in self.roles.iter().enumerate() {
            let mut pairs = BTreeSet::new();
            for from in 0..partial.n {
                for to in 0..partial.n {
                    if partial.role_bits[r][from * partial.n + to] == Some(true) {
                        pairs.insert((from, to));
                    }
                }
            }
            role_map.insert(name.clone(), pairs);
        }
        let object_map = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), partial.placement[i]))
            .collect();
        FiniteInterpretation {
            universe: partial.n,
            concept_map,
            role_map,
            object_map,
        }
    }

    fn object_elem(&self, partial: &Partial, name: &str) -> Option<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .map(|i| partial.placement[i])
    }

    fn eval_axiom(&self, partial: &Partial, axiom: &Axiom) -> Ev {
        match axiom {
            Axiom::Subsumption(l, r) => {
                let mut acc = Ev::Known(true);
                for e in 0..partial.n {
                    let implication = or_ev(
                        self.eval_member(partial, l, e).negate(),
                        self.eval_member(partial, r, e),
                    );
                    acc = and_ev(acc, implication);
                    if let Ev::Known(false) = acc {
                        return acc;
                    }
                }
                acc
            }
            Axiom::ConceptEquality(l, r) => and_ev(
                self.eval_axiom(partial, &Axiom::Subsumption(l.clone(), r.clone())),
                self.eval_axiom(partial, &Axiom::Subsumption(r.clone(), l.clone())),
            ),
            Axiom::ConceptAssertion { object, concept } => {
                match self.object_elem(partial, object) {
                    Some(e) => self.eval_member(partial, concept, e),
                    None => Ev::Known(false),
                }
            }
            Axiom::RoleAssertion {
                subject,
                object,
                role,
            } => match (
                self.object_elem(partial, subject),
                self.object_elem(partial, object),
            ) {
                (Some(a), Some(b)) => self.eval_pair(partial, role, a, b),
                _ => Ev::Known(false),
            },
            Axiom::DataAssertion {
                subject,
                role,
                value,
            } => self.eval_axiom(
                partial,
                &Axiom::ConceptAssertion {
                    object: subject.clone(),
                    concept: ConceptExpr::exists(
                        RoleExpr::atomic(role.clone()),
                        ConceptExpr::Datatype(value.prim_type()),
                    ),
                },
            ),
            Axiom::ObjectEquivalence(a, b) => match (
                self.object_elem(partial, a),
                self.object_elem(partial, b),
            ) {
                (Some(x), Some(y)) => Ev::Known(x == y),
                _ => Ev::Known(false),
            },
        }
    }

    fn eval_pair(&self, partial: &Partial, role: &RoleExpr, a: usize, b: usize) -> Ev {
        let Some(idx) = self.roles.iter().position(|r| *r == role.name) else {
            return Ev::Known(false);
        };
        let (from, to) = if role.inverted { (b, a) } else { (a, b) };
        match partial.role_bits[idx][from * partial.n + to] {
            Some(value) => Ev::Known(value),
            None => Ev::Unknown(Var::Role(idx, from, to)),
        }
    }

    fn eval_member(&self, partial: &Partial, concept: &ConceptExpr, e: usize) -> Ev {
        match concept {
            ConceptExpr::Nominal(object) => {
                Ev::Known(self.object_elem(partial, object) == Some(e))
            }
            ConceptExpr::Atomic(name) => match self.concepts.iter().position(|c| c == name) {
                Some(idx) => match partial.concept_bits[idx][e] {
                    Some(value) => Ev::Known(value),
                    None => Ev::Unknown(Var::Concept(idx, e)),
                },
                None => Ev::Known(false),
            },
            ConceptExpr::Datatype(tag) => {
                self.eval_member(partial, &ConceptExpr::Atomic(tag.xsd_name().into()), e)
            }
            ConceptExpr::Top => Ev::Known(true),
            ConceptExpr::Bottom => Ev::Known(false),
            ConceptExpr::Not(inner) => self.eval_member(partial, inner, e).negate(),
            ConceptExpr::And(l, r) => and_ev(
                self.eval_member(partial, l, e),
                self.eval_member(partial, r, e),
            ),
            ConceptExpr::Or(l, r) => or_ev(
                self.eval_member(partial, l, e),
                self.eval_member(partial, r, e),
            ),
            ConceptExpr::Exists(role, filler) => {
                let mut acc = Ev::Known(false);
                for f in 0..partial.n {
                    let witness = and_ev(
                        self.eval_pair(partial, role, e, f),
                        self.eval_member(partial, filler, f),
                    );
                    acc = or_ev(acc, witness);
                    if let Ev::Known(true) = acc {
                        return acc;
                    }
                }
                acc
            }
            ConceptExpr::Forall(role, filler) => {
                let mut violated = Ev::Known(false);
                for f in 0..partial.n {
                    let violation = and_ev(
                        self.eval_pair(partial, role, e, f),
                        self.eval_member(partial, filler, f).negate(),
                    );
                    violated = or_ev(violated, violation);
                    if let Ev::Known(true) = violated {
                        break;
                    }
                }
                violated.negate()
            }
        }
    }
}

enum Status {
    Violated,
    Satisfied,
    Open(Var),
}

fn mentions_datatype(axiom: &Axiom) -> bool {
    fn in_concept(c: &ConceptExpr) -> bool {
        match c {
            ConceptExpr::Datatype(_) => true,
            ConceptExpr::Not(inner) => in_concept(inner),
            ConceptExpr::And(l, r) | ConceptExpr::Or(l, r) => in_concept(l) || in_concept(r),
            ConceptExpr::Exists(_, filler) | ConceptExpr::Forall(_, filler) => in_concept(filler),
            _ => false,
        }
    }
    match axiom {
        Axiom::Subsumption(l, r) | Axiom::ConceptEquality(l, r) => in_concept(l) || in_concept(r),
        Axiom::ConceptAssertion { concept, .. } => in_concept(concept),
        Axiom::DataAssertion { .. } => true,
        _ => false,
    }
}
