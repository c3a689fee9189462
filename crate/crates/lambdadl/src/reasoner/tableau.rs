//! Tableau engine for ALCOI knowledge-base consistency.
//!
//! Every entailment question is reduced to consistency of the knowledge
//! base extended with extra label constraints: a completion graph is
//! seeded with one nominal node per object-equivalence class and the
//! asserted role edges, TBox inclusions become universal constraints
//! added to every node label, and the graph is expanded under the usual
//! rules. Inverse roles are handled by reading edges in both directions
//! and termination comes from pairwise anywhere blocking. Nominal labels
//! force node merges (no unique name assumption), with the merged node's
//! anonymous subtree pruned.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::{Budget, ReasonerError};
use crate::kb::{Axiom, ConceptExpr, KnowledgeBase, NameAcc, PrimType, RoleExpr};

/// Concept assertions implied by the ABox. Data assertions `(a, v) : r`
/// carry no object-level content beyond `a : exists r.<tag of v>`, so they
/// are reduced to that form; the countermodel oracle uses the same
/// reduction so the two stay in agreement.
pub(crate) fn effective_concept_assertions(kb: &KnowledgeBase) -> Vec<(String, ConceptExpr)> {
    let mut out = Vec::new();
    for axiom in kb.abox() {
        match axiom {
            Axiom::ConceptAssertion { object, concept } => {
                out.push((object.clone(), concept.clone()));
            }
            Axiom::DataAssertion {
                subject,
                role,
                value,
            } => {
                out.push((
                    subject.clone(),
                    ConceptExpr::exists(
                        RoleExpr::atomic(role.clone()),
                        ConceptExpr::Datatype(value.prim_type()),
                    ),
                ));
            }
            _ => {}
        }
    }
    out
}

/// Universal constraints from the TBox: `C ⊑ D` holds everywhere exactly
/// when every element satisfies `¬C ⊔ D`.
pub(crate) fn global_constraints(kb: &KnowledgeBase) -> Vec<ConceptExpr> {
    kb.tbox()
        .iter()
        .filter_map(|axiom| match axiom {
            Axiom::Subsumption(l, r) => {
                let neg = l.negated_nnf();
                let pos = r.nnf();
                Some(match (&neg, &pos) {
                    (ConceptExpr::Bottom, _) => pos,
                    (_, ConceptExpr::Bottom) => neg,
                    _ => ConceptExpr::or(neg, pos),
                })
            }
            _ => None,
        })
        .collect()
}

/// Object-equivalence classes asserted in the ABox, as a map from object
/// to class representative.
pub(crate) fn equivalence_reps(kb: &KnowledgeBase) -> BTreeMap<String, String> {
    let mut rep: BTreeMap<String, String> = kb
        .signature()
        .objects
        .iter()
        .map(|o| (o.clone(), o.clone()))
        .collect();
    fn find(rep: &mut BTreeMap<String, String>, name: &str) -> String {
        let parent = rep.get(name).cloned().unwrap_or_else(|| name.to_string());
        if parent == name {
            return parent;
        }
        let root = find(rep, &parent);
        rep.insert(name.to_string(), root.clone());
        root
    }
    for axiom in kb.abox() {
        if let Axiom::ObjectEquivalence(a, b) = axiom {
            let ra = find(&mut rep, a);
            let rb = find(&mut rep, b);
            if ra != rb {
                let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
                rep.insert(drop, keep);
            }
        }
    }
    let names: Vec<String> = rep.keys().cloned().collect();
    for name in names {
        find(&mut rep, &name);
    }
    rep
}

#[derive(Clone)]
struct Node {
    label: BTreeSet<ConceptExpr>,
    parent: Option<usize>,
    /// Nominal nodes and the query root; exempt from blocking.
    is_root: bool,
    alive: bool,
}

#[derive(Clone, Default)]
struct Graph {
    nodes: Vec<Node>,
    /// Directed edges labeled with atomic role names.
    edges: BTreeSet<(usize, String, usize)>,
    /// Object name → its current node.
    object_node: BTreeMap<String, usize>,
}

impl Graph {
    fn create(&mut self, label: BTreeSet<ConceptExpr>, parent: Option<usize>, is_root: bool) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            label,
            parent,
            is_root,
            alive: true,
        });
        id
    }

    /// Neighbors reachable from `x` via the role expression, reading
    /// inverse roles against the edge direction.
    fn successors(&self, x: usize, role: &RoleExpr) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|(from, name, to)| {
                if name != &role.name {
                    return None;
                }
                if role.inverted {
                    (*to == x).then_some(*from)
                } else {
                    (*from == x).then_some(*to)
                }
            })
            .filter(|y| self.nodes[*y].alive)
            .collect()
    }

    fn add_edge(&mut self, from: usize, role: &RoleExpr, to: usize) {
        if role.inverted {
            self.edges.insert((to, role.name.clone(), from));
        } else {
            self.edges.insert((from, role.name.clone(), to));
        }
    }

    /// Signed role labels connecting `parent` to `child`.
    fn connection(&self, parent: usize, child: usize) -> BTreeSet<(String, bool)> {
        let mut conn = BTreeSet::new();
        for (from, name, to) in &self.edges {
            if *from == parent && *to == child {
                conn.insert((name.clone(), false));
            }
            if *from == child && *to == parent {
                conn.insert((name.clone(), true));
            }
        }
        conn
    }

    /// Merge `src` into `dst`: `src`'s anonymous subtree is discarded, its
    /// label and edges move to `dst`, and objects pointing at `src` are
    /// redirected.
    fn merge(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        self.prune_subtree(src);
        let src_label: Vec<ConceptExpr> = self.nodes[src].label.iter().cloned().collect();
        self.nodes[dst].label.extend(src_label);
        let moved: Vec<(usize, String, usize)> = self
            .edges
            .iter()
            .filter(|(from, _, to)| *from == src || *to == src)
            .cloned()
            .collect();
        for edge in moved {
            self.edges.remove(&edge);
            let (from, name, to) = edge;
            let from = if from == src { dst } else { from };
            let to = if to == src { dst } else { to };
            self.edges.insert((from, name, to));
        }
        let redirect: Vec<String> = self
            .object_node
            .iter()
            .filter(|(_, node)| **node == src)
            .map(|(name, _)| name.clone())
            .collect();
        for name in redirect {
            self.object_node.insert(name, dst);
        }
        self.nodes[dst].is_root |= self.nodes[src].is_root;
        self.nodes[src].alive = false;
    }

    /// Kill every strict descendant of `root` and drop their edges.
    fn prune_subtree(&mut self, root: usize) {
        let mut doomed = vec![root];
        let mut killed = BTreeSet::new();
        while let Some(current) = doomed.pop() {
            for id in 0..self.nodes.len() {
                if self.nodes[id].alive
                    && self.nodes[id].parent == Some(current)
                    && killed.insert(id)
                {
                    self.nodes[id].alive = false;
                    doomed.push(id);
                }
            }
        }
        self.edges
            .retain(|(from, _, to)| !killed.contains(from) && !killed.contains(to));
    }

    fn alive_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|id| self.nodes[*id].alive)
    }
}

enum Progress {
    Clash,
    Complete,
    Choice {
        node: usize,
        left: ConceptExpr,
        right: ConceptExpr,
    },
}

pub(crate) struct Tableau<'a> {
    kb: &'a KnowledgeBase,
    globals: Vec<ConceptExpr>,
    budget: &'a Budget,
    deadline: Instant,
    nodes_created: usize,
}

impl<'a> Tableau<'a> {
    pub(crate) fn new(kb: &'a KnowledgeBase, budget: &'a Budget) -> Self {
        Tableau {
            kb,
            globals: global_constraints(kb),
            budget,
            deadline: Instant::now() + budget.max_time,
            nodes_created: 0,
        }
    }

    /// Is the knowledge base, extended with per-object constraints and an
    /// optional fresh element constraint, consistent?
    pub(crate) fn satisfiable(
        &mut self,
        root_concept: Option<&ConceptExpr>,
        additions: &[(String, ConceptExpr)],
    ) -> Result<bool, ReasonerError> {
        let graph = self.base_graph(root_concept, additions)?;
        self.run(graph)
    }

    fn base_graph(
        &mut self,
        root_concept: Option<&ConceptExpr>,
        additions: &[(String, ConceptExpr)],
    ) -> Result<Graph, ReasonerError> {
        let mut graph = Graph::default();
        let reps = equivalence_reps(self.kb);

        // Objects mentioned by the question but absent from the signature
        // still need nodes for their nominals to resolve against.
        let mut extra = NameAcc::default();
        if let Some(c) = root_concept {
            c.collect_names(&mut extra);
        }
        for (_, c) in additions {
            c.collect_names(&mut extra);
        }

        let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for object in self.kb.signature().objects.iter().chain(
            extra
                .objects
                .iter()
                .filter(|o| !self.kb.is_object(o))
                .chain(additions.iter().map(|(o, _)| o).filter(|o| !self.kb.is_object(o))),
        ) {
            let rep = reps.get(object).cloned().unwrap_or_else(|| object.clone());
            let members = classes.entry(rep).or_default();
            if !members.contains(object) {
                members.push(object.clone());
            }
        }

        for (_, members) in classes {
            let mut label: BTreeSet<ConceptExpr> = self.globals.iter().cloned().collect();
            for member in &members {
                label.insert(ConceptExpr::Nominal(member.clone()));
            }
            let node = self.create_node(&mut graph, label, None, true)?;
            for member in &members {
                graph.object_node.insert(member.clone(), node);
            }
        }

        for (object, concept) in effective_concept_assertions(self.kb) {
            let node = graph.object_node[&object];
            graph.nodes[node].label.insert(concept.nnf());
        }
        for axiom in self.kb.abox() {
            if let Axiom::RoleAssertion {
                subject,
                object,
                role,
            } = axiom
            {
                let from = graph.object_node[subject];
                let to = graph.object_node[object];
                graph.add_edge(from, role, to);
            }
        }

        for (object, concept) in additions {
            let node = graph.object_node[object];
            graph.nodes[node].label.insert(concept.nnf());
        }
        if let Some(concept) = root_concept {
            let mut label: BTreeSet<ConceptExpr> = self.globals.iter().cloned().collect();
            label.insert(concept.nnf());
            self.create_node(&mut graph, label, None, true)?;
        }
        Ok(graph)
    }

    fn create_node(
        &mut self,
        graph: &mut Graph,
        label: BTreeSet<ConceptExpr>,
        parent: Option<usize>,
        is_root: bool,
    ) -> Result<usize, ReasonerError> {
        self.nodes_created += 1;
        if self.nodes_created > self.budget.max_nodes {
            return Err(ReasonerError::NodeBudget {
                limit: self.budget.max_nodes,
            });
        }
        Ok(graph.create(label, parent, is_root))
    }

    fn check_time(&self) -> Result<(), ReasonerError> {
        if Instant::now() > self.deadline {
            return Err(ReasonerError::TimeBudget {
                limit_ms: self.budget.max_time.as_millis() as u64,
            });
        }
        Ok(())
    }

    fn run(&mut self, graph: Graph) -> Result<bool, ReasonerError> {
        let mut stack = vec![graph];
        while let Some(mut graph) = stack.pop() {
            match self.expand(&mut graph)? {
                Progress::Clash => continue,
                Progress::Complete => return Ok(true),
                Progress::Choice { node, left, right } => {
                    let mut right_graph = graph.clone();
                    right_graph.nodes[node].label.insert(right);
                    stack.push(right_graph);
                    graph.nodes[node].label.insert(left);
                    stack.push(graph);
                }
            }
        }
        Ok(false)
    }

    /// Run deterministic rules to a fixpoint, generating witnesses before
    /// committing to any disjunction: clashes that only need propagation
    /// into fresh successors are then found without branching.
    fn expand(&mut self, graph: &mut Graph) -> Result<Progress, ReasonerError> {
        loop {
            self.check_time()?;
            if self.has_clash(graph) {
                return Ok(Progress::Clash);
            }
            if self.apply_and(graph) {
                continue;
            }
            if self.apply_nominal_merge(graph) {
                continue;
            }
            if self.apply_forall(graph) {
                continue;
            }
            if self.apply_bcp(graph) {
                continue;
            }
            if self.apply_exists(graph)? {
                continue;
            }
            if let Some(choice) = self.find_or(graph) {
                return Ok(choice);
            }
            return Ok(Progress::Complete);
        }
    }

    fn has_clash(&self, graph: &Graph) -> bool {
        for id in graph.alive_ids() {
            let label = &graph.nodes[id].label;
            if label.contains(&ConceptExpr::Bottom) {
                return true;
            }
            if label.contains(&ConceptExpr::Datatype(PrimType::Str))
                && label.contains(&ConceptExpr::Datatype(PrimType::Bool))
            {
                return true;
            }
            for concept in label {
                if let ConceptExpr::Not(inner) = concept {
                    if label.contains(inner) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn apply_and(&self, graph: &mut Graph) -> bool {
        let mut applied = false;
        for id in 0..graph.nodes.len() {
            if !graph.nodes[id].alive {
                continue;
            }
            let additions: Vec<ConceptExpr> = graph.nodes[id]
                .label
                .iter()
                .filter_map(|c| match c {
                    ConceptExpr::And(l, r) => {
                        let label = &graph.nodes[id].label;
                        if !label.contains(l.as_ref()) || !label.contains(r.as_ref()) {
                            Some(vec![l.as_ref().clone(), r.as_ref().clone()])
                        } else {
                            None
                        }
                    }
                    _ => None,
                })
                .flatten()
                .collect();
            for c in additions {
                applied |= graph.nodes[id].label.insert(c);
            }
        }
        applied
    }

    /// A node whose label contains `{o}` must be the node of `o`; merge
    /// when it is not. One merge per call.
    fn apply_nominal_merge(&self, graph: &mut Graph) -> bool {
        for id in graph.alive_ids().collect::<Vec<_>>() {
            let nominal = graph.nodes[id].label.iter().find_map(|c| match c {
                ConceptExpr::Nominal(o) if graph.object_node.get(o) != Some(&id) => Some(o.clone()),
                _ => None,
            });
            if let Some(object) = nominal {
                let target = graph.object_node[&object];
                let (dst, src) = if target < id { (target, id) } else { (id, target) };
                graph.merge(src, dst);
                return true;
            }
        }
        false
    }

    fn apply_forall(&self, graph: &mut Graph) -> bool {
        let mut additions: Vec<(usize, ConceptExpr)> = Vec::new();
        for id in graph.alive_ids() {
            for concept in &graph.nodes[id].label {
                if let ConceptExpr::Forall(role, filler) = concept {
                    for succ in graph.successors(id, role) {
                        if !graph.nodes[succ].label.contains(filler.as_ref()) {
                            additions.push((succ, filler.as_ref().clone()));
                        }
                    }
                }
            }
        }
        let mut applied = false;
        for (node, concept) in additions {
            applied |= graph.nodes[node].label.insert(concept);
        }
        applied
    }

    /// Disjunctions with one side already refuted in the label are
    /// decided deterministically instead of branching.
    fn apply_bcp(&self, graph: &mut Graph) -> bool {
        let mut additions: Vec<(usize, ConceptExpr)> = Vec::new();
        for id in graph.alive_ids() {
            let label = &graph.nodes[id].label;
            for concept in label {
                if let ConceptExpr::Or(l, r) = concept {
                    if label.contains(l.as_ref()) || label.contains(r.as_ref()) {
                        continue;
                    }
                    let refuted = |c: &ConceptExpr| {
                        *c == ConceptExpr::Bottom || label.contains(&c.negated_nnf())
                    };
                    match (refuted(l), refuted(r)) {
                        (true, false) => additions.push((id, r.as_ref().clone())),
                        (false, true) => additions.push((id, l.as_ref().clone())),
                        // Both sides refuted: surface the clash.
                        (true, true) => additions.push((id, ConceptExpr::Bottom)),
                        (false, false) => {}
                    }
                }
            }
        }
        let mut applied = false;
        for (node, concept) in additions {
            applied |= graph.nodes[node].label.insert(concept);
        }
        applied
    }

    fn find_or(&self, graph: &Graph) -> Option<Progress> {
        for id in graph.alive_ids() {
            for concept in &graph.nodes[id].label {
                if let ConceptExpr::Or(l, r) = concept {
                    let label = &graph.nodes[id].label;
                    if !label.contains(l.as_ref()) && !label.contains(r.as_ref()) {
                        return Some(Progress::Choice {
                            node: id,
                            left: l.as_ref().clone(),
                            right: r.as_ref().clone(),
                        });
                    }
                }
            }
        }
        None
    }

    fn apply_exists(&mut self, graph: &mut Graph) -> Result<bool, ReasonerError> {
        let blocked = self.blocked_nodes(graph);
        for id in graph.alive_ids().collect::<Vec<_>>() {
            if blocked.contains(&id) {
                continue;
            }
            let wanted: Vec<(RoleExpr, ConceptExpr)> = graph.nodes[id]
                .label
                .iter()
                .filter_map(|c| match c {
                    ConceptExpr::Exists(role, filler) => {
                        let witnessed = graph
                            .successors(id, role)
                            .into_iter()
                            .any(|y| graph.nodes[y].label.contains(filler.as_ref()));
                        (!witnessed).then(|| (role.clone(), filler.as_ref().clone()))
                    }
                    _ => None,
                })
                .collect();
            if let Some((role, filler)) = wanted.into_iter().next() {
                let mut label: BTreeSet<ConceptExpr> = self.globals.iter().cloned().collect();
                label.insert(filler);
                let fresh = self.create_node(graph, label, Some(id), false)?;
                graph.add_edge(id, &role, fresh);
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Pairwise anywhere blocking: an anonymous node with an anonymous
    /// parent is blocked by an earlier unblocked pair carrying the same two
    /// labels and the same connecting roles.
    fn blocked_nodes(&self, graph: &Graph) -> BTreeSet<usize> {
        let mut blocked = BTreeSet::new();
        let candidates: Vec<usize> = graph
            .alive_ids()
            .filter(|&id| {
                !graph.nodes[id].is_root
                    && graph.nodes[id]
                        .parent
                        .is_some_and(|p| graph.nodes[p].alive && !graph.nodes[p].is_root)
            })
            .collect();
        for &x in &candidates {
            let px = graph.nodes[x].parent.unwrap();
            for &y in &candidates {
                if y >= x || blocked.contains(&y) {
                    continue;
                }
                let py = graph.nodes[y].parent.unwrap();
                if graph.nodes[x].label == graph.nodes[y].label
                    && graph.nodes[px].label == graph.nodes[py].label
                    && graph.connection(px, x) == graph.connection(py, y)
                {
                    blocked.insert(x);
                    break;
                }
            }
        }
        blocked
    }
}
