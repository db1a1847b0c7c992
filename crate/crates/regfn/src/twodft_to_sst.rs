//! From a two-way transducer to an equivalent copyless SST.
//!
//! The SST tracks, per input prefix, the right-to-right runs of the two-way
//! machine over that prefix: which starting states have merged into a common
//! run, in which order, and what each merged segment has produced. Merges
//! form a rooted forest over sets of states — two states share an ancestor
//! exactly when their runs have met — and one variable per forest vertex
//! stores the production of the run segment between merges. Reading a letter
//! replays the local transitions on top of the forest and reduces the result
//! back to a forest, which yields a copyless variable update.
//!
//! The construction needs the two-way machine in a normal form: it must
//! start on the right endmarker and emit nothing on the left one.
//! [`normalize_2dft`] puts any machine into that form by adding a rewind
//! state and deferring left-endmarker outputs onto the following step.

use crate::machines::substitution::{OutputExpr, Piece, Substitution};
use crate::machines::twodft::StartSide;
use crate::machines::{fresh_name, Move, Sst, State, Symbol, Tape, TwoDft, Var, Word};
use std::collections::{BTreeMap, BTreeSet};

/// A forest vertex: a non-empty set of states whose runs have merged.
pub type VertexSet = BTreeSet<State>;

/// A rooted forest over subsets of states. The edge relation is implied:
/// the parent of a vertex is the smallest vertex strictly containing it, so
/// the vertex set alone determines the forest.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct MergeForest {
    pub vertices: BTreeSet<VertexSet>,
}

impl MergeForest {
    pub fn parent(&self, v: &VertexSet) -> Option<&VertexSet> {
        self.vertices
            .iter()
            .filter(|u| *u != v && u.is_superset(v))
            .min_by_key(|u| u.len())
    }

    pub fn roots(&self) -> Vec<&VertexSet> {
        self.vertices
            .iter()
            .filter(|v| self.parent(v).is_none())
            .collect()
    }

    /// The smallest vertex containing `q`, the entry point of `q`'s run.
    pub fn smallest_containing(&self, q: &str) -> Option<&VertexSet> {
        self.vertices
            .iter()
            .filter(|v| v.contains(q))
            .min_by_key(|v| v.len())
    }

    /// Vertices from `v` to its root, following parents.
    pub fn path_to_root<'a>(&'a self, v: &'a VertexSet) -> Vec<&'a VertexSet> {
        let mut path = vec![v];
        let mut current = v;
        while let Some(p) = self.parent(current) {
            path.push(p);
            current = p;
        }
        path
    }

    /// Vertices in canonical label order: by size, then lexicographically.
    pub fn canonical_order(&self) -> Vec<&VertexSet> {
        let mut order: Vec<&VertexSet> = self.vertices.iter().collect();
        order.sort_by_key(|v| (v.len(), (*v).clone()));
        order
    }

    /// Roots pairwise disjoint, and each vertex's sons pairwise disjoint.
    pub fn is_well_formed(&self) -> bool {
        let mut by_parent: BTreeMap<Option<&VertexSet>, Vec<&VertexSet>> = BTreeMap::new();
        for v in &self.vertices {
            if v.is_empty() {
                return false;
            }
            by_parent.entry(self.parent(v)).or_default().push(v);
        }
        by_parent.values().all(|siblings| {
            let mut seen: BTreeSet<&State> = BTreeSet::new();
            siblings.iter().all(|v| v.iter().all(|q| seen.insert(q)))
        })
    }
}

/// An SST state of the construction: the merge forest of the prefix read so
/// far together with the exit state of each tree's merged run.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ForestState {
    pub forest: MergeForest,
    /// Keyed by root vertex; injective.
    pub phi: BTreeMap<VertexSet, State>,
}

impl ForestState {
    /// Exit state of the tree containing `v`.
    pub fn exit_of(&self, v: &VertexSet) -> Option<&State> {
        let root = *self.forest.path_to_root(v).last().unwrap();
        self.phi.get(root)
    }
}

/// Result of reading one tape cell: the successor state and the copyless
/// update rewriting the old vertex variables into the new ones.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub next: ForestState,
    pub update: Substitution,
}

/// Variable pool used by the construction: `X1`, `X2`, ...
pub fn variable_pool(n: usize) -> Vec<Var> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

fn label_of(order: &[&VertexSet], v: &VertexSet) -> Var {
    let rank = order
        .iter()
        .position(|u| *u == v)
        .expect("vertex missing from its own forest");
    format!("X{}", rank + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Old(VertexSet),
    In(State),
    Out(State),
}

/// Replays the transitions at one tape cell on top of a forest state.
///
/// In-copies of the states are wired to the old forest (a left move dives
/// into the stored prefix at the smallest vertex containing the target), the
/// unique forward path from each node is followed, and nodes reached by the
/// same set of entering states collapse into one new vertex whose variable
/// collects the labels and outputs along the collapsed segment.
pub fn forest_step(state: &ForestState, cell: &Tape, t: &TwoDft) -> StepResult {
    let old_order = state.forest.canonical_order();
    let mut next_node: BTreeMap<Node, Node> = BTreeMap::new();
    let mut labels: BTreeMap<Node, OutputExpr> = BTreeMap::new();

    for v in &state.forest.vertices {
        let node = Node::Old(v.clone());
        labels.insert(node.clone(), vec![Piece::Var(label_of(&old_order, v))]);
        match state.forest.parent(v) {
            Some(p) => {
                next_node.insert(node, Node::Old(p.clone()));
            }
            None => {
                let exit = state.phi.get(v).expect("every root carries an exit state");
                next_node.insert(node, Node::In(exit.clone()));
            }
        }
    }
    for p in &t.states {
        let Some((out, q, mv)) = t.step(p, cell) else {
            continue;
        };
        let node = Node::In(p.clone());
        labels.insert(
            node.clone(),
            out.iter().cloned().map(Piece::Letter).collect(),
        );
        let target = match mv {
            Move::Right => Some(Node::Out(q.clone())),
            Move::Stay => Some(Node::In(q.clone())),
            Move::Left => state
                .forest
                .smallest_containing(q)
                .map(|v| Node::Old(v.clone())),
        };
        if let Some(target) = target {
            next_node.insert(node, target);
        }
    }

    // exit state of the unique forward path, None on a cycle or dead end
    let walk = |from: &Node| -> Option<(Vec<Node>, State)> {
        let mut path = Vec::new();
        let mut seen: BTreeSet<Node> = BTreeSet::new();
        let mut current = from.clone();
        loop {
            if !seen.insert(current.clone()) {
                return None;
            }
            path.push(current.clone());
            if let Node::Out(q) = &current {
                return Some((path, q.clone()));
            }
            current = next_node.get(&current)?.clone();
        }
    };

    let mut in_sets: BTreeMap<Node, VertexSet> = BTreeMap::new();
    for p in &t.states {
        if let Some((path, _)) = walk(&Node::In(p.clone())) {
            for node in path {
                in_sets.entry(node).or_default().insert(p.clone());
            }
        }
    }
    let mut exits: BTreeMap<VertexSet, State> = BTreeMap::new();
    let mut segment_nodes: BTreeMap<VertexSet, Vec<Node>> = BTreeMap::new();
    for p in &t.states {
        let start = Node::In(p.clone());
        if !in_sets.contains_key(&start) {
            continue;
        }
        let (path, exit) = walk(&start).expect("walk succeeded above");
        for node in path {
            let set = in_sets[&node].clone();
            exits.insert(set.clone(), exit.clone());
            let nodes = segment_nodes.entry(set).or_default();
            if !nodes.contains(&node) {
                nodes.push(node);
            }
        }
    }

    let forest = MergeForest {
        vertices: segment_nodes.keys().cloned().collect(),
    };
    assert!(
        forest.is_well_formed(),
        "step produced an ill-formed forest: {forest:?}"
    );
    assert!(
        forest.vertices.len() < 2 * t.states.len().max(1),
        "forest exceeded the vertex bound"
    );

    let mut phi = BTreeMap::new();
    for root in forest.roots() {
        phi.insert(root.clone(), exits[root].clone());
    }
    let distinct: BTreeSet<&State> = phi.values().collect();
    assert_eq!(distinct.len(), phi.len(), "exit map is not injective");

    let new_order = forest.canonical_order();
    let pool_size = 2 * t.states.len().max(1) - 1;
    let mut update = Substitution::blank(&variable_pool(pool_size));
    for (set, nodes) in &segment_nodes {
        let mut image = Vec::new();
        for node in nodes {
            image.extend(labels.get(node).cloned().unwrap_or_default());
        }
        update.set(label_of(&new_order, set), image);
    }
    assert!(update.is_copyless(), "step produced a copying update");

    let next = ForestState { forest, phi };
    StepResult { next, update }
}

/// All reachable states of the construction, with transitions, updates, and
/// the output expression of each accepting state.
#[derive(Debug, Clone)]
pub struct Exploration {
    pub states: Vec<ForestState>,
    pub transitions: BTreeMap<(usize, Symbol), (usize, Substitution)>,
    pub outputs: BTreeMap<usize, OutputExpr>,
    pub max_vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ForestError {
    #[error("exploration exceeded the {bound} reachable-state bound")]
    StateCapExceeded { bound: u64 },
}

/// Output expression of a state: the run of the machine's initial state
/// dropped on the right endmarker, unfolded symbolically. Stay-moves emit
/// and continue; a left move dives into the stored prefix and resurfaces at
/// the exit state of the entered tree, producing that tree's label path. The
/// state is accepting when the walk reaches a final state back on the
/// endmarker before repeating a state there.
fn end_closure(state: &ForestState, t: &TwoDft) -> Option<OutputExpr> {
    let order = state.forest.canonical_order();
    let mut expr: OutputExpr = Vec::new();
    let mut current = t.initial.clone();
    let mut seen: BTreeSet<State> = BTreeSet::new();
    loop {
        if t.finals.contains(&current) {
            return Some(expr);
        }
        if !seen.insert(current.clone()) {
            return None;
        }
        let (out, q, mv) = t.step(&current, &Tape::End)?;
        expr.extend(out.iter().cloned().map(Piece::Letter));
        match mv {
            Move::Stay => current = q.clone(),
            Move::Left => {
                let entry = state.forest.smallest_containing(q)?;
                for v in state.forest.path_to_root(entry) {
                    expr.push(Piece::Var(label_of(&order, v)));
                }
                current = state.exit_of(entry)?.clone();
            }
            Move::Right => return None,
        }
    }
}

/// Explores every forest state reachable from the post-endmarker start.
pub fn explore(t: &TwoDft) -> Result<Exploration, ForestError> {
    let n = t.states.len() as u64;
    let bound = (2 * n).saturating_pow(2 * n.min(16) as u32);
    let seed = forest_step(&ForestState::default(), &Tape::Begin, t);
    assert!(
        seed.update.images().all(|(_, image)| image.is_empty()),
        "left-endmarker step must not produce output; normalize first"
    );
    let mut states = vec![seed.next];
    let mut index: BTreeMap<ForestState, usize> = BTreeMap::new();
    index.insert(states[0].clone(), 0);
    let mut transitions = BTreeMap::new();
    let mut frontier = 0;
    while frontier < states.len() {
        let current = states[frontier].clone();
        for a in t.input.symbols() {
            let step = forest_step(&current, &Tape::Letter(a.clone()), t);
            let target = match index.get(&step.next) {
                Some(&i) => i,
                None => {
                    if states.len() as u64 >= bound {
                        return Err(ForestError::StateCapExceeded { bound });
                    }
                    let i = states.len();
                    states.push(step.next.clone());
                    index.insert(step.next.clone(), i);
                    i
                }
            };
            transitions.insert((frontier, a.clone()), (target, step.update));
        }
        frontier += 1;
    }
    let mut outputs = BTreeMap::new();
    for (i, state) in states.iter().enumerate() {
        if let Some(expr) = end_closure(state, t) {
            outputs.insert(i, expr);
        }
    }
    let max_vertices = states
        .iter()
        .map(|s| s.forest.vertices.len())
        .max()
        .unwrap_or(0);
    Ok(Exploration {
        states,
        transitions,
        outputs,
        max_vertices,
    })
}

/// Rewrites `t` into the normal form the construction expects: the run
/// starts on the right endmarker and left-endmarker transitions emit
/// nothing. Machines already in normal form are returned unchanged.
///
/// Stay-chains on the left endmarker are resolved into a single
/// right-moving transition; a chain output `v` is deferred into an annotated
/// copy of the successor state that prepends `v` to its next emission. When
/// such a copy sits on the right endmarker with an accepting original, a
/// fresh accepting sink takes the deferred output first.
pub fn normalize_2dft(t: &TwoDft) -> TwoDft {
    let begin_outputs_empty = t
        .delta
        .iter()
        .all(|((_, cell), (out, _, _))| *cell != Tape::Begin || out.is_empty());
    if t.start_side == StartSide::Right && begin_outputs_empty {
        return t.clone();
    }

    // resolve stay-chains on the left endmarker: (accumulated output, state
    // entered at position 1)
    let resolve = |p: &State| -> Option<(Word, State)> {
        let mut produced: Word = Vec::new();
        let mut current = p.clone();
        let mut seen = BTreeSet::new();
        loop {
            if !seen.insert(current.clone()) {
                return None;
            }
            let (out, q, mv) = t.step(&current, &Tape::Begin)?;
            produced.extend(out.iter().cloned());
            match mv {
                Move::Right => return Some((produced, q.clone())),
                Move::Stay => current = q.clone(),
                Move::Left => return None,
            }
        }
    };

    let mut states = t.states.clone();
    let mut finals = t.finals.clone();
    let mut delta: BTreeMap<(State, Tape), (Word, State, Move)> = t
        .delta
        .iter()
        .filter(|((_, cell), _)| *cell != Tape::Begin)
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();

    let mut accept_sink: Option<State> = None;
    let mut pending: BTreeMap<(State, Word), State> = BTreeMap::new();
    let mut queue: Vec<(State, Word)> = Vec::new();

    for p in &t.states {
        if let Some((v, q)) = resolve(p) {
            let target = if v.is_empty() {
                q.clone()
            } else if let Some(name) = pending.get(&(q.clone(), v.clone())) {
                name.clone()
            } else {
                let name = fresh_name(&format!("{q}+{}", v.concat()), &states);
                states.push(name.clone());
                pending.insert((q.clone(), v.clone()), name.clone());
                queue.push((q.clone(), v.clone()));
                name
            };
            delta.insert((p.clone(), Tape::Begin), (vec![], target, Move::Right));
        }
    }

    while let Some((q, v)) = queue.pop() {
        let name = pending[&(q.clone(), v.clone())].clone();
        for a in t.input.symbols() {
            if let Some((out, r, mv)) = t.step(&q, &Tape::Letter(a.clone())) {
                let mut written = v.clone();
                written.extend(out.iter().cloned());
                delta.insert(
                    (name.clone(), Tape::letter(a.clone())),
                    (written, r.clone(), *mv),
                );
            }
        }
        if t.finals.contains(&q) {
            let sink = accept_sink
                .get_or_insert_with(|| {
                    let s = fresh_name("acc", &states);
                    states.push(s.clone());
                    finals.insert(s.clone());
                    s
                })
                .clone();
            delta.insert((name.clone(), Tape::End), (v.clone(), sink, Move::Stay));
        } else if let Some((out, r, mv)) = t.step(&q, &Tape::End) {
            let mut written = v.clone();
            written.extend(out.iter().cloned());
            delta.insert((name.clone(), Tape::End), (written, r.clone(), *mv));
        }
    }

    let initial = match t.start_side {
        StartSide::Right => t.initial.clone(),
        StartSide::Left => {
            let rewind = fresh_name("rw", &states);
            states.push(rewind.clone());
            for a in t.input.symbols() {
                delta.insert(
                    (rewind.clone(), Tape::letter(a.clone())),
                    (vec![], rewind.clone(), Move::Left),
                );
            }
            delta.insert(
                (rewind.clone(), Tape::End),
                (vec![], rewind.clone(), Move::Left),
            );
            if let Some(begin_rule) = delta.get(&(t.initial.clone(), Tape::Begin)).cloned() {
                delta.insert((rewind.clone(), Tape::Begin), begin_rule);
            }
            rewind
        }
    };

    TwoDft {
        input: t.input.clone(),
        output: t.output.clone(),
        states,
        initial,
        finals,
        delta,
        start_side: StartSide::Right,
    }
}

/// The full conversion: normalize, explore the forest states, and assemble
/// the copyless SST over the variables that reachable forests actually use.
pub fn twodft_to_copyless_sst(t: &TwoDft) -> Result<Sst, ForestError> {
    let normalized = normalize_2dft(t);
    let exploration = explore(&normalized)?;
    Ok(assemble(&exploration, t))
}

fn assemble(exploration: &Exploration, original: &TwoDft) -> Sst {
    let variables = variable_pool(exploration.max_vertices);
    let state_name = |i: usize| format!("s{i}");
    let trim = |sub: &Substitution| -> Substitution {
        let mut trimmed = Substitution::blank(&variables);
        for v in &variables {
            if let Some(image) = sub.image(v) {
                trimmed.set(v.clone(), image.clone());
            }
        }
        trimmed
    };
    let mut delta = BTreeMap::new();
    let mut update = BTreeMap::new();
    for ((from, a), (to, sub)) in &exploration.transitions {
        let key = (state_name(*from), a.clone());
        delta.insert(key.clone(), state_name(*to));
        update.insert(key, trim(sub));
    }
    let finals: BTreeSet<State> = exploration.outputs.keys().map(|i| state_name(*i)).collect();
    let output_fn = exploration
        .outputs
        .iter()
        .map(|(i, expr)| (state_name(*i), expr.clone()))
        .collect();
    Sst {
        input: original.input.clone(),
        output: original.output.clone(),
        states: (0..exploration.states.len()).map(state_name).collect(),
        initial: state_name(0),
        finals,
        variables,
        delta,
        update,
        output_fn,
    }
}
