//! From a 1-bounded SST to an equivalent two-way machine, built as a
//! three-stage pipeline:
//!
//! 1. a left-to-right relabeler annotating each position with the SST state
//!    before it (the transition taken),
//! 2. a right-to-left relabeler annotating each position with the set of
//!    variables that still flow into the final output from there,
//! 3. a two-way transducer walking the run's output structure: to print a
//!    variable's value it rewinds through the annotated word, descending
//!    into the first variable of each update, and on finishing a value it
//!    uses the useful-variable sets to decide where that value flows next.
//!
//! For copyless machines the flow target is already unique per letter, so
//! the second stage can be skipped.
//!
//! The word end is materialized: the pipeline appends a fresh end token to
//! its input, and the first stage tags it with the final state of the run.

use crate::machines::sequential::Direction;
use crate::machines::substitution::{is_k_linear, vars_of, Piece};
use crate::machines::{
    fresh_name, Alphabet, Move, Pipeline, SequentialTransducer, Sst, Stage, State, Symbol, Tape,
    TwoDft, Var, Word,
};
use crate::sst_analysis::{check_copyless, check_k_bounded};
use std::collections::{BTreeMap, BTreeSet};

/// Why a conversion was refused.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvertError {
    /// Some run or output expression can use a variable more than once.
    #[error("machine is not 1-bounded")]
    NotOneBounded,
    /// Skipping the useful-variables stage needs a copyless machine.
    #[error("machine is not copyless, the useful-variables stage cannot be skipped")]
    NotCopyless,
}

/// The token appended to pipeline inputs to mark the word end, fresh with
/// respect to the machine's input alphabet.
pub fn end_token(t: &Sst) -> Symbol {
    fresh_name("#", t.input.symbols())
}

fn pair_name(base: &str, state: &str) -> String {
    format!("({base},{state})")
}

fn triple_name(base: &str, state: &str, useful: &BTreeSet<Var>, order: &[Var]) -> String {
    let inner: Vec<&str> = order
        .iter()
        .filter(|v| useful.contains(*v))
        .map(|v| v.as_str())
        .collect();
    format!("({base},{state},{{{}}})", inner.join(","))
}

fn subsets(vars: &[Var]) -> Vec<BTreeSet<Var>> {
    let mut out = Vec::with_capacity(1 << vars.len());
    for mask in 0..(1usize << vars.len()) {
        out.push(
            vars.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| v.clone())
                .collect(),
        );
    }
    out
}

fn extended_input(t: &Sst) -> Vec<Symbol> {
    let mut symbols = t.input.symbols().to_vec();
    symbols.push(end_token(t));
    symbols
}

fn pair_alphabet(t: &Sst) -> Alphabet {
    let mut names: Vec<Symbol> = Vec::new();
    for a in extended_input(t) {
        for q in &t.states {
            names.push(pair_name(&a, q));
        }
    }
    Alphabet::new(names).expect("enriched pair alphabet")
}

fn triple_alphabet(t: &Sst) -> Alphabet {
    let sets = subsets(&t.variables);
    let mut names: Vec<Symbol> = Vec::new();
    for a in extended_input(t) {
        for q in &t.states {
            for s in &sets {
                names.push(triple_name(&a, q, s, &t.variables));
            }
        }
    }
    Alphabet::new(names).expect("enriched triple alphabet")
}

/// First stage: tags each letter with the state the machine was in before
/// reading it, and the end token with the run's last state.
pub fn build_prev_enricher(t: &Sst) -> SequentialTransducer {
    let end = end_token(t);
    let sink = fresh_name("f", &t.states);
    let mut states = t.states.clone();
    states.push(sink.clone());
    let mut delta = BTreeMap::new();
    for q in &t.states {
        for a in t.input.symbols() {
            if let Some(q2) = t.step(q, a) {
                delta.insert((q.clone(), a.clone()), (q2.clone(), pair_name(a, q)));
            }
        }
        delta.insert((q.clone(), end.clone()), (sink.clone(), pair_name(&end, q)));
    }
    SequentialTransducer {
        direction: Direction::LeftToRight,
        input: Alphabet::new(extended_input(t)).expect("extended input alphabet"),
        output: pair_alphabet(t),
        states,
        initial: t.initial.clone(),
        delta,
    }
}

fn seed_useful(t: &Sst, state: &State) -> BTreeSet<Var> {
    if t.finals.contains(state) {
        t.output_fn
            .get(state)
            .map(|e| vars_of(e))
            .unwrap_or_default()
    } else {
        BTreeSet::new()
    }
}

fn useful_before(t: &Sst, state: &State, letter: &str, after: &BTreeSet<Var>) -> BTreeSet<Var> {
    let Some(sub) = t.update_of(state, letter) else {
        return BTreeSet::new();
    };
    let mut before = BTreeSet::new();
    for y in after {
        if let Some(image) = sub.image(y) {
            before.extend(vars_of(image));
        }
    }
    before
}

/// Second stage: a right-to-left pass propagating the set of variables that
/// flow into the final output. The end token is seeded with the variables of
/// the last state's output expression and is itself tagged with the empty
/// set; a non-final last state seeds the empty set and the third stage
/// rejects.
pub fn build_useful_vars_enricher(t: &Sst) -> SequentialTransducer {
    let end = end_token(t);
    let sets = subsets(&t.variables);
    let set_state = |s: &BTreeSet<Var>| -> State {
        let inner: Vec<&str> = t
            .variables
            .iter()
            .filter(|v| s.contains(*v))
            .map(|v| v.as_str())
            .collect();
        format!("{{{}}}", inner.join(","))
    };
    let initial = "i".to_string();
    let mut states = vec![initial.clone()];
    states.extend(sets.iter().map(&set_state));
    let mut delta = BTreeMap::new();
    for q in &t.states {
        let seeded = seed_useful(t, q);
        delta.insert(
            (initial.clone(), pair_name(&end, q)),
            (
                set_state(&seeded),
                triple_name(&end, q, &BTreeSet::new(), &t.variables),
            ),
        );
        for a in t.input.symbols() {
            if t.step(q, a).is_none() {
                continue;
            }
            for s in &sets {
                let before = useful_before(t, q, a, s);
                delta.insert(
                    (set_state(s), pair_name(a, q)),
                    (set_state(&before), triple_name(a, q, s, &t.variables)),
                );
            }
        }
    }
    SequentialTransducer {
        direction: Direction::RightToLeft,
        input: pair_alphabet(t),
        output: triple_alphabet(t),
        states,
        initial,
        delta,
    }
}

/// Leading letters of an expression, and the first variable with the rest.
fn leading(expr: &[Piece]) -> (Word, Option<(&Var, &[Piece])>) {
    let mut letters = Vec::new();
    for (i, piece) in expr.iter().enumerate() {
        match piece {
            Piece::Letter(s) => letters.push(s.clone()),
            Piece::Var(v) => return (letters, Some((v, &expr[i + 1..]))),
        }
    }
    (letters, None)
}

/// Letters following the (unique) occurrence of `x` in `expr`, up to the
/// next variable if any.
fn after_occurrence<'a>(expr: &'a [Piece], x: &str) -> Option<(Word, Option<&'a Var>)> {
    let pos = expr
        .iter()
        .position(|p| matches!(p, Piece::Var(v) if v == x))?;
    let mut letters = Vec::new();
    for piece in &expr[pos + 1..] {
        match piece {
            Piece::Letter(s) => letters.push(s.clone()),
            Piece::Var(v) => return Some((letters, Some(v))),
        }
    }
    Some((letters, None))
}

fn output_exprs_linear(t: &Sst) -> bool {
    t.output_fn.values().all(|e| is_k_linear(e, 1))
}

struct FollowerBuilder<'a> {
    t: &'a Sst,
    scan: State,
    accept: State,
    delta: BTreeMap<(State, Tape), (Word, State, Move)>,
}

impl<'a> FollowerBuilder<'a> {
    fn new(t: &'a Sst) -> Self {
        let mut reserved: Vec<String> = Vec::new();
        for v in &t.variables {
            reserved.push(Self::in_state_of(v));
            reserved.push(Self::out_state_of(v));
        }
        let scan = fresh_name("p0", &reserved);
        reserved.push(scan.clone());
        let accept = fresh_name("f", &reserved);
        FollowerBuilder {
            t,
            scan,
            accept,
            delta: BTreeMap::new(),
        }
    }

    fn in_state_of(v: &str) -> State {
        format!("({v},in)")
    }

    fn out_state_of(v: &str) -> State {
        format!("({v},out)")
    }

    fn states(&self) -> Vec<State> {
        let mut states = vec![self.scan.clone()];
        for v in &self.t.variables {
            states.push(Self::in_state_of(v));
            states.push(Self::out_state_of(v));
        }
        states.push(self.accept.clone());
        states
    }

    fn rule(&mut self, from: State, cell: Tape, write: Word, to: State, mv: Move) {
        self.delta.insert((from, cell), (write, to, mv));
    }

    /// Transitions shared by both variants; `useful` is the tagged set for
    /// the triple form and `None` for the pair form, in which case flow
    /// targets are resolved against all variables (copyless input).
    fn add_rules_for(
        &mut self,
        name: Symbol,
        base: &Symbol,
        state: &State,
        useful: Option<&BTreeSet<Var>>,
    ) {
        let t = self.t;
        let end = end_token(t);
        let cell = Tape::Letter(name);
        if *base == end {
            if useful.is_some_and(|s| !s.is_empty()) {
                return; // the end token is only ever tagged with the empty set
            }
            let Some(expr) = t.output_fn.get(state).filter(|_| t.finals.contains(state)) else {
                return;
            };
            let (prefix, first) = leading(expr);
            match first {
                None => self.rule(
                    self.scan.clone(),
                    cell.clone(),
                    prefix,
                    self.accept.clone(),
                    Move::Right,
                ),
                Some((x, _)) => self.rule(
                    self.scan.clone(),
                    cell.clone(),
                    prefix,
                    Self::in_state_of(x),
                    Move::Left,
                ),
            }
            for x in &t.variables {
                if let Some((letters, next)) = after_occurrence(expr, x) {
                    let (to, mv) = match next {
                        None => (self.accept.clone(), Move::Right),
                        Some(x2) => (Self::in_state_of(x2), Move::Left),
                    };
                    self.rule(Self::out_state_of(x), cell.clone(), letters, to, mv);
                }
            }
            return;
        }

        // ordinary letter: scanning passes through, producing states follow
        // the update of the step this position encodes
        self.rule(
            self.scan.clone(),
            cell.clone(),
            vec![],
            self.scan.clone(),
            Move::Right,
        );
        let Some(sub) = t.update_of(state, base) else {
            return;
        };
        for x in &t.variables {
            let image = sub.image(x).map(Vec::as_slice).unwrap_or(&[]);
            let (prefix, first) = leading(image);
            match first {
                None => self.rule(
                    Self::in_state_of(x),
                    cell.clone(),
                    prefix,
                    Self::out_state_of(x),
                    Move::Right,
                ),
                Some((y, _)) => self.rule(
                    Self::in_state_of(x),
                    cell.clone(),
                    prefix,
                    Self::in_state_of(y),
                    Move::Left,
                ),
            }

            // where does the finished value of x flow?
            let candidates: Vec<&Var> = match useful {
                Some(set) => set
                    .iter()
                    .filter(|y| {
                        sub.image(y)
                            .map(|img| vars_of(img).contains(x))
                            .unwrap_or(false)
                    })
                    .collect(),
                None => t
                    .variables
                    .iter()
                    .filter(|y| {
                        sub.image(y.as_str())
                            .map(|img| vars_of(img).contains(x))
                            .unwrap_or(false)
                    })
                    .collect(),
            };
            if candidates.len() != 1 {
                continue; // zero: dead value; several: left undefined, rejects
            }
            let y = candidates[0];
            let image_y = sub.image(y).expect("candidate has an image");
            let Some((letters, next)) = after_occurrence(image_y, x) else {
                continue;
            };
            let (to, mv) = match next {
                None => (Self::out_state_of(y), Move::Right),
                Some(x2) => (Self::in_state_of(x2), Move::Left),
            };
            self.rule(Self::out_state_of(x), cell.clone(), letters, to, mv);
        }
    }

    fn build(mut self, with_useful_sets: bool) -> TwoDft {
        let t = self.t;
        self.rule(
            self.scan.clone(),
            Tape::Begin,
            vec![],
            self.scan.clone(),
            Move::Right,
        );
        for v in &t.variables {
            self.rule(
                Self::in_state_of(v),
                Tape::Begin,
                vec![],
                Self::out_state_of(v),
                Move::Right,
            );
        }
        let bases = extended_input(t);
        if with_useful_sets {
            for base in &bases {
                for q in &t.states {
                    for s in subsets(&t.variables) {
                        let name = triple_name(base, q, &s, &t.variables);
                        self.add_rules_for(name, base, q, Some(&s));
                    }
                }
            }
        } else {
            for base in &bases {
                for q in &t.states {
                    self.add_rules_for(pair_name(base, q), base, q, None);
                }
            }
        }
        let input = if with_useful_sets {
            triple_alphabet(t)
        } else {
            pair_alphabet(t)
        };
        TwoDft {
            input,
            output: t.output.clone(),
            states: self.states(),
            initial: self.scan.clone(),
            finals: BTreeSet::from([self.accept.clone()]),
            delta: self.delta,
            start_side: crate::machines::StartSide::Left,
        }
    }
}

/// Third stage over state-and-useful-set triples.
pub fn build_output_follower(t: &Sst) -> Result<TwoDft, ConvertError> {
    if !check_k_bounded(t, 1) || !output_exprs_linear(t) {
        return Err(ConvertError::NotOneBounded);
    }
    Ok(FollowerBuilder::new(t).build(true))
}

/// Third-stage variant over plain state pairs, valid for copyless machines.
pub fn build_output_follower_copyless(t: &Sst) -> Result<TwoDft, ConvertError> {
    if !check_k_bounded(t, 1) || !output_exprs_linear(t) {
        return Err(ConvertError::NotOneBounded);
    }
    if !check_copyless(t) {
        return Err(ConvertError::NotCopyless);
    }
    Ok(FollowerBuilder::new(t).build(false))
}

/// The full conversion. With `skip_useful_vars` the machine must be copyless
/// and the pipeline has two stages instead of three.
pub fn sst_to_2dft(t: &Sst, skip_useful_vars: bool) -> Result<Pipeline, ConvertError> {
    let first = Stage::Sequential(build_prev_enricher(t));
    let stages = if skip_useful_vars {
        vec![first, Stage::TwoDft(build_output_follower_copyless(t)?)]
    } else {
        vec![
            first,
            Stage::Sequential(build_useful_vars_enricher(t)),
            Stage::TwoDft(build_output_follower(t)?),
        ]
    };
    Ok(Pipeline::new(t.input.clone(), Some(end_token(t)), stages)
        .expect("stage alphabets chain by construction"))
}

/// The output structure of an accepted run: a graph with an in node and an
/// out node per useful variable and level, whose unique path from the start
/// spells the produced word. Used as an oracle for the third stage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum StructNode {
    Start,
    In(Var, usize),
    Out(Var, usize),
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputStructure {
    pub edges: BTreeMap<StructNode, Vec<(Word, StructNode)>>,
    /// Path nodes from start to end, in traversal order.
    pub path: Vec<StructNode>,
    /// Concatenated labels along the path.
    pub output: Word,
}

/// Builds the output structure of `t` on `w`, or `None` when `w` is
/// rejected. Panics if the structure is ambiguous, which a 1-bounded machine
/// with 1-linear output expressions never is.
pub fn build_output_structure(t: &Sst, w: &[Symbol]) -> Option<OutputStructure> {
    let trace = t.state_trace(w)?;
    let last = trace.last().unwrap();
    if !t.finals.contains(last) {
        return None;
    }
    let final_expr = t.output_fn.get(last)?;
    let n = w.len();

    // useful variables per level, from the output expression backwards
    let mut useful: Vec<BTreeSet<Var>> = vec![BTreeSet::new(); n + 1];
    useful[n] = vars_of(final_expr);
    for j in (1..=n).rev() {
        useful[j - 1] = useful_before(t, &trace[j - 1], &w[j - 1], &useful[j]);
    }

    let mut edges: BTreeMap<StructNode, Vec<(Word, StructNode)>> = BTreeMap::new();
    let mut connect = |from: StructNode, label: Word, to: StructNode| {
        edges.entry(from).or_default().push((label, to));
    };

    for x in &useful[0] {
        connect(
            StructNode::In(x.clone(), 0),
            vec![],
            StructNode::Out(x.clone(), 0),
        );
    }
    for j in 1..=n {
        let sub = t
            .update_of(&trace[j - 1], &w[j - 1])
            .expect("run is defined");
        for x in &useful[j] {
            let image = sub.image(x).map(Vec::as_slice).unwrap_or(&[]);
            let (prefix, first) = leading(image);
            match first {
                None => connect(
                    StructNode::In(x.clone(), j),
                    prefix,
                    StructNode::Out(x.clone(), j),
                ),
                Some((y, mut rest)) => {
                    connect(
                        StructNode::In(x.clone(), j),
                        prefix,
                        StructNode::In(y.clone(), j - 1),
                    );
                    let mut current = y.clone();
                    loop {
                        let (letters, next) = leading(rest);
                        match next {
                            None => {
                                connect(
                                    StructNode::Out(current, j - 1),
                                    letters,
                                    StructNode::Out(x.clone(), j),
                                );
                                break;
                            }
                            Some((z, rest2)) => {
                                connect(
                                    StructNode::Out(current, j - 1),
                                    letters,
                                    StructNode::In(z.clone(), j - 1),
                                );
                                current = z.clone();
                                rest = rest2;
                            }
                        }
                    }
                }
            }
        }
    }
    let (prefix, first) = leading(final_expr);
    match first {
        None => connect(StructNode::Start, prefix, StructNode::End),
        Some((y, mut rest)) => {
            connect(StructNode::Start, prefix, StructNode::In(y.clone(), n));
            let mut current = y.clone();
            loop {
                let (letters, next) = leading(rest);
                match next {
                    None => {
                        connect(StructNode::Out(current, n), letters, StructNode::End);
                        break;
                    }
                    Some((z, rest2)) => {
                        connect(
                            StructNode::Out(current, n),
                            letters,
                            StructNode::In(z.clone(), n),
                        );
                        current = z.clone();
                        rest = rest2;
                    }
                }
            }
        }
    }

    // follow the unique path from the start
    let mut path = vec![StructNode::Start];
    let mut output: Word = Vec::new();
    let mut current = StructNode::Start;
    let total_edges: usize = edges.values().map(Vec::len).sum();
    for _ in 0..=total_edges + 1 {
        if current == StructNode::End {
            return Some(OutputStructure {
                edges,
                path,
                output,
            });
        }
        let outgoing = edges.get(&current).map(Vec::as_slice).unwrap_or(&[]);
        assert!(
            outgoing.len() == 1,
            "ambiguous output structure at {current:?}: {} outgoing edges",
            outgoing.len()
        );
        let (label, next) = outgoing[0].clone();
        output.extend(label);
        path.push(next.clone());
        current = next;
    }
    panic!("output structure traversal did not terminate");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::{check_equiv, words_up_to};
    use crate::fixtures;
    use crate::machines::sst::SstBuilder;
    use crate::machines::substitution::Substitution;
    use crate::machines::{word, Evaluate};

    #[test]
    fn prev_enricher_tags_states_before_each_letter() {
        let t = fixtures::block_doubler_sst();
        let a1 = build_prev_enricher(&t);
        let enriched = a1.eval(&["a".into(), "b".into(), "#".into()]).unwrap();
        assert_eq!(enriched, vec!["(a,q)", "(b,q)", "(#,q)"]);
        assert_eq!(a1.eval(&["#".into()]).unwrap(), vec!["(#,q)"]);
    }

    #[test]
    fn prev_enricher_on_a_two_state_alternator() {
        let mut id = Substitution::default();
        id.set("X", vec![Piece::var("X")]);
        let t = SstBuilder::new(Alphabet::chars("a"), Alphabet::chars("a"), "p", &["X"])
            .final_state("p", vec![Piece::var("X")])
            .rule("p", "a", "q", id.clone())
            .rule("q", "a", "p", id)
            .build();
        let a1 = build_prev_enricher(&t);
        let enriched = a1.eval(&["a".into(), "a".into(), "#".into()]).unwrap();
        assert_eq!(enriched, vec!["(a,p)", "(a,q)", "(#,p)"]);
    }

    #[test]
    fn useful_vars_enricher_propagates_the_output_variables() {
        let t = fixtures::block_doubler_sst();
        let a1 = build_prev_enricher(&t);
        let a2 = build_useful_vars_enricher(&t);
        let enriched = a2
            .eval(&a1.eval(&["a".into(), "b".into(), "#".into()]).unwrap())
            .unwrap();
        assert_eq!(enriched, vec!["(a,q,{X,Y})", "(b,q,{X,Y})", "(#,q,{})"]);
        let lone = a2.eval(&a1.eval(&["#".into()]).unwrap()).unwrap();
        assert_eq!(lone, vec!["(#,q,{})"]);
    }

    #[test]
    fn follower_produces_the_block_doubler_output() {
        let t = fixtures::block_doubler_sst();
        let a1 = build_prev_enricher(&t);
        let a2 = build_useful_vars_enricher(&t);
        let b = build_output_follower(&t).unwrap();
        let enriched = a2.eval(&a1.eval(&word("aab#")).unwrap()).unwrap();
        assert_eq!(b.eval(&enriched), Some(word("aabb")));
        let empty = a2.eval(&a1.eval(&word("#")).unwrap()).unwrap();
        assert_eq!(b.eval(&empty), Some(word("")));
    }

    #[test]
    fn follower_state_count_is_two_per_variable_plus_two() {
        let t = fixtures::block_doubler_sst();
        let b = build_output_follower(&t).unwrap();
        assert_eq!(b.states.len(), 2 * t.variables.len() + 2);
    }

    #[test]
    fn follower_only_moves_right_from_in_states_when_flipping_to_out() {
        let t = fixtures::block_doubler_sst();
        let b = build_output_follower(&t).unwrap();
        for ((from, _), (_, to, mv)) in &b.delta {
            if from.ends_with(",in)") && *mv == Move::Right {
                assert_eq!(to, &from.replace(",in)", ",out)"));
            }
        }
    }

    #[test]
    fn pipelines_match_the_machine_on_short_words() {
        let t = fixtures::block_doubler_sst();
        let alphabet = t.input.clone();
        for skip in [false, true] {
            let pipeline = sst_to_2dft(&t, skip).unwrap();
            assert_eq!(pipeline.stages().len(), if skip { 2 } else { 3 });
            assert!(
                check_equiv(&pipeline, &t, &alphabet, 6).is_equal(),
                "skip={skip}"
            );
        }
    }

    #[test]
    fn non_copyless_one_bounded_machine_needs_the_useful_sets() {
        let t = fixtures::drop_last_sst();
        let pipeline = sst_to_2dft(&t, false).unwrap();
        assert!(check_equiv(&pipeline, &t, &t.input.clone(), 6).is_equal());
        assert_eq!(
            sst_to_2dft(&t, true).unwrap_err(),
            ConvertError::NotCopyless
        );
    }

    #[test]
    fn unbounded_machines_are_refused() {
        assert_eq!(
            sst_to_2dft(&fixtures::two_bounded_sst(), false).unwrap_err(),
            ConvertError::NotOneBounded
        );
    }

    #[test]
    fn every_stage_stays_aperiodic_across_the_corpus() {
        use crate::behaviors::transition_monoid_2dft;
        use crate::monoid::{state_function_monoid, Aperiodicity};
        use crate::sst_analysis::{ftm_closure, CoeffBound};
        let aperiodic = |a: Aperiodicity| matches!(a, Aperiodicity::Aperiodic { .. });
        for (name, t) in fixtures::one_bounded_ssts() {
            let ftm = ftm_closure(&t, CoeffBound::Cap(1), 1 << 20).unwrap();
            assert!(aperiodic(ftm.aperiodicity()), "{name} input not aperiodic");
            let pipeline = sst_to_2dft(&t, false).unwrap();
            for (i, stage) in pipeline.stages().iter().enumerate() {
                let ok = match stage {
                    crate::machines::Stage::Sequential(m) => aperiodic(
                        state_function_monoid(
                            &m.states,
                            m.input.symbols(),
                            |q, a| m.step(q, a).map(|(next, _)| next.clone()),
                            1 << 20,
                        )
                        .unwrap()
                        .aperiodicity(),
                    ),
                    crate::machines::Stage::TwoDft(m) => {
                        aperiodic(transition_monoid_2dft(m, 1 << 20).unwrap().aperiodicity())
                    }
                };
                assert!(ok, "{name}: stage {i} not aperiodic");
            }
        }
    }

    #[test]
    fn structure_traversal_matches_evaluation() {
        for (name, t) in fixtures::one_bounded_ssts() {
            for w in words_up_to(&t.input, 5) {
                let by_eval = t.eval(&w);
                let by_structure = build_output_structure(&t, &w).map(|s| s.output);
                assert_eq!(by_eval, by_structure, "{name} on {w:?}");
            }
        }
    }

    #[test]
    fn structure_of_the_empty_word_is_a_bare_path() {
        let t = fixtures::block_doubler_sst();
        let s = build_output_structure(&t, &[]).unwrap();
        assert_eq!(s.output, word(""));
    }

    #[test]
    fn structure_rejects_what_the_machine_rejects() {
        let mut t = fixtures::block_doubler_sst();
        t.finals.clear();
        t.output_fn.clear();
        assert_eq!(build_output_structure(&t, &word("ab")), None);
    }
}
