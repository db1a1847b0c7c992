//! Behavior quadruples of words in a two-way transducer and the resulting
//! transition monoid.
//!
//! A word can be entered from either side and left on either side, so the
//! possible partial runs over it split into four relations on states:
//! left-to-left, left-to-right, right-to-left and right-to-right. Words with
//! equal quadruples act identically in any context, which makes the
//! quadruples the elements of the machine's transition monoid. The monoid
//! ignores outputs entirely: it only reflects the underlying automaton.

use crate::machines::{State, Symbol, Tape, TwoDft};
use crate::monoid::{CapExceeded, MonoidClosure};
use std::collections::{BTreeMap, BTreeSet};

/// A relation on states.
pub type StateRelation = BTreeSet<(State, State)>;

/// The four behavior relations of a word.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct BehaviorQuadruple {
    /// Enter on the first letter, leave on the left.
    pub ll: StateRelation,
    /// Enter on the first letter, leave on the right.
    pub lr: StateRelation,
    /// Enter on the last letter, leave on the left.
    pub rl: StateRelation,
    /// Enter on the last letter, leave on the right.
    pub rr: StateRelation,
}

impl BehaviorQuadruple {
    /// Quadruple of the empty word: crossing relations are the identity,
    /// returning relations are empty.
    pub fn empty_word(states: &[State]) -> Self {
        let id: StateRelation = states.iter().map(|q| (q.clone(), q.clone())).collect();
        BehaviorQuadruple {
            ll: StateRelation::new(),
            lr: id.clone(),
            rl: id,
            rr: StateRelation::new(),
        }
    }
}

fn compose(r: &StateRelation, s: &StateRelation) -> StateRelation {
    let mut out = StateRelation::new();
    for (p, q) in r {
        for (q2, t) in s {
            if q == q2 {
                out.insert((p.clone(), t.clone()));
            }
        }
    }
    out
}

/// Reflexive-transitive closure over the given state universe.
fn star(r: &StateRelation, states: &BTreeSet<State>) -> StateRelation {
    let mut out: StateRelation = states.iter().map(|q| (q.clone(), q.clone())).collect();
    loop {
        let next = compose(&out, r);
        let before = out.len();
        out.extend(next);
        if out.len() == before {
            return out;
        }
    }
}

fn union(a: StateRelation, b: StateRelation) -> StateRelation {
    let mut out = a;
    out.extend(b);
    out
}

fn states_of(b: &BehaviorQuadruple, c: &BehaviorQuadruple) -> BTreeSet<State> {
    let mut states = BTreeSet::new();
    for rel in [&b.ll, &b.lr, &b.rl, &b.rr, &c.ll, &c.lr, &c.rl, &c.rr] {
        for (p, q) in rel.iter() {
            states.insert(p.clone());
            states.insert(q.clone());
        }
    }
    states
}

/// Behavior of the one-cell word `a`, with any chain of stay-moves at the
/// cell resolved eagerly. A chain that cycles or dies contributes no pair.
/// Endmarker cells are accepted so that endmarked segments can be analyzed;
/// the transition monoid itself is generated from plain letters only.
pub fn letter_behavior(t: &TwoDft, cell: &Tape) -> BehaviorQuadruple {
    let mut quad = BehaviorQuadruple::default();
    for p in &t.states {
        let mut visited: BTreeSet<&State> = BTreeSet::new();
        let mut current = p;
        let exit = loop {
            if !visited.insert(current) {
                break None;
            }
            match t.step(current, cell) {
                None => break None,
                Some((_, q, mv)) => match mv {
                    crate::machines::Move::Stay => current = q,
                    crate::machines::Move::Left => break Some((q.clone(), false)),
                    crate::machines::Move::Right => break Some((q.clone(), true)),
                },
            }
        };
        if let Some((q, right)) = exit {
            if right {
                quad.lr.insert((p.clone(), q.clone()));
                quad.rr.insert((p.clone(), q));
            } else {
                quad.ll.insert((p.clone(), q.clone()));
                quad.rl.insert((p.clone(), q));
            }
        }
    }
    quad
}

/// Quadruple of the concatenation `uv` from the quadruples of `u` and `v`.
///
/// Runs crossing the seam may bounce between the suffix of `u` and the
/// prefix of `v`; the bounce is the reflexive-transitive closure of the
/// alternation `v.ll ; u.rr` (or its mirror), and the four output relations
/// plug it between the entering and leaving parts.
pub fn compose_behaviors(u: &BehaviorQuadruple, v: &BehaviorQuadruple) -> BehaviorQuadruple {
    let states = states_of(u, v);
    let loop_v = star(&compose(&v.ll, &u.rr), &states);
    let loop_u = star(&compose(&u.rr, &v.ll), &states);
    let lr = compose(&compose(&u.lr, &loop_v), &v.lr);
    let ll = union(
        u.ll.clone(),
        compose(&compose(&compose(&u.lr, &loop_v), &v.ll), &u.rl),
    );
    let rr = union(
        v.rr.clone(),
        compose(&compose(&compose(&v.rl, &loop_u), &u.rr), &v.lr),
    );
    let rl = compose(&compose(&v.rl, &loop_u), &u.rl);
    BehaviorQuadruple { ll, lr, rl, rr }
}

/// Behavior of a tape segment measured by direct simulation: every state is
/// dropped on each end of the segment and run until it leaves or loops.
///
/// This is the oracle against which [`compose_behaviors`] is validated; it
/// shares no code with the algebraic composition.
pub fn simulate_segment_behavior(t: &TwoDft, segment: &[Tape]) -> BehaviorQuadruple {
    let n = segment.len() as i64;
    if n == 0 {
        return BehaviorQuadruple::empty_word(&t.states);
    }
    let max_steps = (t.states.len() as u64) * (n as u64);
    let mut quad = BehaviorQuadruple::default();
    for (enter_right, pos0) in [(false, 1i64), (true, n)] {
        for p in &t.states {
            let mut state = p.clone();
            let mut pos = pos0;
            let mut exit = None;
            for _ in 0..=max_steps {
                if pos < 1 {
                    exit = Some((state.clone(), false));
                    break;
                }
                if pos > n {
                    exit = Some((state.clone(), true));
                    break;
                }
                match t.step(&state, &segment[(pos - 1) as usize]) {
                    None => break,
                    Some((_, q, mv)) => {
                        state = q.clone();
                        pos += mv.offset();
                    }
                }
            }
            if let Some((q, right)) = exit {
                match (enter_right, right) {
                    (false, false) => quad.ll.insert((p.clone(), q)),
                    (false, true) => quad.lr.insert((p.clone(), q)),
                    (true, false) => quad.rl.insert((p.clone(), q)),
                    (true, true) => quad.rr.insert((p.clone(), q)),
                };
            }
        }
    }
    quad
}

/// Production of right-to-right runs over a tape segment: for each state
/// entered on the last cell, the exit state and the output produced, when the
/// run leaves the segment on the right.
pub fn right_to_right_runs(t: &TwoDft, segment: &[Tape]) -> BTreeMap<State, (State, Vec<Symbol>)> {
    let n = segment.len() as i64;
    let mut runs = BTreeMap::new();
    if n == 0 {
        return runs;
    }
    let max_steps = (t.states.len() as u64) * (n as u64);
    for p in &t.states {
        let mut state = p.clone();
        let mut pos = n;
        let mut produced: Vec<Symbol> = Vec::new();
        for _ in 0..=max_steps {
            if pos < 1 {
                break;
            }
            if pos > n {
                runs.insert(p.clone(), (state, produced));
                break;
            }
            match t.step(&state, &segment[(pos - 1) as usize]) {
                None => break,
                Some((out, q, mv)) => {
                    produced.extend(out.iter().cloned());
                    state = q.clone();
                    pos += mv.offset();
                }
            }
        }
    }
    runs
}

/// Transition monoid of the machine: the closure of the letter behaviors
/// under composition, with the empty-word quadruple as identity.
pub fn transition_monoid_2dft(
    t: &TwoDft,
    element_cap: usize,
) -> Result<MonoidClosure<BehaviorQuadruple>, CapExceeded> {
    let generators: BTreeMap<Symbol, BehaviorQuadruple> = t
        .input
        .symbols()
        .iter()
        .map(|a| (a.clone(), letter_behavior(t, &Tape::Letter(a.clone()))))
        .collect();
    MonoidClosure::generate(
        generators,
        BehaviorQuadruple::empty_word(&t.states),
        compose_behaviors,
        element_cap,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::machines::twodft::TwoDftBuilder;
    use crate::machines::{Alphabet, Move};
    use crate::monoid::Aperiodicity;
    use proptest::prelude::*;

    fn rel(pairs: &[(&str, &str)]) -> StateRelation {
        pairs
            .iter()
            .map(|(p, q)| (p.to_string(), q.to_string()))
            .collect()
    }

    #[test]
    fn letter_behaviors_of_the_block_doubler() {
        let t = fixtures::block_doubler_2dft();
        let a = letter_behavior(&t, &Tape::letter("a"));
        assert_eq!(a.lr, rel(&[("1", "1"), ("3", "3")]));
        assert_eq!(a.rr, rel(&[("1", "1"), ("3", "3")]));
        assert_eq!(a.ll, rel(&[("2", "2")]));
        assert_eq!(a.rl, rel(&[("2", "2")]));
        let b = letter_behavior(&t, &Tape::letter("b"));
        assert_eq!(b.lr, rel(&[("2", "3"), ("3", "1")]));
        assert_eq!(b.rr, rel(&[("2", "3"), ("3", "1")]));
        assert_eq!(b.ll, rel(&[("1", "2")]));
        assert_eq!(b.rl, rel(&[("1", "2")]));
    }

    #[test]
    fn stay_loop_contributes_no_pairs() {
        let t = TwoDftBuilder::new(Alphabet::chars("a"), Alphabet::chars("a"), "q")
            .rule("q", Tape::letter("a"), "", "q", Move::Stay)
            .build();
        let quad = letter_behavior(&t, &Tape::letter("a"));
        assert_eq!(quad, BehaviorQuadruple::default());
    }

    #[test]
    fn empty_word_is_a_two_sided_identity() {
        let t = fixtures::block_doubler_2dft();
        let e = BehaviorQuadruple::empty_word(&t.states);
        for sym in ["a", "b"] {
            let b = letter_behavior(&t, &Tape::letter(sym));
            assert_eq!(compose_behaviors(&e, &b), b);
            assert_eq!(compose_behaviors(&b, &e), b);
        }
    }

    #[test]
    fn composition_of_aa_collapses_the_seam_loops() {
        let t = fixtures::block_doubler_2dft();
        let a = letter_behavior(&t, &Tape::letter("a"));
        let aa = compose_behaviors(&a, &a);
        assert_eq!(aa.lr, rel(&[("1", "1"), ("3", "3")]));
        assert_eq!(aa.ll, rel(&[("2", "2")]));
        assert_eq!(aa.rl, rel(&[("2", "2")]));
        assert_eq!(aa.rr, rel(&[("1", "1"), ("3", "3")]));
    }

    #[test]
    fn composed_quadruples_match_direct_simulation_up_to_length_five() {
        for (_, t) in fixtures::aperiodic_2dfts() {
            let alphabet: Vec<String> = t.input.symbols().to_vec();
            let letters: BTreeMap<&String, BehaviorQuadruple> = alphabet
                .iter()
                .map(|a| (a, letter_behavior(&t, &Tape::Letter(a.clone()))))
                .collect();
            let mut words: Vec<Vec<String>> = vec![vec![]];
            for _ in 0..5 {
                let mut next = Vec::new();
                for w in &words {
                    for a in &alphabet {
                        let mut w2 = w.clone();
                        w2.push(a.clone());
                        next.push(w2);
                    }
                }
                for w in &next {
                    let folded = w
                        .iter()
                        .fold(BehaviorQuadruple::empty_word(&t.states), |acc, a| {
                            compose_behaviors(&acc, &letters[a])
                        });
                    let segment: Vec<Tape> = w.iter().map(|a| Tape::Letter(a.clone())).collect();
                    assert_eq!(
                        folded,
                        simulate_segment_behavior(&t, &segment),
                        "word {w:?}"
                    );
                }
                words = next;
            }
        }
    }

    #[test]
    fn block_doubler_monoid_is_aperiodic() {
        let t = fixtures::block_doubler_2dft();
        let monoid = transition_monoid_2dft(&t, 1 << 20).unwrap();
        assert!(matches!(
            monoid.aperiodicity(),
            Aperiodicity::Aperiodic { .. }
        ));
    }

    #[test]
    fn one_state_right_mover_has_at_most_two_elements() {
        let t = TwoDftBuilder::new(Alphabet::chars("ab"), Alphabet::chars("ab"), "q")
            .rule("q", Tape::letter("a"), "", "q", Move::Right)
            .rule("q", Tape::letter("b"), "", "q", Move::Right)
            .build();
        let monoid = transition_monoid_2dft(&t, 100).unwrap();
        assert!(monoid.len() <= 2);
        assert_eq!(monoid.aperiodicity(), Aperiodicity::Aperiodic { index: 1 });
    }

    #[test]
    fn state_swapping_machine_is_not_aperiodic() {
        let t = fixtures::state_swap_2dft();
        let monoid = transition_monoid_2dft(&t, 100).unwrap();
        assert_eq!(monoid.aperiodicity(), Aperiodicity::NotAperiodic);
    }

    #[test]
    fn monoid_ignores_outputs() {
        let mut stripped = fixtures::block_doubler_2dft();
        for (out, _, _) in stripped.delta.values_mut() {
            out.clear();
        }
        let original = transition_monoid_2dft(&fixtures::block_doubler_2dft(), 1 << 20).unwrap();
        let erased = transition_monoid_2dft(&stripped, 1 << 20).unwrap();
        let set1: BTreeSet<_> = original.elements().iter().cloned().collect();
        let set2: BTreeSet<_> = erased.elements().iter().cloned().collect();
        assert_eq!(set1, set2);
    }

    fn arb_letter() -> impl Strategy<Value = &'static str> {
        prop::sample::select(vec!["a", "b"])
    }

    proptest! {
        #[test]
        fn composition_is_associative(
            u in prop::collection::vec(arb_letter(), 1..4),
            v in prop::collection::vec(arb_letter(), 1..4),
            w in prop::collection::vec(arb_letter(), 1..4),
        ) {
            let t = fixtures::block_doubler_2dft();
            let behavior = |word: &[&str]| {
                word.iter().fold(BehaviorQuadruple::empty_word(&t.states), |acc, a| {
                    compose_behaviors(&acc, &letter_behavior(&t, &Tape::letter(*a)))
                })
            };
            let (bu, bv, bw) = (behavior(&u), behavior(&v), behavior(&w));
            let left = compose_behaviors(&compose_behaviors(&bu, &bv), &bw);
            let right = compose_behaviors(&bu, &compose_behaviors(&bv, &bw));
            prop_assert_eq!(left, right);
        }
    }
}
