//! A small collection of concrete machines used by the examples, the test
//! suite and the `examples --emit` command.

use crate::machines::sequential::Direction;
use crate::machines::sst::SstBuilder;
use crate::machines::substitution::{Piece, Substitution};
use crate::machines::twodft::TwoDftBuilder;
use crate::machines::{Alphabet, Machine, Move, SequentialTransducer, Sst, Tape, TwoDft};
use std::collections::BTreeMap;

/// Two-way transducer computing the block doubler: each maximal block `a^k`
/// of the input gains a block `b^k` right after it, and the input's `b`
/// separators are consumed. On `aab` it produces `aabb`.
///
/// It copies a block of `a`s while moving right, walks back over the block
/// emitting one `b` per `a`, then returns to the position after the block
/// separator and continues.
pub fn block_doubler_2dft() -> TwoDft {
    let ab = Alphabet::chars("ab");
    TwoDftBuilder::new(ab.clone(), ab, "1")
        .final_state("3")
        .rule("1", Tape::Begin, "", "1", Move::Right)
        .rule("1", Tape::letter("a"), "a", "1", Move::Right)
        .rule("1", Tape::letter("b"), "", "2", Move::Left)
        .rule("1", Tape::End, "", "2", Move::Left)
        .rule("2", Tape::letter("a"), "b", "2", Move::Left)
        .rule("2", Tape::letter("b"), "", "3", Move::Right)
        .rule("2", Tape::Begin, "", "3", Move::Right)
        .rule("3", Tape::letter("a"), "", "3", Move::Right)
        .rule("3", Tape::letter("b"), "", "1", Move::Right)
        .build()
}

/// Streaming version of the block doubler: `X` collects the rewritten
/// prefix, `Y` collects the pending block of `b`s.
pub fn block_doubler_sst() -> Sst {
    let ab = Alphabet::chars("ab");
    let mut on_a = Substitution::default();
    on_a.set("X", vec![Piece::var("X"), Piece::letter("a")]);
    on_a.set("Y", vec![Piece::var("Y"), Piece::letter("b")]);
    let mut on_b = Substitution::default();
    on_b.set("X", vec![Piece::var("X"), Piece::var("Y")]);
    on_b.set("Y", vec![]);
    SstBuilder::new(ab.clone(), ab, "q", &["X", "Y"])
        .final_state("q", vec![Piece::var("X"), Piece::var("Y")])
        .rule("q", "a", "q", on_a)
        .rule("q", "b", "q", on_b)
        .build()
}

/// The identity relabeler over `alphabet`, a single-state sequential machine.
pub fn identity_relabeler(alphabet: &Alphabet) -> SequentialTransducer {
    let mut delta = BTreeMap::new();
    for s in alphabet.symbols() {
        delta.insert(("i".to_string(), s.clone()), ("i".to_string(), s.clone()));
    }
    SequentialTransducer {
        direction: Direction::LeftToRight,
        input: alphabet.clone(),
        output: alphabet.clone(),
        states: vec!["i".to_string()],
        initial: "i".to_string(),
        delta,
    }
}

/// Right-to-left relabeler over `{a, b}` tagging each symbol with the number
/// of `b`s strictly to its right, modulo 2.
pub fn parity_relabeler() -> SequentialTransducer {
    let tags = ["(a,0)", "(a,1)", "(b,0)", "(b,1)"];
    let output = Alphabet::new(tags.to_vec()).unwrap();
    let mut delta = BTreeMap::new();
    for parity in 0..2usize {
        let state = parity.to_string();
        delta.insert(
            (state.clone(), "a".to_string()),
            (state.clone(), format!("(a,{parity})")),
        );
        delta.insert(
            (state.clone(), "b".to_string()),
            ((1 - parity).to_string(), format!("(b,{parity})")),
        );
    }
    SequentialTransducer {
        direction: Direction::RightToLeft,
        input: Alphabet::chars("ab"),
        output,
        states: vec!["0".to_string(), "1".to_string()],
        initial: "0".to_string(),
        delta,
    }
}

/// Copyless SST that swaps its two variables on every letter. Its variable
/// flow has order two, so none of its transition monoids is aperiodic.
pub fn swap_sst() -> Sst {
    let a = Alphabet::chars("a");
    let mut swap = Substitution::default();
    swap.set("X", vec![Piece::var("Y")]);
    swap.set("Y", vec![Piece::var("X")]);
    SstBuilder::new(a.clone(), a, "q", &["X", "Y"])
        .final_state("q", vec![Piece::var("X")])
        .rule("q", "a", "q", swap)
        .build()
}

/// SST whose single update squares its variable (`X := XX`). No bound `k`
/// makes it k-bounded, and its exact flow monoid is infinite.
pub fn doubling_sst() -> Sst {
    let a = Alphabet::chars("a");
    let mut square = Substitution::default();
    square.set("X", vec![Piece::var("X"), Piece::var("X")]);
    SstBuilder::new(a.clone(), a, "q", &["X"])
        .final_state("q", vec![Piece::var("X")])
        .rule("q", "a", "q", square)
        .build()
}

/// A 2-bounded (not 1-bounded) SST: on `a` it extends `X` and rebuilds `Y`
/// from two copies of `X`. It maps `a^n` to `a^(2(n-1))` for `n >= 1`.
pub fn two_bounded_sst() -> Sst {
    let a = Alphabet::chars("a");
    let mut up = Substitution::default();
    up.set("X", vec![Piece::var("X"), Piece::letter("a")]);
    up.set("Y", vec![Piece::var("X"), Piece::var("X")]);
    SstBuilder::new(a.clone(), a, "q", &["X", "Y"])
        .final_state("q", vec![Piece::var("Y")])
        .rule("q", "a", "q", up)
        .build()
}

/// 1-bounded but not copyless: `X` grows by one letter while `Y` is rebuilt
/// from the previous `X`, so `X` occurs in two images at once. Computes
/// `a^n -> a^(n-1)`.
pub fn drop_last_sst() -> Sst {
    let a = Alphabet::chars("a");
    let mut up = Substitution::default();
    up.set("X", vec![Piece::var("X"), Piece::letter("a")]);
    up.set("Y", vec![Piece::var("X")]);
    SstBuilder::new(a.clone(), a, "q", &["X", "Y"])
        .final_state("q", vec![Piece::var("Y")])
        .rule("q", "a", "q", up)
        .build()
}

/// Copyless single-variable SST reversing its input by prepending.
pub fn reverser_sst() -> Sst {
    let ab = Alphabet::chars("ab");
    let mut on_a = Substitution::default();
    on_a.set("X", vec![Piece::letter("a"), Piece::var("X")]);
    let mut on_b = Substitution::default();
    on_b.set("X", vec![Piece::letter("b"), Piece::var("X")]);
    SstBuilder::new(ab.clone(), ab, "q", &["X"])
        .final_state("q", vec![Piece::var("X")])
        .rule("q", "a", "q", on_a)
        .rule("q", "b", "q", on_b)
        .build()
}

/// Copyless two-variable SST computing `w -> ww`.
pub fn word_doubler_sst() -> Sst {
    let ab = Alphabet::chars("ab");
    let mut on_a = Substitution::default();
    on_a.set("X", vec![Piece::var("X"), Piece::letter("a")]);
    on_a.set("Y", vec![Piece::var("Y"), Piece::letter("a")]);
    let mut on_b = Substitution::default();
    on_b.set("X", vec![Piece::var("X"), Piece::letter("b")]);
    on_b.set("Y", vec![Piece::var("Y"), Piece::letter("b")]);
    SstBuilder::new(ab.clone(), ab, "q", &["X", "Y"])
        .final_state("q", vec![Piece::var("X"), Piece::var("Y")])
        .rule("q", "a", "q", on_a)
        .rule("q", "b", "q", on_b)
        .build()
}

/// Two-state one-way transducer whose `a` transitions swap the states. The
/// underlying automaton has a 2-cycle, so its behavior monoid contains a
/// non-trivial group and is not aperiodic.
pub fn state_swap_2dft() -> TwoDft {
    let a = Alphabet::chars("a");
    TwoDftBuilder::new(a.clone(), a, "p")
        .final_state("q")
        .rule("p", Tape::Begin, "", "p", Move::Right)
        .rule("p", Tape::letter("a"), "a", "q", Move::Right)
        .rule("q", Tape::letter("a"), "a", "p", Move::Right)
        .build()
}

/// One-way identity copier: every move is to the right.
pub fn one_way_2dft() -> TwoDft {
    let ab = Alphabet::chars("ab");
    TwoDftBuilder::new(ab.clone(), ab, "c")
        .final_state("c")
        .rule("c", Tape::Begin, "", "c", Move::Right)
        .rule("c", Tape::letter("a"), "a", "c", Move::Right)
        .rule("c", Tape::letter("b"), "b", "c", Move::Right)
        .build()
}

/// Copier that additionally writes a leading `a` on its left-endmarker
/// transition, so `w -> a w`. Exercises the output-deferring part of the
/// right-start normalization.
pub fn begin_output_2dft() -> TwoDft {
    let ab = Alphabet::chars("ab");
    TwoDftBuilder::new(ab.clone(), ab, "c")
        .final_state("c")
        .rule("c", Tape::Begin, "a", "c", Move::Right)
        .rule("c", Tape::letter("a"), "a", "c", Move::Right)
        .rule("c", Tape::letter("b"), "b", "c", Move::Right)
        .build()
}

/// Every documented machine with a stable name, as emitted by the CLI.
pub fn all() -> Vec<(&'static str, Machine)> {
    vec![
        ("block-doubler-2dft", Machine::TwoDft(block_doubler_2dft())),
        ("block-doubler-sst", Machine::Sst(block_doubler_sst())),
        ("parity-relabeler", Machine::Sequential(parity_relabeler())),
        ("swap-sst", Machine::Sst(swap_sst())),
        ("doubling-sst", Machine::Sst(doubling_sst())),
        ("two-bounded-sst", Machine::Sst(two_bounded_sst())),
        ("drop-last-sst", Machine::Sst(drop_last_sst())),
        ("reverser-sst", Machine::Sst(reverser_sst())),
        ("word-doubler-sst", Machine::Sst(word_doubler_sst())),
        ("state-swap-2dft", Machine::TwoDft(state_swap_2dft())),
        ("one-way-2dft", Machine::TwoDft(one_way_2dft())),
        ("begin-output-2dft", Machine::TwoDft(begin_output_2dft())),
    ]
}

/// The aperiodic two-way machines used for construction property tests.
pub fn aperiodic_2dfts() -> Vec<(&'static str, TwoDft)> {
    vec![
        ("block-doubler-2dft", block_doubler_2dft()),
        ("one-way-2dft", one_way_2dft()),
        ("begin-output-2dft", begin_output_2dft()),
    ]
}

/// The 1-bounded machines used for pipeline and output-structure tests.
pub fn one_bounded_ssts() -> Vec<(&'static str, Sst)> {
    vec![
        ("block-doubler-sst", block_doubler_sst()),
        ("drop-last-sst", drop_last_sst()),
        ("reverser-sst", reverser_sst()),
        ("word-doubler-sst", word_doubler_sst()),
    ]
}
