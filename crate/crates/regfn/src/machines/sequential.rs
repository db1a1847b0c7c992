//! Length-preserving sequential relabelers.

use super::validate::ValidationReport;
use super::{Alphabet, Evaluate, State, Symbol, Word};
use std::collections::{BTreeMap, BTreeSet};

/// Reading order of a sequential transducer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// A deterministic one-way relabeler: exactly one output symbol per input
/// symbol. Right-to-left machines read the word from its last symbol but
/// still return the relabeled word in left-to-right order.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialTransducer {
    pub direction: Direction,
    pub input: Alphabet,
    pub output: Alphabet,
    pub states: Vec<State>,
    pub initial: State,
    pub delta: BTreeMap<(State, Symbol), (State, Symbol)>,
}

impl SequentialTransducer {
    pub fn step(&self, state: &str, symbol: &str) -> Option<&(State, Symbol)> {
        self.delta.get(&(state.to_string(), symbol.to_string()))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let known: BTreeSet<&State> = self.states.iter().collect();
        if !known.contains(&self.initial) {
            report.push(
                "unknown state",
                format!("initial state \"{}\" is not declared", self.initial),
            );
        }
        for ((p, a), (q, b)) in &self.delta {
            if !known.contains(p) || !known.contains(q) {
                report.push(
                    "unknown state",
                    format!("transition ({p}, {a}) uses an undeclared state"),
                );
            }
            if !self.input.contains(a) {
                report.push(
                    "unknown symbol",
                    format!("transition ({p}, {a}) reads outside the input alphabet"),
                );
            }
            if !self.output.contains(b) {
                report.push(
                    "unknown symbol",
                    format!("transition ({p}, {a}) writes \"{b}\" outside the output alphabet"),
                );
            }
        }
        report
    }
}

impl Evaluate for SequentialTransducer {
    fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    fn eval(&self, input: &[Symbol]) -> Option<Word> {
        let mut state = self.initial.clone();
        let mut out: Word = Vec::with_capacity(input.len());
        let feed: Box<dyn Iterator<Item = &Symbol>> = match self.direction {
            Direction::LeftToRight => Box::new(input.iter()),
            Direction::RightToLeft => Box::new(input.iter().rev()),
        };
        for a in feed {
            let (next, written) = self.step(&state, a)?;
            out.push(written.clone());
            state = next.clone();
        }
        if self.direction == Direction::RightToLeft {
            out.reverse();
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::machines::word;

    #[test]
    fn identity_relabeler() {
        let m = fixtures::identity_relabeler(&Alphabet::chars("ab"));
        assert_eq!(m.eval(&word("ab")), Some(word("ab")));
    }

    #[test]
    fn right_to_left_parity_tags_count_of_b_to_the_right() {
        let m = fixtures::parity_relabeler();
        let out = m.eval(&word("bab")).unwrap();
        assert_eq!(out, vec!["(b,1)", "(a,1)", "(b,0)"]);
    }

    #[test]
    fn relabelers_preserve_length() {
        let m = fixtures::parity_relabeler();
        for input in ["", "a", "ba", "abba", "bbbbb"] {
            let w = word(input);
            assert_eq!(m.eval(&w).unwrap().len(), w.len());
        }
    }

    #[test]
    fn undefined_transition_rejects() {
        let mut m = fixtures::identity_relabeler(&Alphabet::chars("ab"));
        m.delta.remove(&("i".to_string(), "b".to_string()));
        assert_eq!(m.eval(&word("ab")), None);
    }
}
