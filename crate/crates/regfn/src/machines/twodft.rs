//! Deterministic two-way finite state transducers.

use super::validate::ValidationReport;
use super::{Alphabet, Evaluate, Move, State, Symbol, Tape, Word};
use std::collections::{BTreeMap, BTreeSet};

/// Side of the endmarked tape where the run starts.
///
/// Ordinary machines start on the left endmarker. Machines produced by the
/// right-start normalization begin on the right endmarker instead and must
/// emit nothing on their left-endmarker transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartSide {
    Left,
    Right,
}

/// A deterministic two-way transducer over endmarked input.
///
/// The transition table is partial: a missing entry rejects the input. The
/// run accepts the first time the head sits on the right endmarker in a
/// final state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDft {
    pub input: Alphabet,
    pub output: Alphabet,
    pub states: Vec<State>,
    pub initial: State,
    pub finals: BTreeSet<State>,
    pub delta: BTreeMap<(State, Tape), (Word, State, Move)>,
    pub start_side: StartSide,
}

impl TwoDft {
    /// Looks up the transition for `state` on tape cell `cell`.
    pub fn step(&self, state: &str, cell: &Tape) -> Option<&(Word, State, Move)> {
        self.delta.get(&(state.to_string(), cell.clone()))
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
        for f in &self.finals {
            if !known.contains(f) {
                report.push(
                    "unknown state",
                    format!("final state \"{f}\" is not declared"),
                );
            }
        }
        for ((p, cell), (out, q, mv)) in &self.delta {
            if !known.contains(p) || !known.contains(q) {
                report.push(
                    "unknown state",
                    format!("transition ({p}, {cell}) uses an undeclared state"),
                );
            }
            if let Tape::Letter(a) = cell {
                if !self.input.contains(a) {
                    report.push(
                        "unknown symbol",
                        format!("transition ({p}, {a}) reads outside the input alphabet"),
                    );
                }
            }
            for s in out {
                if !self.output.contains(s) {
                    report.push(
                        "unknown symbol",
                        format!(
                            "transition ({p}, {cell}) writes \"{s}\" outside the output alphabet"
                        ),
                    );
                }
            }
            match (cell, mv) {
                (Tape::Begin, Move::Left) => {
                    report.push(
                        "endmarker move",
                        format!("transition ({p}, {cell}) moves left off the tape"),
                    );
                }
                (Tape::End, Move::Right) => {
                    report.push(
                        "endmarker move",
                        format!("transition ({p}, {cell}) moves right off the tape"),
                    );
                }
                _ => {}
            }
            if self.start_side == StartSide::Right && *cell == Tape::Begin && !out.is_empty() {
                report.push(
                    "begin output",
                    format!("right-start machine writes on the left endmarker in state {p}"),
                );
            }
        }
        report
    }

    fn endmarker_moves_ok(&self) -> bool {
        self.delta.iter().all(|((_, cell), (_, _, mv))| {
            !matches!(
                (cell, mv),
                (Tape::Begin, Move::Left) | (Tape::End, Move::Right)
            )
        })
    }

    /// Simulates the machine on `⊢input⊣`.
    ///
    /// Returns `Ok(None)` when the input is rejected: an undefined transition,
    /// or more steps than the machine has configurations (a deterministic run
    /// that long has repeated a configuration and loops forever).
    pub fn run(&self, input: &[Symbol]) -> Result<Option<Word>, super::MachineError> {
        if !self.endmarker_moves_ok() {
            return Err(super::MachineError::MalformedMachine(self.validate()));
        }
        let n = input.len() as i64;
        let cell = |pos: i64| -> Tape {
            if pos == 0 {
                Tape::Begin
            } else if pos == n + 1 {
                Tape::End
            } else {
                Tape::Letter(input[(pos - 1) as usize].clone())
            }
        };
        let mut state = self.initial.clone();
        let mut pos: i64 = match self.start_side {
            StartSide::Left => 0,
            StartSide::Right => n + 1,
        };
        let mut out: Word = Vec::new();
        let max_steps = (self.states.len() as u64) * (input.len() as u64 + 2);
        for _ in 0..=max_steps {
            if pos == n + 1 && self.finals.contains(&state) {
                return Ok(Some(out));
            }
            match self.step(&state, &cell(pos)) {
                None => return Ok(None),
                Some((written, next, mv)) => {
                    out.extend(written.iter().cloned());
                    state = next.clone();
                    pos += mv.offset();
                }
            }
        }
        Ok(None)
    }
}

impl Evaluate for TwoDft {
    fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    fn eval(&self, input: &[Symbol]) -> Option<Word> {
        self.run(input)
            .expect("machine failed endmarker-move validation")
    }
}

/// Convenience builder used by fixtures and tests.
#[derive(Debug, Clone)]
pub struct TwoDftBuilder {
    machine: TwoDft,
}

impl TwoDftBuilder {
    pub fn new(input: Alphabet, output: Alphabet, initial: &str) -> Self {
        TwoDftBuilder {
            machine: TwoDft {
                input,
                output,
                states: vec![initial.to_string()],
                initial: initial.to_string(),
                finals: BTreeSet::new(),
                delta: BTreeMap::new(),
                start_side: StartSide::Left,
            },
        }
    }

    pub fn start_side(mut self, side: StartSide) -> Self {
        self.machine.start_side = side;
        self
    }

    pub fn state(mut self, name: &str) -> Self {
        if !self.machine.states.iter().any(|s| s == name) {
            self.machine.states.push(name.to_string());
        }
        self
    }

    pub fn final_state(mut self, name: &str) -> Self {
        self = self.state(name);
        self.machine.finals.insert(name.to_string());
        self
    }

    /// Adds `from --cell | write, move--> to`; `write` is split into
    /// one-character symbols.
    pub fn rule(mut self, from: &str, cell: Tape, write: &str, to: &str, mv: Move) -> Self {
        self = self.state(from).state(to);
        self.machine.delta.insert(
            (from.to_string(), cell),
            (super::word(write), to.to_string(), mv),
        );
        self
    }

    pub fn build(self) -> TwoDft {
        self.machine
    }
}
