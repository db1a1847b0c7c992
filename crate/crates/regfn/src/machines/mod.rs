//! Machine models and their exact evaluation semantics.
//!
//! All values here are immutable after construction and every operation is a
//! pure function, so machines can be shared freely across threads.

pub mod pipeline;
pub mod sequential;
pub mod sst;
pub mod substitution;
pub mod twodft;
mod validate;

pub use pipeline::{Pipeline, Stage};
pub use sequential::{Direction, SequentialTransducer};
pub use sst::Sst;
pub use substitution::{OutputExpr, Piece, Substitution};
pub use twodft::{StartSide, TwoDft};
pub use validate::{ValidationReport, Violation};

use std::collections::BTreeSet;
use std::fmt;

/// Input and output symbols are opaque tokens compared by name.
pub type Symbol = String;
/// Machine states, also opaque names.
pub type State = String;
/// SST variable names.
pub type Var = String;
/// A word is a sequence of symbols.
pub type Word = Vec<Symbol>;

/// Reserved serialization name for the left endmarker.
pub const BEGIN_NAME: &str = "BEGIN";
/// Reserved serialization name for the right endmarker.
pub const END_NAME: &str = "END";

/// Splits a string into one-character symbols, a convenience for alphabets
/// whose symbols are single characters.
pub fn word(s: &str) -> Word {
    s.chars().map(|c| c.to_string()).collect()
}

/// Renders a word: plain concatenation when every symbol is one character,
/// space-separated otherwise.
pub fn render_word(w: &[Symbol]) -> String {
    if w.iter().all(|s| s.chars().count() == 1) {
        w.concat()
    } else {
        w.join(" ")
    }
}

/// Picks a name based on `base` that `taken` does not already contain.
pub fn fresh_name<S: AsRef<str>>(base: &str, taken: &[S]) -> String {
    let used: BTreeSet<&str> = taken.iter().map(|s| s.as_ref()).collect();
    if !used.contains(base) {
        return base.to_string();
    }
    for i in 2.. {
        let candidate = format!("{base}{i}");
        if !used.contains(candidate.as_str()) {
            return candidate;
        }
    }
    unreachable!()
}

/// Errors raised when constructing or running a machine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    /// A structural invariant does not hold; the report lists every violation.
    #[error("malformed machine: {0}")]
    MalformedMachine(ValidationReport),
    /// Consecutive pipeline stages disagree on their interface alphabet.
    #[error("alphabet mismatch between pipeline stages {0} and {1}")]
    AlphabetMismatch(usize, usize),
}

/// An ordered set of distinct symbols.
///
/// The order is total and fixed; it drives canonical word enumeration in the
/// equivalence oracle and deterministic serialization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicates, emptiness and the reserved
    /// endmarker names.
    pub fn new<S: Into<Symbol>>(symbols: Vec<S>) -> Result<Self, MachineError> {
        let symbols: Vec<Symbol> = symbols.into_iter().map(Into::into).collect();
        let mut report = ValidationReport::default();
        if symbols.is_empty() {
            report.push(
                "empty alphabet",
                "an alphabet must contain at least one symbol",
            );
        }
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s == BEGIN_NAME || s == END_NAME {
                report.push(
                    "reserved symbol",
                    format!("\"{s}\" is a reserved endmarker name"),
                );
            }
            if !seen.insert(s.clone()) {
                report.push("duplicate symbol", format!("\"{s}\" appears twice"));
            }
        }
        if report.is_empty() {
            Ok(Alphabet { symbols })
        } else {
            Err(MachineError::MalformedMachine(report))
        }
    }

    /// Alphabet of one-character symbols, one per character of `s`.
    pub fn chars(s: &str) -> Self {
        Alphabet::new(s.chars().map(|c| c.to_string()).collect::<Vec<_>>())
            .expect("invalid character alphabet")
    }

    pub fn contains(&self, s: &str) -> bool {
        self.symbols.iter().any(|t| t == s)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Set equality, ignoring symbol order.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        let a: BTreeSet<_> = self.symbols.iter().collect();
        let b: BTreeSet<_> = other.symbols.iter().collect();
        a == b
    }
}

/// A cell of the two-way input tape: the endmarkers or an alphabet letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tape {
    Begin,
    Letter(Symbol),
    End,
}

impl Tape {
    pub fn letter(s: impl Into<Symbol>) -> Self {
        Tape::Letter(s.into())
    }

    pub fn as_letter(&self) -> Option<&Symbol> {
        match self {
            Tape::Letter(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tape::Begin => f.write_str(BEGIN_NAME),
            Tape::End => f.write_str(END_NAME),
            Tape::Letter(s) => f.write_str(s),
        }
    }
}

/// Head move of a two-way transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }
}

/// Anything that maps input words to output words with an explicit domain.
///
/// `eval` returns `None` exactly when the input is rejected; rejection is
/// part of the defined transduction, so the equivalence oracle compares it
/// like any other outcome.
pub trait Evaluate {
    fn input_alphabet(&self) -> &Alphabet;
    fn eval(&self, input: &[Symbol]) -> Option<Word>;
}

/// A machine of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Machine {
    TwoDft(TwoDft),
    Sst(Sst),
    Sequential(SequentialTransducer),
    Pipeline(Pipeline),
}

impl Machine {
    pub fn kind(&self) -> &'static str {
        match self {
            Machine::TwoDft(_) => "2dft",
            Machine::Sst(_) => "sst",
            Machine::Sequential(_) => "sequential",
            Machine::Pipeline(_) => "pipeline",
        }
    }

    /// Runs every structural check for the machine kind.
    pub fn validate(&self) -> ValidationReport {
        match self {
            Machine::TwoDft(m) => m.validate(),
            Machine::Sst(m) => m.validate(),
            Machine::Sequential(m) => m.validate(),
            Machine::Pipeline(m) => m.validate(),
        }
    }
}

impl Evaluate for Machine {
    fn input_alphabet(&self) -> &Alphabet {
        match self {
            Machine::TwoDft(m) => m.input_alphabet(),
            Machine::Sst(m) => m.input_alphabet(),
            Machine::Sequential(m) => m.input_alphabet(),
            Machine::Pipeline(m) => m.input_alphabet(),
        }
    }

    fn eval(&self, input: &[Symbol]) -> Option<Word> {
        match self {
            Machine::TwoDft(m) => m.eval(input),
            Machine::Sst(m) => m.eval(input),
            Machine::Sequential(m) => m.eval(input),
            Machine::Pipeline(m) => m.eval(input),
        }
    }
}
